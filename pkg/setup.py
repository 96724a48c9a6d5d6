"""Build script for the optional compiled subset-enumeration kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the exhaustive weak-Lp suprema fast.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fbllab.kernels._subsetnorm",
                ["src/fbllab/kernels/_subsetnorm.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
