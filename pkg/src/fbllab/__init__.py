"""fbllab: weak-Lp sequence norms, free-lattice norm estimation,
embedding certificates, renorming embeddings and positive projections
on finite atomic spaces."""

from .kernels import BACKEND as kernel_backend

__version__ = "0.1.0"
