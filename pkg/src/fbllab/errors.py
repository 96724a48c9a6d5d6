"""Exception types shared across the package."""


class FbllabError(Exception):
    """Base class for all package errors."""


class DimensionTooLarge(FbllabError):
    """Exhaustive enumeration requested above the hard atom/coordinate cap."""


class InvalidExponent(FbllabError):
    """Exponent outside its admissible range (e.g. r >= p)."""


class NonCountingMeasure(FbllabError):
    """Operation requires uniform unit atom weights."""


class ArityMismatch(FbllabError):
    """Expression uses more generators than were supplied."""


class DimensionMismatch(FbllabError):
    """Vector dimensions do not line up."""


class UnknownGenerator(FbllabError):
    """Generator index outside 1..K."""


class LatticeSyntaxError(FbllabError):
    """DSL parse failure; carries position and the expected-token set."""

    def __init__(self, message, line, column, expected=()):
        super().__init__(f"{message} at line {line}, column {column}"
                         + (f" (expected one of: {', '.join(sorted(expected))})" if expected else ""))
        self.line = line
        self.column = column
        self.expected = frozenset(expected)


class DegenerateWitness(FbllabError):
    """All functionals of a witness tuple vanish on the unit ball."""


class ZeroOperator(FbllabError):
    """Operator norm is zero; the lower bound ratio is undefined."""


class NumericalInstability(FbllabError):
    """Simplex pivot below tolerance; perturb the instance and retry."""


class CertificateInvalid(FbllabError):
    """Embedding certificate failed re-verification."""


class PositivityViolation(FbllabError):
    """b_i > 0 on an atom of measure zero."""


class CoverInvalid(FbllabError):
    """Subset family is not an exact constant-multiplicity cover."""


class NegativeInput(FbllabError):
    """Concave gauge is only defined on the non-negative cone."""


class DegenerateGauge(FbllabError):
    """Gauge has a vanishing factor at e; no supergradient there."""


class ScaleViolation(FbllabError):
    """Simple function must first be rescaled to C <= 1."""


class DegenerateFunctional(FbllabError):
    """A projection functional vanishes on its own basis vector."""


class SupportOutOfRange(FbllabError):
    """Vector support exceeds the Schreier truncation."""
