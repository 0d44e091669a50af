"""Exception hierarchy for darbouxforge.

Every error raised by the package derives from DarbouxForgeError so that the
CLI can map any failure onto its input-error exit code.
"""


class DarbouxForgeError(Exception):
    """Base class for all darbouxforge errors."""


class UnknownGenerator(DarbouxForgeError):
    """A generator name or index does not belong to the presentation."""


class DegreeMismatch(DarbouxForgeError):
    """An element does not have the cohomological degree required by its slot."""


class PresentationMismatch(DarbouxForgeError):
    """Two elements (or a morphism's endpoints) live over different presentations."""


class UnsupportedShift(DarbouxForgeError):
    """The requested shift k is outside the supported range (k must be odd, k < 0)."""


class ShapeMismatch(DarbouxForgeError):
    """Shape vectors are inconsistent (wrong length, negative counts, u/v mismatch)."""


class MasterEquationViolated(DarbouxForgeError):
    """The Hamiltonian fails the classical master equation."""


class RelativeMasterEquationViolated(DarbouxForgeError):
    """The superpotential/Hamiltonian pair fails the relative master equation."""


class WeightZero(DarbouxForgeError):
    """Contraction was applied to a weight-zero form."""


class WeightMismatch(DarbouxForgeError):
    """An operation combined forms of different weights."""


class PointNotOnClassicalLocus(DarbouxForgeError):
    """A point assignment does not kill the degree-zero image of the differential."""


class NotAChainMap(DarbouxForgeError):
    """The matrices of a complex map do not commute with the differentials."""


class NotClosed(DarbouxForgeError):
    """A form required to be closed under the internal differential is not."""


class DegenerateAtPoint(DarbouxForgeError):
    """A pairing required to be non-degenerate is singular at a supplied point."""


class DegreeOutOfRange(DarbouxForgeError):
    """A per-degree query addressed a degree outside the complex's support."""


class SpecSyntaxError(DarbouxForgeError):
    """A parse error in an instance-specification file, with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column
