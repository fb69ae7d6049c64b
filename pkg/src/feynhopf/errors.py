"""Exception hierarchy shared across the package.

Every domain failure raises a subclass of FeynhopfError so the CLI can map
it to a machine-readable error object with a stable ``kind`` string.
"""

from __future__ import annotations


class FeynhopfError(Exception):
    """Base class for all domain errors raised by this package."""

    kind = "domain-error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_json(self) -> dict:
        obj = {"kind": self.kind, "message": self.message}
        if self.details:
            obj["details"] = {k: v for k, v in sorted(self.details.items())}
        return obj


class PoleOverflowError(FeynhopfError):
    """A Laurent product or construction needs a deeper pole than allowed."""

    kind = "pole-overflow"


class TruncationMismatchError(FeynhopfError):
    """Two series with different truncation orders were combined."""

    kind = "truncation-mismatch"


class SingularMatrixError(FeynhopfError):
    """Matrix inversion hit a zero pivot."""

    kind = "singular-matrix"


class DimensionMismatchError(FeynhopfError):
    """Vectors, forms or tensors of incompatible dimension were combined."""

    kind = "dimension-mismatch"


class GraphStructureError(FeynhopfError):
    """Malformed half-edge data, or an operation applied to an unsuitable graph."""

    kind = "graph-structure"


class MissingVertexTensorError(FeynhopfError):
    """A graph contains a vertex valence the interaction model does not define."""

    kind = "missing-vertex-tensor"


class SlotLimitError(FeynhopfError):
    """Brute-force Wick expansion was asked for more slots than the guard allows."""

    kind = "slot-limit"


class SchemaError(FeynhopfError):
    """Invalid input document; ``pointer`` locates the offending field."""

    kind = "schema"

    def __init__(self, message: str, pointer: str = "", **details):
        super().__init__(message, pointer=pointer, **details)
        self.pointer = pointer


class NonLocalDivergenceError(FeynhopfError):
    """A renormalized value kept a pole: the character/nesting data is inconsistent."""

    kind = "non-local-divergence"


class ResidualPoleError(FeynhopfError):
    """The renormalization-group limit does not exist for the supplied data."""

    kind = "residual-pole"
