"""Exception hierarchy. Every error carries a machine-readable code and context
dict so the CLI can emit structured error JSON."""


class TopoArchError(Exception):
    code = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_json_obj(self):
        return {"code": self.code, "message": self.message, "context": self.context}


class DimensionMismatchError(TopoArchError):
    code = "dimension-mismatch"


class BudgetExceededError(TopoArchError):
    code = "budget-exceeded"


class MalformedComplexError(TopoArchError):
    code = "malformed-complex"


class EmptyDimensionError(TopoArchError):
    code = "empty-dimension"


class InvalidPolicyError(TopoArchError):
    code = "invalid-policy-parameter"


class InfeasibleSpecError(TopoArchError):
    code = "infeasible-spec"


class RejectionStallError(TopoArchError):
    code = "rejection-stall"


class LayoutOverflowError(TopoArchError):
    code = "layout-overflow"


class InvalidArchitectureError(TopoArchError):
    code = "invalid-architecture"


class DivergenceError(TopoArchError):
    code = "divergence"


class UnsupportedDimensionError(TopoArchError):
    code = "unsupported-dimension"


class InsufficientDataError(TopoArchError):
    code = "insufficient-data"


class InvalidParameterError(TopoArchError):
    code = "invalid-parameter"


class SizeLimitError(TopoArchError):
    code = "size-limit"


class SingularNeighborhoodError(TopoArchError):
    code = "singular-neighborhood"


class NetworkError(TopoArchError):
    code = "network-error"


class DatasetNotFoundError(TopoArchError):
    code = "dataset-not-found"


class NonBinaryLabelError(TopoArchError):
    code = "non-binary-label"


class CacheIntegrityError(TopoArchError):
    code = "cache-integrity"


class MissingArtifactError(TopoArchError):
    code = "missing-artifact"
