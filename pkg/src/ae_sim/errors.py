"""Exception types shared across the simulator. Every error carries a stable
machine-readable code so the CLI and HTTP service can surface structured
errors without string matching."""


class AESimError(Exception):
    code = "error"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.message = message
        self.field = field

    def as_dict(self):
        out = {"code": self.code, "message": self.message}
        if self.field is not None:
            out["field"] = self.field
        return out


class InvalidArgumentError(AESimError):
    code = "invalid-argument"


class OutOfRangeError(AESimError):
    code = "out-of-range"


class EmptyHistogramError(AESimError):
    code = "empty-histogram"


class DatasetError(AESimError):
    code = "dataset-error"


class CapacityError(AESimError):
    code = "capacity-exceeded"


class UnknownAlgorithmError(AESimError):
    code = "unknown-algorithm"
