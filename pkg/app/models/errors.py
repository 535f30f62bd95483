from typing import Any, Dict


class InterpolationError(Exception):
    code = "SERVER_ERROR"
    exit_status = 2

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        error: Dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            error["details"] = self.details
        return {"error": error}


class ValidationError(InterpolationError):
    code = "VALIDATION_ERROR"
    exit_status = 1


class NumericalError(InterpolationError):
    code = "NUMERICAL_ERROR"
    exit_status = 2


# Validation failures

class InvalidParameters(ValidationError):
    code = "INVALID_PARAMETERS"


class InvalidConfig(ValidationError):
    code = "INVALID_CONFIG"


class SupportMismatch(ValidationError):
    code = "SUPPORT_MISMATCH"


class LagOutOfRange(ValidationError):
    code = "LAG_OUT_OF_RANGE"


class GridMismatch(ValidationError):
    code = "GRID_MISMATCH"


class WeightsNotPositive(ValidationError):
    code = "WEIGHTS_NOT_POSITIVE"


class NotCovered(ValidationError):
    code = "NOT_COVERED"


class IndexOutOfPath(ValidationError):
    code = "INDEX_OUT_OF_PATH"


# Numerical failures

class NonPositiveDensity(NumericalError):
    code = "NON_POSITIVE_DENSITY"


class TruncationTooShort(NumericalError):
    code = "TRUNCATION_TOO_SHORT"


class NotPositive(NumericalError):
    code = "NOT_POSITIVE"


class MaskViolation(NumericalError):
    code = "MASK_VIOLATION"


class FactorizationInaccurate(NumericalError):
    code = "FACTORIZATION_INACCURATE"


class NotPositiveDefinite(NumericalError):
    code = "NOT_POSITIVE_DEFINITE"


class NotConverged(NumericalError):
    code = "NOT_CONVERGED"


class ClosedFormInvalid(NumericalError):
    code = "CLOSED_FORM_INVALID"


class NewtonNotConverged(NumericalError):
    code = "NEWTON_NOT_CONVERGED"


class PositivityLost(NumericalError):
    code = "POSITIVITY_LOST"


class InfeasibleClass(NumericalError):
    code = "INFEASIBLE_CLASS"


class SingularCovariance(NumericalError):
    code = "SINGULAR_COVARIANCE"


class EmbeddingNotPSD(NumericalError):
    code = "EMBEDDING_NOT_PSD"


class VerificationFailed(NumericalError):
    code = "VERIFICATION_FAILED"
