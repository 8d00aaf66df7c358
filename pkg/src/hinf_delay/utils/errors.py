from typing import Any, Dict, Optional


class BaseError(Exception):
    """Base exception for all hinf-delay errors.

    ``code`` selects the CLI message template and the exit code, ``details``
    carries the numbers behind the failure.
    """
    def __init__(self, code: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(code, message)
        self.code = code
        self.message = message
        self.details = details or {}

    def __str__(self):
        if not self.details:
            return f"{self.code}: {self.message}"
        extra = ", ".join(f"{key}={value}" for key, value in self.details.items())
        return f"{self.code}: {self.message} ({extra})"

    def to_dict(self) -> Dict[str, Any]:
        return {"type": type(self).__name__, "code": self.code,
                "message": self.message, "details": self.details}


class ConfigurationError(BaseError):
    """Invalid plant, weight, grid or run parameters."""
    pass

class EvaluationError(BaseError):
    """Transfer function evaluated on or next to a pole."""
    pass

class SynthesisError(BaseError):
    """Failures of the factorization, gamma search or controller assembly."""
    pass

class VerificationError(BaseError):
    """Closed-loop check did not reproduce the synthesized cost."""
    pass

class ArtifactError(BaseError):
    """Reading or writing controller files, reports and traces."""
    pass


def pole_hit(where: str, s: Any, magnitude: float) -> EvaluationError:
    """Build the error raised when a denominator vanishes at ``s``."""
    return EvaluationError(
        "pole_hit",
        f"Denominator of {where} vanishes at s={s}",
        {"s": str(s), "denominator_magnitude": float(magnitude)},
    )
