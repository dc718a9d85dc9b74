# backend/errors.py
from typing import Any, Dict, Optional


class HodgeError(Exception):
    """
    Raiz da hierarquia de erros do projeto.

    - exit_code: código de saída usado pela CLI
    - http_status: status usado pela API
    - details: dados extras (testemunhas, diagnósticos) emitidos no JSON
    """

    exit_code = 1
    http_status = 422
    kind = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, "details": self.details}


class InputError(HodgeError):
    exit_code = 2
    http_status = 400
    kind = "input-error"


class DimensionMismatchError(InputError):
    kind = "dimension-mismatch"


class NotNilpotentError(InputError):
    kind = "not-nilpotent"


class NotIntegralError(InputError):
    kind = "not-integral"


class SingularMatrixError(InputError):
    kind = "singular-matrix"


class NotAGradingError(HodgeError):
    kind = "not-a-grading"


class NotAnMHSError(HodgeError):
    kind = "not-an-mhs"


class NonexistenceError(HodgeError):
    kind = "does-not-exist"


class UnsupportedRegimeError(HodgeError):
    exit_code = 3
    http_status = 501
    kind = "unsupported"


class VerificationError(HodgeError):
    # pós-condição violada: bug interno, nunca silenciar
    exit_code = 4
    http_status = 500
    kind = "verification-failed"
