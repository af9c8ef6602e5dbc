from typing import Any, Dict, Optional


class ProjsymError(Exception):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details if details is not None else {}


class ExprSyntaxError(ProjsymError):
    def __init__(self, message: str, position: int, source: Optional[str] = None):
        super().__init__(f"{message} at offset {position}", {"position": position, "source": source})
        self.position = position
        self.source = source


class UnknownIdentifier(ProjsymError):
    def __init__(self, name: str, known: Optional[list] = None):
        super().__init__(f"Unknown identifier '{name}'", {"name": name, "known": known})
        self.name = name


class DomainError(ProjsymError):
    pass


class DimensionError(ProjsymError):
    pass


class SingularMetric(ProjsymError):
    pass


class InsufficientSamples(ProjsymError):
    pass


class StepFailure(ProjsymError):
    pass


class LeftDomain(ProjsymError):
    pass


class IllConditionedInterpolation(ProjsymError):
    def __init__(self, condition: float):
        super().__init__(f"Slope grid Vandermonde condition {condition:.3e} exceeds limit", {"condition": condition})
        self.condition = condition


class DegenerateSigma(ProjsymError):
    pass


class DegeneratePencil(ProjsymError):
    pass


class DependentBasis(ProjsymError):
    pass


class InvalidConstants(ProjsymError):
    pass


class DegeneratePartner(ProjsymError):
    pass


class SingularZeta(ProjsymError):
    pass


class SingularDenominator(ProjsymError):
    pass


class PreconditionError(ProjsymError):
    pass


class UnknownEntry(ProjsymError):
    def __init__(self, entry_id: str):
        super().__init__(f"No catalog entry named '{entry_id}'", {"id": entry_id})
        self.entry_id = entry_id


class ParamOutOfRange(ProjsymError):
    pass


class ConfigError(ProjsymError):
    pass
