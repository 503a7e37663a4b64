from typing import Optional, Tuple


class NcertError(Exception):
    """Base class for every error raised by the certifier"""


class ExprSyntaxError(NcertError, ValueError):
    """Malformed expression text"""

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")


class ExprDomainError(NcertError, ArithmeticError):
    """Expression cannot be evaluated at the requested time"""

    def __init__(self, message: str, t=None, entry: Optional[Tuple[int, ...]] = None):
        self.t = t
        self.entry = entry
        self.reason = message
        super().__init__(self._format())

    def _format(self) -> str:
        text = self.reason
        if self.entry is not None:
            text = f"entry {self.entry}: {text}"
        return text

    def at_entry(self, entry: Tuple[int, ...]) -> "ExprDomainError":
        """Return a copy tagged with matrix/vector coordinates"""
        return ExprDomainError(self.reason, t=self.t, entry=entry)


class UnsupportedNormError(NcertError, ValueError):
    pass


class SignChangeError(NcertError, ValueError):
    """Denominator of a sup ratio vanishes or changes sign on the grid"""


class ConfigError(NcertError, ValueError):
    pass


class PreconditionError(NcertError, ValueError):
    pass


class IntegrationError(NcertError, RuntimeError):
    pass


class NoCertifiableRateError(NcertError):
    pass


class ParameterUnusedError(ConfigError):
    pass
