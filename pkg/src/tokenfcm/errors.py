"""Exception hierarchy shared by every tokenfcm module."""


class TokenFCMError(Exception):
    """Base class for all library errors."""


class InvalidTallyError(TokenFCMError, ValueError):
    pass


class OutOfScaleError(TokenFCMError, ValueError):
    pass


class InvalidWeightsError(TokenFCMError, ValueError):
    pass


class ArityError(TokenFCMError, ValueError):
    pass


class NumericDomainError(TokenFCMError, ValueError):
    pass


class ConfigurationError(TokenFCMError, ValueError):
    pass


class MissingNodeError(TokenFCMError, KeyError):
    def __str__(self) -> str:
        # KeyError quotes its argument; keep the message readable.
        return str(self.args[0]) if self.args else "missing node"


class InvalidModelError(TokenFCMError, ValueError):
    """Raised when a model fails validation before simulation."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"model is not simulatable: {lines}")


class NotConvergedError(TokenFCMError, RuntimeError):
    pass


class ModelFileError(TokenFCMError, ValueError):
    """Raised by the model-file parser; carries every issue found."""

    def __init__(self, issues):
        self.issues = list(issues)
        text = "\n".join(str(i) for i in self.issues)
        super().__init__(text)
