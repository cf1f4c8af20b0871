"""Exception hierarchy shared by all inqkit modules."""


class InqError(Exception):
    """Base class for every error raised by inqkit."""


class ModelError(InqError, ValueError):
    """A model, structure or model file is malformed or referenced wrongly."""


class SignatureError(InqError, ValueError):
    """A formula mentions atoms or agents the model does not declare."""


class FormulaSyntaxError(InqError, ValueError):
    def __init__(self, message, text=None, pos=0):
        self.text = text
        self.pos = pos
        if text is not None:
            message = f"{message} at position {pos}: {text!r}"
        super().__init__(message)


class CapExceeded(InqError):
    """A brute-force operation would exceed its configured size cap."""


class S5Error(InqError, ValueError):
    """An operation that needs an inquisitive epistemic (S5) model got something else."""


class BudgetExhausted(InqError):
    """Unbounded unfolding ran past its world budget."""


class UnsupportedFormula(InqError, ValueError):
    """Formula uses a connective the requested evaluation cannot handle."""
