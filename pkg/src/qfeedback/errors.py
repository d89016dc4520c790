"""Exception hierarchy shared by all modules."""


class QFeedbackError(Exception):
    pass


class InvalidState(QFeedbackError, ValueError):
    """A matrix failed density-matrix validation.

    ``violations`` maps each violated check (``"NotHermitian"``,
    ``"NotUnitTrace"``, ``"NotPSD"``) to the offending magnitude.
    """

    def __init__(self, violations):
        self.violations = dict(violations)
        parts = [f"{k} (magnitude {v:.3e})" for k, v in self.violations.items()]
        super().__init__("invalid density matrix: " + ", ".join(parts))


class NotHermitian(InvalidState):
    pass


class NotUnitTrace(InvalidState):
    pass


class NotPSD(InvalidState):
    pass


class NotXForm(QFeedbackError, ValueError):
    pass


class NotUnitary(QFeedbackError, ValueError):
    pass


class BasisError(QFeedbackError, ValueError):
    pass


class EtaZero(QFeedbackError, ValueError):
    pass


class NegativeRate(QFeedbackError, ValueError):
    pass


class TauOutOfRange(QFeedbackError, ValueError):
    pass


class UnsupportedScenario(QFeedbackError, ValueError):
    pass


class StepSizeUnderflow(QFeedbackError, ArithmeticError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"integrator step size underflow at t={t!r}")


class StateBlowUp(QFeedbackError, ArithmeticError):
    pass
