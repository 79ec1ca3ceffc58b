"""Exception hierarchy. Every error carries a stable ``name`` used in JSON reports."""


class CMVError(Exception):
    """Base class for all library errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class NotHermitian(CMVError, ValueError):
    pass


class NotPSD(CMVError, ValueError):
    pass


class NoConvergence(CMVError, ArithmeticError):
    pass


class NotUnitary(CMVError, ValueError):
    pass


class CayleyDegenerate(CMVError, ArithmeticError):
    pass


class Singular(CMVError, ArithmeticError):
    pass


class NormTooLarge(CMVError, ValueError):
    def __init__(self, k, norm=None):
        self.k = k
        self.norm = norm
        msg = f"op_norm(alpha_{k}) too close to 1"
        if norm is not None:
            msg += f" ({norm:.17g})"
        super().__init__(msg)


class ShapeMismatch(CMVError, ValueError):
    pass


class WindowTooSmall(CMVError, ValueError):
    pass


class OutOfWindow(CMVError, IndexError):
    pass


class ZeroArgument(CMVError, ValueError):
    pass


class MissingLeadingTerm(CMVError, ArithmeticError):
    pass


class DepthMismatch(CMVError, ValueError):
    pass


class DegenerateMeasure(CMVError, ArithmeticError):
    def __init__(self, degree, detail=""):
        self.degree = degree
        super().__init__(f"Gram matrix degenerate at degree {degree}{': ' + detail if detail else ''}")


class NodeCollision(CMVError, ValueError):
    pass


class NonInvertibleConstantTerm(CMVError, ArithmeticError):
    pass


class MissingAlpha(CMVError, ValueError):
    pass


class SingularWronskian(CMVError, ArithmeticError):
    pass


class WindowTooNarrow(CMVError, ValueError):
    pass


class ContractionViolated(CMVError, ValueError):
    pass


class HypothesisViolated(CMVError, ValueError):
    pass


class HNotInvertible(CMVError, ArithmeticError):
    pass


class AlphaNotInvertible(CMVError, ArithmeticError):
    pass


class SeriesOrderSolveFailed(CMVError, ArithmeticError):
    pass


class BadConfig(CMVError, ValueError):
    pass
