"""Exception types raised by the samplers."""


class NumericalDegeneracyError(ArithmeticError):
    """A probability-zero numerical event occurred (vanishing Gram-Schmidt
    residual, non-monotone CDF, empty angular mass).  Usually a tolerance
    problem or a bug, never silently absorbed."""


class RejectionLimitError(RuntimeError):
    """The rejection sampler exceeded its proposal budget for one point."""

    def __init__(self, message, rejections):
        super().__init__(message)
        self.rejections = rejections
