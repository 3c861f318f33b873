__all__ = [
    'ConvergenceError'
]


class ConvergenceError(RuntimeError):
    """
    Raised when an iterative solve (Newton, Krylov, pressure or eigen) fails to reach its tolerance.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual
