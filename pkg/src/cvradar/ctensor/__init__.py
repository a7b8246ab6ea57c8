"""Complex tensor arithmetic and the reverse-mode gradient engine."""

from .tensor import ComplexTensor, ShapeError
from .tape import GradTape, Gradient, TapeError, active_tape
from .gradcheck import GradCheckError, grad_check, grad_check_multi
from . import ops

__all__ = [
    "ComplexTensor", "ShapeError",
    "GradTape", "Gradient", "TapeError", "active_tape",
    "GradCheckError", "grad_check", "grad_check_multi",
    "ops",
]
