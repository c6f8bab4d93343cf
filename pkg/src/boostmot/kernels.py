"""Backend selection for the hot kernels.

Prefers the compiled extension when it was built; otherwise falls back to the
NumPy implementation. Both expose the same functions with identical results;
``BACKEND`` records which one is active.
"""

try:
    from ._kernels import BACKEND_NAME as BACKEND
    from ._kernels import iou_matrix, soft_biou_matrix, solve_lap
except ImportError:  # extension not built; pure-Python twin
    from .kernels_py import BACKEND_NAME as BACKEND
    from .kernels_py import iou_matrix, soft_biou_matrix, solve_lap

__all__ = ["BACKEND", "iou_matrix", "soft_biou_matrix", "solve_lap"]
