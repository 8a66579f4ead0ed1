"""Complex primitive middle-degree forms non-vanishing on Lagrangian subspaces."""

from lagform.kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
