"""Kernel backend selection.

The compiled extension ``radonhgf._kernels`` is used when it was built and
``RADONHGF_PURE_PYTHON`` is unset; otherwise the pure-Python reference
module is used. ``BACKEND`` names the active choice.
"""
import os

if os.environ.get("RADONHGF_PURE_PYTHON"):
    from radonhgf import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from radonhgf import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from radonhgf import _kernels_py as _impl

        BACKEND = "python"

mono_mul = _impl.mono_mul
poly_mul = _impl.poly_mul
poly_add_scaled = _impl.poly_add_scaled
jet_mul = _impl.jet_mul
grid_sum = _impl.grid_sum

__all__ = ["BACKEND", "mono_mul", "poly_mul", "poly_add_scaled", "jet_mul", "grid_sum"]
