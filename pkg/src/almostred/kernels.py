"""Kernel backend selection.

The compiled extension is used when importable; set ``ALMOSTRED_PURE=1`` to
force the numpy fallback.  Both expose ``orbit_products`` and
``riccati_sign_changes`` with identical contracts.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ALMOSTRED_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

orbit_products = _impl.orbit_products
riccati_sign_changes = _impl.riccati_sign_changes
orbit_phases = _kernels_py.orbit_phases
eval_map = _kernels_py.eval_map


def use_backend(name):
    """Switch backend at runtime (``"python"`` or ``"compiled"``); used by benchmarks and tests."""
    global orbit_products, riccati_sign_changes, BACKEND
    if name == "python":
        mod = _kernels_py
    elif name == "compiled":
        from . import _kernels as mod
    else:
        raise ValueError(name)
    orbit_products = mod.orbit_products
    riccati_sign_changes = mod.riccati_sign_changes
    BACKEND = name
