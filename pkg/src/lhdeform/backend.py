"""Kernel backend selection.

Prefers the compiled extension `_kernels`; falls back to the pure-Python twin
`_kernels_py`.  Set LHDEFORM_PURE=1 to force the fallback (used by the
benchmark and the parity tests).
"""

import os

if os.environ.get("LHDEFORM_PURE") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

shc = kernels.shc
shc_prime = kernels.shc_prime
mp_rhs = kernels.mp_rhs
cr_rhs = kernels.cr_rhs
r2_rhs = kernels.r2_rhs

BACKEND = "compiled" if kernels.__name__.endswith("._kernels") else "pure"


def using_compiled():
    return BACKEND == "compiled"
