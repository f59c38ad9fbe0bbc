"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``DGDEFORM_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("DGDEFORM_PURE_PYTHON"):
    from . import _pykernels as _impl

    COMPILED = False
else:
    try:
        from . import _ckernels as _impl

        COMPILED = True
    except ImportError:
        from . import _pykernels as _impl

        COMPILED = False

odd_mask = _impl.odd_mask
koszul_sign = _impl.koszul_sign
mono_mul = _impl.mono_mul
mul_terms = _impl.mul_terms

__all__ = ["COMPILED", "odd_mask", "koszul_sign", "mono_mul", "mul_terms"]
