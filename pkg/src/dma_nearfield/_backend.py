"""Pick the kernel implementation at import time.

The compiled ``_ckernels`` module is used when it was built; otherwise the
pure-Python ``_pykernels`` takes over.  Set ``DMA_NEARFIELD_BACKEND`` to
``python`` or ``cython`` to force one (``cython`` raises if unavailable).
"""
import os

_choice = os.environ.get("DMA_NEARFIELD_BACKEND", "").strip().lower()

if _choice == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        if _choice == "cython":
            raise
        from . import _pykernels as kernels

BACKEND = kernels.NAME


def available_backends():
    """Return ``{name: module}`` for every kernel backend importable here."""
    from . import _pykernels

    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
