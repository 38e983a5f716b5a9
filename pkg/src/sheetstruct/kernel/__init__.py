"""Kernel selection: compiled extension when available, pure Python otherwise.

Set SHEETSTRUCT_PURE=1 to force the fallback (used by the benchmark and the
equivalence tests).
"""

import os

from . import pure

if os.environ.get("SHEETSTRUCT_PURE"):
    _impl = pure
    NATIVE = False
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
        NATIVE = True
    except ImportError:
        _impl = pure
        NATIVE = False

relative_keys = _impl.relative_keys
decompose = _impl.decompose
