"""Kernel dispatch: compiled extension when available, pure Python otherwise.

``BACKEND`` records which implementation won; set ``POLYREC_PURE=1`` in the
environment to force the fallback (used by the benchmark and the tests).
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("POLYREC_PURE"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

levenshtein = _impl.levenshtein
within_distance = _impl.within_distance
