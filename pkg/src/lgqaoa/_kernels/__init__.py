"""Hot-kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
pure-numpy twins are used otherwise, or when LGQAOA_PURE_PYTHON is set.
Both backends produce identical results for identical inputs.
"""

import os

from . import _mc_py

if os.environ.get("LGQAOA_PURE_PYTHON"):
    _mc = None
else:
    try:
        from . import _mc
    except ImportError:
        _mc = None

HAVE_COMPILED = _mc is not None
BACKEND = "compiled" if HAVE_COMPILED else "python"


def get_backend(name="auto"):
    """Resolve a backend name to its kernel module.

    "auto" prefers the compiled extension; "compiled" and "python" force
    one side (raising if the extension is unavailable).
    """
    if name == "auto":
        return _mc if HAVE_COMPILED else _mc_py
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available")
        return _mc
    if name == "python":
        return _mc_py
    raise ValueError(f"unknown kernel backend {name!r}")
