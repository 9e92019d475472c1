"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
pure-Python reference is used. TOPOARCH_BACKEND=python|compiled forces the
choice (forcing `compiled` raises if the extension is missing).
"""
import os

from . import pyref

_forced = os.environ.get("TOPOARCH_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = pyref
elif _forced == "compiled":
    from . import _compiled as _impl  # ImportError here is intentional
else:
    try:
        from . import _compiled as _impl
    except ImportError:
        _impl = pyref

BACKEND = _impl.BACKEND_NAME
expand_cliques = _impl.expand_cliques
reduce_boundary = _impl.reduce_boundary
