"""Kernel backend selection.

The compiled extension (`mdltab._kernels`, Cython) is preferred when it was
built; otherwise the pure-Python fallback is used.  Set ``MDLTAB_BACKEND`` to
``python`` or ``native`` to force a choice (forcing ``native`` raises if the
extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("MDLTAB_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "native":
    from . import _kernels as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME
mine_closed = _impl.mine_closed
CoverEngine = _impl.CoverEngine


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.insert(0, "native")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for ``name`` ('python' or 'native')."""
    if name == "python":
        return _kernels_py
    if name == "native":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
