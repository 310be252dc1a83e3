"""Compute-backend selection.

The compiled core (``covadj._ccore``, Cython) and the pure-Python core
(``covadj._pycore``) expose the same functions and produce bit-identical
results; the compiled one is preferred when importable.  Set
``COVADJ_BACKEND=python`` or ``COVADJ_BACKEND=c`` to force a choice.
"""

from __future__ import annotations

import os

_requested = os.environ.get("COVADJ_BACKEND", "").strip().lower()

if _requested in ("python", "py"):
    from . import _pycore as core
elif _requested == "c":
    from . import _ccore as core  # type: ignore[no-redef]
elif _requested in ("", "auto"):
    try:
        from . import _ccore as core  # type: ignore[no-redef]
    except ImportError:
        from . import _pycore as core
else:
    raise RuntimeError(
        f"COVADJ_BACKEND={_requested!r} not understood (use 'c', 'python' or 'auto')")

BACKEND_NAME: str = core.BACKEND_NAME


def available_backends() -> list[str]:
    """Names of importable cores, compiled first."""
    names = []
    try:
        from . import _ccore  # noqa: F401
        names.append("c")
    except ImportError:
        pass
    names.append("python")
    return names
