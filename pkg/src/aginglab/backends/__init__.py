"""Kernel backend selection.

The compiled Cython kernels are preferred; the numpy fallback is used when the
extension is missing.  ``AGINGLAB_BACKEND=python|cython`` forces a choice (the
benchmark and the parity tests use this).  Both backends are importable side
by side via :func:`get_backend`.
"""

from __future__ import annotations

import os

from . import pykernels

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None


def available_backends() -> dict:
    out = {"python": pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def get_backend(name: str):
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {sorted(available_backends())})") from None


def _select():
    forced = os.environ.get("AGINGLAB_BACKEND")
    if forced:
        return get_backend(forced)
    return _compiled if _compiled is not None else pykernels


kernels = _select()
BACKEND = kernels.NAME
