"""Backend selection for the orbit-image kernel.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is used.  Both return identical arrays.  Setting
``PNKUNITS_BACKEND=python`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _orbit_py

try:
    from . import _orbit as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _orbit_py.orbit_images}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled.orbit_images

_active = "cython" if _compiled is not None else "python"
if os.environ.get("PNKUNITS_BACKEND") in _BACKENDS:
    _active = os.environ["PNKUNITS_BACKEND"]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}")
    _active = name


def orbit_images(perm, scal, odd, strides, level, monos, twist=None, backend: str | None = None):
    """Images of basis monomials under every group element.

    For each monomial row ``b`` and group element ``s`` returns the index of the
    image monomial and the residue ``r`` such that the image carries the scalar
    ``zeta_level ** r`` (root-of-unity scalars, Koszul sign and ``twist[s]``
    included).
    """
    perm = np.ascontiguousarray(perm, dtype=np.int64)
    scal = np.ascontiguousarray(scal, dtype=np.int64)
    odd = np.ascontiguousarray(odd, dtype=np.int64)
    strides = np.ascontiguousarray(strides, dtype=np.int64)
    monos = np.ascontiguousarray(monos, dtype=np.int64).reshape(-1, perm.shape[1])
    if twist is None:
        twist = np.zeros(perm.shape[0], dtype=np.int64)
    twist = np.ascontiguousarray(twist, dtype=np.int64)
    fn = _BACKENDS[backend or _active]
    return fn(perm, scal, odd, strides, int(level), monos, twist)
