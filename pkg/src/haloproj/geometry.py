"""Points, inner products and halfspaces of the ambient space R^d.

Points are plain 1-D float arrays; :func:`as_vector` is the single gate
that validates them. Halfspaces are immutable and always carry a unit
normal, so membership slack means the same thing for every constraint.
"""
from dataclasses import dataclass

import math

import numpy as np

EPS_FEAS = 1e-9


def as_vector(x, dim=None, name="x"):
    """Return ``x`` as a read-only finite 1-D float64 array.

    Raises ValueError on wrong shape, wrong dimension or non-finite entries.
    """
    v = np.array(x, dtype=float, copy=True)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D coordinate array, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise ValueError(f"{name} has dimension {v.size}, expected {dim}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} has non-finite coordinates")
    v.flags.writeable = False
    return v


def _check_dims(u, v):
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")


def inner(u, v):
    """Euclidean inner product of two vectors of equal dimension."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_dims(u, v)
    return float(np.dot(u, v))


def norm(u):
    u = np.asarray(u, dtype=float)
    return math.sqrt(float(np.dot(u, u)))


@dataclass(frozen=True)
class HalfSpace:
    """The set ``{z : <normal, z> <= offset}``, or the whole space.

    ``normal`` is unit length unless ``whole_space`` is set, in which case
    it is the zero vector and ``offset`` is ignored.
    """

    normal: np.ndarray
    offset: float
    whole_space: bool = False

    @property
    def dim(self):
        return self.normal.shape[0]

    @classmethod
    def everything(cls, dim):
        return cls(as_vector(np.zeros(dim), name="normal"), 0.0, True)

    @classmethod
    def from_inequality(cls, a, b):
        """Build ``{z : <a, z> <= b}`` with ``a`` rescaled to unit length."""
        a = as_vector(a, name="a")
        scale = np.linalg.norm(a)
        if scale == 0.0:
            raise ValueError("halfspace normal must be nonzero")
        return cls(as_vector(a / scale, name="normal"), float(b) / scale)

    def slack(self, z):
        """Signed violation ``<normal, z> - offset`` (nonpositive inside)."""
        if self.whole_space:
            return -np.inf
        return inner(self.normal, z) - self.offset

    def contains(self, z, eps=EPS_FEAS):
        return self.whole_space or self.slack(z) <= eps

    def project(self, z):
        """Closed-form nearest point of the halfspace to ``z``."""
        z = as_vector(z, self.dim, "z")
        s = self.slack(z)
        if s <= 0.0:
            return z
        return as_vector(z - s * self.normal, name="z")


def halfspace_from_pair(x, y):
    """Return ``{z : ||y - z|| <= ||x - z||}`` as a unit-normal halfspace.

    The raw inequality ``2<z, x - y> <= ||x||^2 - ||y||^2`` is divided by
    ``||2(x - y)||``. The offset is evaluated as ``<u, (x + y)/2>`` with
    ``u`` the unit normal, which equals the raw ratio but avoids the
    cancellation in ``||x||^2 - ||y||^2`` when ``y`` is close to ``x``.
    If ``||x - y|| <= 1e-12 * max(1, ||x||)`` the whole space is returned.
    """
    x = as_vector(x, name="x")
    y = as_vector(y, name="y")
    _check_dims(x, y)
    diff = x - y
    gap = np.linalg.norm(diff)
    if gap <= 1e-12 * max(1.0, np.linalg.norm(x)):
        return HalfSpace.everything(x.shape[0])
    u = diff / gap
    return HalfSpace(as_vector(u, name="normal"), float(np.dot(u, 0.5 * (x + y))))
