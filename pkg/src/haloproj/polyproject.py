"""Projection of a fixed anchor onto a growing intersection of halfspaces.

The solver is a dual active-set method specialized to the least-distance
objective ``min 0.5 ||z - x0||^2  s.t.  A z <= b``. It starts from the
unconstrained minimizer ``z = x0`` (which is dual feasible with all
multipliers zero) and repeatedly brings the most violated constraint into
the working set, dropping working constraints whose multiplier would turn
negative. Because appending a constraint keeps the previous multipliers
dual feasible, a solve after :meth:`Polyhedron.add` resumes from the last
working set instead of starting over.
"""
import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .geometry import EPS_FEAS, HalfSpace, as_vector

EPS_DUAL = 1e-10
RANK_RTOL = 1e-12
BRUTE_FORCE_MAX_CONSTRAINTS = 20


class QPBreakdownError(RuntimeError):
    """The active-set solver exceeded its working-set change budget."""


class OutcomeKind(enum.Enum):
    POINT = "point"
    INFEASIBLE = "infeasible"


@dataclass
class ProjectionOutcome:
    kind: OutcomeKind
    point: np.ndarray = None
    certificate: list = field(default_factory=list)
    working_set_changes: int = 0

    @property
    def feasible(self):
        return self.kind is OutcomeKind.POINT


@dataclass
class _WarmState:
    x0: np.ndarray
    point: np.ndarray
    active: list


class Polyhedron:
    """An append-only list of unit-normal halfspaces in R^dim.

    Whole-space halfspaces are accepted by :meth:`add` but never stored.
    The instance also owns the warm-start state of its projection solver,
    so it should not be shared between threads.
    """

    def __init__(self, dim):
        if int(dim) < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = int(dim)
        self._A = np.empty((8, self.dim))
        self._b = np.empty(8)
        self._m = 0
        self.warm_state = None

    @classmethod
    def from_inequalities(cls, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        poly = cls(A.shape[1])
        for a_i, b_i in zip(A, np.asarray(b, dtype=float).ravel()):
            poly.add(HalfSpace.from_inequality(a_i, b_i))
        return poly

    def __len__(self):
        return self._m

    @property
    def A(self):
        return self._A[: self._m]

    @property
    def b(self):
        return self._b[: self._m]

    @property
    def constraints(self):
        return [HalfSpace(as_vector(a), float(c)) for a, c in zip(self.A, self.b)]

    def add(self, h):
        """Intersect with ``h`` in place and return ``self``."""
        if h.dim != self.dim:
            raise ValueError(f"dimension mismatch: halfspace in R^{h.dim}, polyhedron in R^{self.dim}")
        if h.whole_space:
            return self
        if self._m == self._A.shape[0]:
            self._A = np.concatenate([self._A, np.empty_like(self._A)])
            self._b = np.concatenate([self._b, np.empty_like(self._b)])
        self._A[self._m] = h.normal
        self._b[self._m] = h.offset
        self._m += 1
        return self

    def copy(self):
        other = Polyhedron(self.dim)
        other._A = self._A.copy()
        other._b = self._b.copy()
        other._m = self._m
        return other

    def contains(self, z, eps=EPS_FEAS):
        if self._m == 0:
            return True
        return bool(np.max(self.A @ z - self.b) <= eps)

    def project(self, x0, warm=True, eps_feas=EPS_FEAS, eps_dual=EPS_DUAL, max_changes=None):
        return project(self, x0, warm=warm, eps_feas=eps_feas, eps_dual=eps_dual, max_changes=max_changes)


def add_constraint(poly, h):
    return poly.add(h)


def project(poly, x0, warm=True, eps_feas=EPS_FEAS, eps_dual=EPS_DUAL, max_changes=None):
    """Nearest point of ``poly`` to ``x0``, or a Farkas certificate of emptiness.

    Parameters
    ----------
    poly : Polyhedron
    x0 : array_like
        Anchor point.
    warm : bool
        Resume from ``poly.warm_state`` when it was produced for the same
        anchor. The warm state is refreshed on every return either way.
    max_changes : int, optional
        Working-set change budget; defaults to ``50 * (m + dim)``.

    Returns
    -------
    ProjectionOutcome
        ``POINT`` with the projection, or ``INFEASIBLE`` with a list of
        ``(index, multiplier)`` pairs whose combination of normals is zero
        and of offsets is negative.

    Raises
    ------
    QPBreakdownError
        If the budget of working-set changes is exhausted.
    """
    x0 = as_vector(x0, poly.dim, "x0")
    A, b = poly.A, poly.b
    m = len(poly)
    if max_changes is None:
        max_changes = 50 * (m + poly.dim)

    active, lam, z = [], np.zeros(m), x0.copy()
    state = poly.warm_state
    if warm and state is not None and np.array_equal(state.x0, x0) and all(j < m for j in state.active):
        # multipliers are re-derived from the stored point; stale ones drift when normals nearly cancel
        if state.active:
            lam_w = np.linalg.lstsq(A[state.active].T, x0 - state.point, rcond=RANK_RTOL)[0]
        else:
            lam_w = np.zeros(0)
        if np.all(lam_w >= -eps_dual):
            active = list(state.active)
            lam[active] = np.maximum(lam_w, 0.0)
            z = state.point.copy()
    changes = 0

    while m:
        viol = A @ z - b
        p = int(np.argmax(viol))  # first index wins ties
        if viol[p] <= eps_feas:
            break
        a_p = A[p]
        # bring p into the working set, possibly after some drops
        while True:
            if changes >= max_changes:
                raise QPBreakdownError(
                    f"active-set solver exceeded {max_changes} working-set changes "
                    f"({m} constraints in R^{poly.dim})"
                )
            r, s = _split(A[active].T, a_p)

            t_part, k = np.inf, None
            for pos, rj in enumerate(r):
                if rj > eps_dual:
                    ratio = lam[active[pos]] / rj
                    if ratio < t_part:
                        t_part, k = ratio, pos

            s2 = float(s @ s)
            if s2 <= RANK_RTOL**2:
                if k is None:
                    poly.warm_state = None
                    return ProjectionOutcome(OutcomeKind.INFEASIBLE,
                                             certificate=_certificate(m, p, active, r),
                                             working_set_changes=changes)
                t_full = np.inf
            else:
                t_full = float(a_p @ z - b[p]) / s2

            t = min(t_full, t_part)
            z = z - t * s
            lam[active] -= t * r
            lam[p] += t
            changes += 1
            if not (np.isfinite(t) and np.all(np.isfinite(z))):
                raise QPBreakdownError("active-set step produced non-finite values")
            if t_full <= t_part:
                active.append(p)
                break
            lam[active[k]] = 0.0
            del active[k]
            np.maximum(lam, 0.0, out=lam)

    poly.warm_state = _WarmState(x0, z.copy(), active)
    return ProjectionOutcome(OutcomeKind.POINT, point=as_vector(z, name="point"),
                             working_set_changes=changes)


def _split(N, a):
    """Write ``a = N r + s`` with ``s`` orthogonal to the columns of ``N``."""
    k = N.shape[1]
    if k == 0:
        return np.zeros(0), a.copy()
    Q, R = np.linalg.qr(N, mode="complete")
    c = Q.T @ a
    diag = np.abs(np.diag(R))
    keep = diag > RANK_RTOL * max(diag.max(), 1.0)
    if keep.all():
        r = scipy.linalg.solve_triangular(R[:k], c[:k])
    else:
        r = np.linalg.lstsq(N, a, rcond=RANK_RTOL)[0]
    s = Q[:, k:] @ c[k:]
    return r, s


def _certificate(m, p, active, r):
    mu = np.zeros(m)
    mu[p] = 1.0
    for pos, j in enumerate(active):
        mu[j] = max(-r[pos], 0.0)
    mu /= mu.sum()
    return [(int(i), float(mu[i])) for i in np.flatnonzero(mu)]


def brute_force_project(poly, x0, tol=1e-9):
    """Projection by enumerating candidate active sets.

    Every subset ``S`` of at most ``dim`` constraints is tried: ``x0`` is
    projected onto the affine set ``{A_S z = b_S}`` by least squares and
    kept if the equalities are consistent and the point satisfies all
    constraints. The projection always arises this way (its multipliers
    can be carried by a linearly independent active subset), so the best
    kept candidate is the answer and no kept candidate means the
    polyhedron is empty. In that case a Farkas certificate is found by
    enumerating subsets of at most ``dim + 1`` constraints whose normals
    have a one-dimensional, single-signed null combination.
    """
    x0 = as_vector(x0, poly.dim, "x0")
    m, d = len(poly), poly.dim
    if m > BRUTE_FORCE_MAX_CONSTRAINTS:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_CONSTRAINTS} constraints, got {m}")
    if m == 0:
        return ProjectionOutcome(OutcomeKind.POINT, point=x0)
    A, b = poly.A, poly.b

    best, best_dist = None, np.inf
    for size in range(min(m, d) + 1):
        for S in itertools.combinations(range(m), size):
            if S:
                A_S = A[list(S)]
                b_S = b[list(S)]
                step = np.linalg.lstsq(A_S, A_S @ x0 - b_S, rcond=None)[0]
                z = x0 - step
                if np.max(np.abs(A_S @ z - b_S)) > tol:
                    continue
            else:
                z = x0
            if np.max(A @ z - b) > tol:
                continue
            dist = np.linalg.norm(z - x0)
            if dist < best_dist:
                best, best_dist = z, dist
    if best is not None:
        return ProjectionOutcome(OutcomeKind.POINT, point=as_vector(best, name="point"))

    for size in range(2, min(m, d + 1) + 1):
        for S in itertools.combinations(range(m), size):
            A_S = A[list(S)]
            _, sv, vt = np.linalg.svd(A_S.T)
            rank = int(np.sum(sv > RANK_RTOL * sv[0]))
            if size - rank != 1:
                continue
            mu = vt[-1]
            if mu.sum() < 0:
                mu = -mu
            if np.min(mu) <= 0.0:
                continue
            mu = mu / mu.sum()
            if mu @ b[list(S)] < 0.0:
                return ProjectionOutcome(OutcomeKind.INFEASIBLE,
                                         certificate=[(int(i), float(w)) for i, w in zip(S, mu)])
    # empty but no certificate found within tolerance; report emptiness anyway
    return ProjectionOutcome(OutcomeKind.INFEASIBLE)


def certificate_residuals(poly, certificate):
    """Return ``(min multiplier, ||sum mu_i a_i||, sum mu_i b_i)`` for a certificate."""
    if not certificate:
        return 0.0, np.inf, np.inf
    idx = [i for i, _ in certificate]
    mu = np.array([w for _, w in certificate])
    return float(mu.min()), float(np.linalg.norm(mu @ poly.A[idx])), float(mu @ poly.b[idx])


def certificate_is_valid(poly, certificate, normal_tol=1e-8, offset_tol=1e-10):
    """Check a Farkas certificate of emptiness for ``poly``."""
    mu_min, normal, offset = certificate_residuals(poly, certificate)
    return mu_min >= 0.0 and normal <= normal_tol and offset <= -offset_tol
