"""Outer-approximation iteration for the nearest fixed point.

Starting from ``C_0 = R^d`` and an anchor ``x0``, each step evaluates
``y_n = T x_n``, intersects the current polyhedron with the halfspace of
points at least as close to ``y_n`` as to ``x_n``, and re-projects ``x0``.
For a quasi-nonexpansive, fixed-point-closed ``T`` the run ends in one of
three ways: convergence to the projection of ``x0`` onto ``Fix T``,
unbounded iterates, or an empty polyhedron. With finite budgets these
become the statuses of :class:`Status`.
"""
import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import EPS_FEAS, as_vector, halfspace_from_pair, norm
from .polyproject import EPS_DUAL, Polyhedron, certificate_is_valid, project

logger = logging.getLogger(__name__)

FULL_TRACE_BUDGET = 10**7


class Status(enum.Enum):
    CONVERGED = "Converged"
    FIXED_POINT_HIT = "FixedPointHit"
    DIVERGING = "Diverging"
    INFEASIBLE = "Infeasible"
    MAX_ITER_REACHED = "MaxIterReached"


@dataclass
class RunConfig:
    x0: np.ndarray
    operator: object
    max_iter: int = 10000
    tol_residual: float = 1e-8
    divergence_radius: float = 1e6
    eps_feas: float = EPS_FEAS
    eps_dual: float = EPS_DUAL

    def __post_init__(self):
        self.x0 = as_vector(self.x0, getattr(self.operator, "dim", None), "x0")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be >= 1")
        self.max_iter = int(self.max_iter)
        for name in ("tol_residual", "divergence_radius", "eps_feas", "eps_dual"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")
            setattr(self, name, value)

    @property
    def dim(self):
        return self.x0.shape[0]


@dataclass(frozen=True)
class TraceEntry:
    n: int
    x_n: np.ndarray
    y_n: np.ndarray
    dist_to_x0: float
    residual: float
    num_constraints: int
    qp_working_set_changes: int


class Trace:
    """Columnar per-iteration record.

    Iterates and operator values are kept for every step when
    ``store_vectors`` is true; otherwise only for the latest step, and
    entries for earlier steps carry ``None`` in their place.
    """

    def __init__(self, dim, store_vectors=True):
        self.dim = dim
        self.store_vectors = store_vectors
        self._len = 0
        self._cap = 0
        self._grow(64)

    def _grow(self, cap):
        rows = cap if self.store_vectors else 1

        def widen(old, shape, dtype=float):
            new = np.zeros(shape, dtype=dtype)
            if old is not None:
                new[: len(old)] = old
            return new

        self.xs = widen(getattr(self, "xs", None) if self.store_vectors else None, (rows, self.dim))
        self.ys = widen(getattr(self, "ys", None) if self.store_vectors else None, (rows, self.dim))
        self.dist = widen(getattr(self, "dist", None), cap)
        self.residual = widen(getattr(self, "residual", None), cap)
        self.num_constraints = widen(getattr(self, "num_constraints", None), cap, int)
        self.qp_changes = widen(getattr(self, "qp_changes", None), cap, int)
        self._cap = cap

    def append(self, x, y, dist, residual, num_constraints, qp_changes):
        if self._len == self._cap:
            self._grow(2 * self._cap)
        i = self._len
        row = i if self.store_vectors else 0
        self.xs[row] = x
        self.ys[row] = y
        self.dist[i] = dist
        self.residual[i] = residual
        self.num_constraints[i] = num_constraints
        self.qp_changes[i] = qp_changes
        self._len += 1

    def __len__(self):
        return self._len

    def __getitem__(self, i):
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError(i)
        if self.store_vectors:
            x, y = self.xs[i].copy(), self.ys[i].copy()
        elif i == self._len - 1:
            x, y = self.xs[0].copy(), self.ys[0].copy()
        else:
            x = y = None
        return TraceEntry(i, x, y, float(self.dist[i]), float(self.residual[i]),
                          int(self.num_constraints[i]), int(self.qp_changes[i]))

    def __iter__(self):
        return (self[i] for i in range(self._len))

    @property
    def points(self):
        """``(len, dim)`` view of the stored iterates."""
        if not self.store_vectors:
            raise ValueError("trace was recorded without iterates")
        return self.xs[: self._len]

    @property
    def images(self):
        if not self.store_vectors:
            raise ValueError("trace was recorded without iterates")
        return self.ys[: self._len]

    @classmethod
    def from_arrays(cls, xs, ys, dist=None, residual=None, num_constraints=None, qp_changes=None):
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        k = len(xs)
        trace = cls(xs.shape[1])
        if dist is None:
            dist = np.linalg.norm(xs - xs[0], axis=1)
        if residual is None:
            residual = np.linalg.norm(xs - ys, axis=1)
        num_constraints = np.zeros(k, int) if num_constraints is None else num_constraints
        qp_changes = np.zeros(k, int) if qp_changes is None else qp_changes
        for i in range(k):
            trace.append(xs[i], ys[i], dist[i], residual[i], num_constraints[i], qp_changes[i])
        return trace


@dataclass
class RunResult:
    """Outcome of :func:`run` or :func:`halpern_baseline`.

    ``stop_index`` is the index of the last iterate for point-valued
    statuses and the index ``n + 1`` of the empty set for ``INFEASIBLE``.
    """

    status: Status
    final_point: np.ndarray
    trace: Trace
    infeasibility_certificate: list = None
    polyhedron: Polyhedron = field(default=None, repr=False)
    stop_index: int = 0

    @property
    def beta(self):
        """Final distance to the anchor (the supremum along the run)."""
        return float(self.trace.dist[len(self.trace) - 1])


def _store_vectors(cfg):
    return cfg.dim * cfg.max_iter <= FULL_TRACE_BUDGET


def run(cfg):
    """Run the outer-approximation iteration with ``y_n = T x_n``.

    Returns a :class:`RunResult`. QP breakdown and operator errors
    propagate to the caller.
    """
    x0 = cfg.x0
    T = cfg.operator
    poly = Polyhedron(cfg.dim)
    trace = Trace(cfg.dim, _store_vectors(cfg))
    x = x0
    changes = 0
    n = 0
    while True:
        y = as_vector(T.evaluate(x), cfg.dim, "T(x)")
        residual = norm(x - y)
        trace.append(x, y, norm(x0 - x), residual, len(poly), changes)

        if residual <= cfg.tol_residual:
            h = halfspace_from_pair(x, y)
            status = Status.FIXED_POINT_HIT if n == 0 and h.whole_space else Status.CONVERGED
            return RunResult(status, x, trace, polyhedron=poly, stop_index=n)
        if n > 0 and np.linalg.norm(x) > cfg.divergence_radius:
            return RunResult(Status.DIVERGING, x, trace, polyhedron=poly, stop_index=n)
        if n >= cfg.max_iter:
            return RunResult(Status.MAX_ITER_REACHED, x, trace, polyhedron=poly, stop_index=n)

        poly.add(halfspace_from_pair(x, y))
        outcome = project(poly, x0, eps_feas=cfg.eps_feas, eps_dual=cfg.eps_dual)
        changes = outcome.working_set_changes
        if not outcome.feasible:
            logger.debug("polyhedron C_%d is empty", n + 1)
            return RunResult(Status.INFEASIBLE, None, trace, outcome.certificate, poly, n + 1)
        x = outcome.point
        n += 1


def halpern_baseline(cfg):
    """Anchored averaging ``x_{n+1} = x0/(n+2) + (1 - 1/(n+2)) T x_n``.

    Meant for nonexpansive ``T`` with a fixed point. Uses the same stopping
    rules as :func:`run` except that there is no divergence test.
    """
    x0 = cfg.x0
    T = cfg.operator
    trace = Trace(cfg.dim, _store_vectors(cfg))
    x = x0
    n = 0
    while True:
        y = T.evaluate(x)
        residual = norm(x - y)
        trace.append(x, y, norm(x0 - x), residual, 0, 0)
        if residual <= cfg.tol_residual:
            status = Status.FIXED_POINT_HIT if n == 0 else Status.CONVERGED
            return RunResult(status, x, trace, stop_index=n)
        if n >= cfg.max_iter:
            return RunResult(Status.MAX_ITER_REACHED, x, trace, stop_index=n)
        w = 1.0 / (n + 2)
        x = w * x0 + (1.0 - w) * y
        n += 1


def verify_trace(result, cfg):
    """Check the inequalities every exact run satisfies.

    For all recorded ``m < n``:

    * ``dist_to_x0`` is nondecreasing (within ``eps_feas``);
    * ``<x_n - x_m, x0 - x_m> <= eps * (1 + ||x_n - x_m|| ||x0 - x_m||)``;
    * ``||y_m - x_n|| <= ||x_m - x_n|| + eps``;
    * ``x_n`` lies in the halfspace cut at step ``m``;

    and, when the operator exposes a known fixed point, that point lies
    in every cut. Returns a list of human-readable violation strings.
    """
    eps = cfg.eps_feas
    trace = result.trace
    k = len(trace)
    out = []
    if k == 0:
        return out

    dist = trace.dist[:k]
    drops = np.flatnonzero(np.diff(dist) < -eps)
    for i in drops:
        out.append(f"monotonicity: dist_to_x0 drops from {dist[i]!r} at n={i} to {dist[i + 1]!r} at n={i + 1}")
    if not trace.store_vectors:
        return out

    xs, ys = trace.points, trace.images
    x0 = cfg.x0
    # the cut at step m exists only when a later iterate was produced
    cuts = [halfspace_from_pair(xs[m], ys[m]) for m in range(k - 1)]
    fixed = getattr(cfg.operator, "fixed_point", None)
    for m, h in enumerate(cuts):
        later = xs[m + 1:]
        dx = later - xs[m]
        gap = np.linalg.norm(dx, axis=1)
        anchor = x0 - xs[m]
        kolmo = dx @ anchor
        bound = eps * (1.0 + gap * np.linalg.norm(anchor))
        for j in np.flatnonzero(kolmo > bound):
            out.append(f"obtuse angle: <x_{m + 1 + j} - x_{m}, x0 - x_{m}> = {kolmo[j]!r}")
        closer = np.linalg.norm(later - ys[m], axis=1)
        for j in np.flatnonzero(closer > gap + eps):
            out.append(f"cut distance: ||y_{m} - x_{m + 1 + j}|| = {closer[j]!r} > {gap[j]!r}")
        if not h.whole_space:
            slack = later @ h.normal - h.offset
            for j in np.flatnonzero(slack > eps):
                out.append(f"membership: x_{m + 1 + j} violates the cut of step {m} by {slack[j]!r}")
            if fixed is not None and h.slack(fixed) > eps:
                out.append(f"containment: known fixed point violates the cut of step {m} by {h.slack(fixed)!r}")
    return out


def check_status(result, cfg, normal_tol=1e-8, offset_tol=1e-10):
    """Return a list of problems with the status claim of ``result``."""
    out = []
    if result.status in (Status.CONVERGED, Status.FIXED_POINT_HIT):
        if result.trace.residual[len(result.trace) - 1] > cfg.tol_residual:
            out.append("converged status with residual above tolerance")
    elif result.status is Status.INFEASIBLE:
        if not certificate_is_valid(result.polyhedron, result.infeasibility_certificate, normal_tol, offset_tol):
            out.append("infeasibility certificate does not verify")
    elif result.status is Status.DIVERGING:
        if np.linalg.norm(result.final_point) <= cfg.divergence_radius:
            out.append("diverging status with final norm inside the radius")
    return out
