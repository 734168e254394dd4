"""Seeded random polyhedra and the solver-vs-enumeration comparison.

``oracle-sweep --seeds N`` runs the comparison over seeds ``0..N-1``
with dimension and constraint count derived from the seed.
"""
import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .geometry import HalfSpace, as_vector
from .polyproject import (OutcomeKind, Polyhedron, brute_force_project, certificate_is_valid,
                          project)

ORACLE_MAX_CONSTRAINTS = 12
SWEEP_DIMS = (2, 3, 5)
SWEEP_MAX_CONSTRAINTS = 10


@dataclass(frozen=True)
class RandomInstance:
    seed: int
    dimension: int
    n_constraints: int
    offset_range: tuple = (-2.0, 2.0)
    anchor_range: tuple = (-3.0, 3.0)

    @classmethod
    def for_seed(cls, seed):
        """The sweep's instance for ``seed``: d cycles over (2, 3, 5), k over 0..10."""
        return cls(seed, SWEEP_DIMS[seed % len(SWEEP_DIMS)], seed % (SWEEP_MAX_CONSTRAINTS + 1))


def random_polyhedron_instance(inst):
    """Return ``(polyhedron, x0)`` drawn deterministically from ``inst.seed``."""
    if inst.n_constraints > ORACLE_MAX_CONSTRAINTS:
        raise ValueError(f"at most {ORACLE_MAX_CONSTRAINTS} constraints for oracle instances")
    rng = np.random.default_rng(inst.seed)
    d = inst.dimension
    poly = Polyhedron(d)
    for _ in range(inst.n_constraints):
        a = rng.standard_normal(d)
        while np.linalg.norm(a) < 1e-6:
            a = rng.standard_normal(d)
        poly.add(HalfSpace(as_vector(a / np.linalg.norm(a)), float(rng.uniform(*inst.offset_range))))
    x0 = as_vector(rng.uniform(*inst.anchor_range, size=d), name="x0")
    return poly, x0


@dataclass
class OracleReport:
    seed: int
    kind: OutcomeKind
    oracle_kind: OutcomeKind
    distance: float = 0.0
    certificate_ok: bool = True
    tol: float = 1e-7

    @property
    def agree(self):
        if self.kind is not self.oracle_kind:
            return False
        if self.kind is OutcomeKind.POINT:
            return self.distance <= self.tol
        return self.certificate_ok


def oracle_compare(inst, tol=1e-7):
    poly, x0 = random_polyhedron_instance(inst)
    fast = project(poly, x0)
    slow = brute_force_project(poly, x0)
    report = OracleReport(inst.seed, fast.kind, slow.kind, tol=tol)
    if fast.feasible and slow.feasible:
        report.distance = float(np.linalg.norm(fast.point - slow.point))
    elif not fast.feasible:
        report.certificate_ok = certificate_is_valid(poly, fast.certificate)
    return report


def sweep(n_seeds):
    return [oracle_compare(RandomInstance.for_seed(seed)) for seed in range(n_seeds)]


def main(argv=None):
    parser = argparse.ArgumentParser(prog="oracle-sweep",
                                     description="Compare the active-set projection against enumeration.")
    parser.add_argument("--seeds", type=int, default=1000, help="number of seeds (default 1000)")
    args = parser.parse_args(argv)
    reports = sweep(args.seeds)
    bad = [r for r in reports if not r.agree]
    n_inf = sum(r.kind is OutcomeKind.INFEASIBLE for r in reports)
    print(f"{len(reports) - len(bad)}/{len(reports)} agree ({n_inf} infeasible instances)")
    for r in bad:
        print(f"seed {r.seed}: solver {r.kind.value}, oracle {r.oracle_kind.value}, "
              f"distance {r.distance:.3e}, certificate ok {r.certificate_ok}")
    return 0 if not bad else 1


if __name__ == "__main__":
    sys.exit(main())
