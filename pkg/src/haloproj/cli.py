"""Command line front end.

Problem files are TOML: flat top-level keys plus one ``[operator]`` table::

    name = "c05"
    dimension = 1
    x0 = [1.0]
    # optional: max_iter, tol_residual, divergence_radius, eps_feas,
    #           eps_dual, emit_baseline

    [operator]
    kind = "contraction"      # or translation, sign_paper_instance, subgradient_ell2
    alpha = 0.5

``haloproj run SPEC --out DIR [--baseline]`` writes ``<name>.trace.csv``
and ``<name>.summary.txt`` (plus ``<name>.baseline.trace.csv`` with
``--baseline``) and exits with 0 (Converged, FixedPointHit), 2 (Infeasible),
3 (Diverging), 4 (MaxIterReached) or 1 (error).

``haloproj verify TRACE SPEC`` re-checks the trace inequalities on an
emitted CSV and exits 0 when there are no violations.
"""
import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .driver import RunConfig, RunResult, Status, Trace, halpern_baseline, run, verify_trace
from .geometry import EPS_FEAS
from .operators import (ContractionOperator, SignOperator, SubgradientProjector, TranslationOperator,
                        ell2_example)
from .polyproject import EPS_DUAL, QPBreakdownError

MAX_CSV_COORDS = 16

EXIT_CODES = {
    Status.CONVERGED: 0,
    Status.FIXED_POINT_HIT: 0,
    Status.INFEASIBLE: 2,
    Status.DIVERGING: 3,
    Status.MAX_ITER_REACHED: 4,
}
EXIT_ERROR = 1

OPERATOR_KINDS = ("contraction", "translation", "sign_paper_instance", "subgradient_ell2", "subgradient_custom")

DEFAULTS = {
    "max_iter": 10000,
    "tol_residual": 1e-8,
    "divergence_radius": 1e6,
    "eps_feas": EPS_FEAS,
    "eps_dual": EPS_DUAL,
    "emit_baseline": False,
}


class SpecError(ValueError):
    """Invalid problem document; ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class ProblemSpec:
    name: str
    dimension: int
    operator: dict
    x0: tuple
    max_iter: int = DEFAULTS["max_iter"]
    tol_residual: float = DEFAULTS["tol_residual"]
    divergence_radius: float = DEFAULTS["divergence_radius"]
    eps_feas: float = DEFAULTS["eps_feas"]
    eps_dual: float = DEFAULTS["eps_dual"]
    emit_baseline: bool = False

    def build_operator(self):
        op = self.operator
        kind = op["kind"]
        if kind == "contraction":
            return ContractionOperator(op["alpha"], self.dimension)
        if kind == "translation":
            return TranslationOperator(op["alpha"], op["direction"])
        if kind == "sign_paper_instance":
            return SignOperator()
        if kind == "subgradient_ell2":
            return SubgradientProjector(ell2_example(self.dimension))
        raise SpecError("operator.kind", f"operator {kind!r} is not supported")

    def run_config(self):
        return RunConfig(np.array(self.x0), self.build_operator(), self.max_iter, self.tol_residual,
                         self.divergence_radius, self.eps_feas, self.eps_dual)


def _number(doc, key, integer=False, positive=True):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(key, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SpecError(key, "must be finite")
    if integer and (not isinstance(value, int)):
        raise SpecError(key, f"expected an integer, got {value!r}")
    if positive and value <= 0:
        raise SpecError(key, f"must be positive, got {value!r}")
    return value


def _vector(values, key, dim):
    if not isinstance(values, list) or not values:
        raise SpecError(key, "expected a non-empty list of numbers")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SpecError(key, f"entries must be finite numbers, got {v!r}")
        out.append(float(v))
    if len(out) != dim:
        raise SpecError(key, f"has length {len(out)}, expected dimension {dim}")
    return tuple(out)


def parse_spec(document):
    """Parse and validate a TOML problem document into a :class:`ProblemSpec`."""
    try:
        doc = tomllib.loads(document)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError("document", str(exc)) from None

    for key in ("name", "dimension", "x0", "operator"):
        if key not in doc:
            raise SpecError(key, "missing required key")
    name = doc["name"]
    if not isinstance(name, str) or not name or any(c in name for c in "/\\") or name.startswith("."):
        raise SpecError("name", f"must be a plain non-empty file stem, got {name!r}")
    dim = _number(doc, "dimension", integer=True)
    x0 = _vector(doc["x0"], "x0", dim)

    settings = {}
    for key in ("max_iter", "tol_residual", "divergence_radius", "eps_feas", "eps_dual"):
        if key in doc:
            settings[key] = _number(doc, key, integer=key == "max_iter")
    if "emit_baseline" in doc:
        if not isinstance(doc["emit_baseline"], bool):
            raise SpecError("emit_baseline", "expected true or false")
        settings["emit_baseline"] = doc["emit_baseline"]
    unknown = set(doc) - {"name", "dimension", "x0", "operator", *DEFAULTS}
    if unknown:
        raise SpecError(sorted(unknown)[0], "unknown key")

    block = doc["operator"]
    if not isinstance(block, dict):
        raise SpecError("operator", "expected an [operator] table")
    kind = block.get("kind")
    if kind not in OPERATOR_KINDS:
        raise SpecError("operator.kind", f"unknown operator {kind!r}; expected one of {', '.join(OPERATOR_KINDS)}")
    op = {"kind": kind}
    if kind == "contraction":
        if "alpha" not in block:
            raise SpecError("alpha", "missing required key")
        alpha = _number(block, "alpha", positive=False)
        if not 0.0 <= alpha < 1.0:
            raise SpecError("alpha", f"must lie in [0, 1) for a contraction, got {alpha!r}")
        op["alpha"] = float(alpha)
    elif kind == "translation":
        if "alpha" not in block:
            raise SpecError("alpha", "missing required key")
        op["alpha"] = float(_number(block, "alpha"))
        direction = _vector(block.get("direction", [1.0] + [0.0] * (dim - 1)), "direction", dim)
        if abs(math.sqrt(sum(v * v for v in direction)) - 1.0) > 1e-12:
            raise SpecError("direction", "must have unit norm")
        op["direction"] = direction
    elif kind == "sign_paper_instance":
        if dim != 1:
            raise SpecError("dimension", "sign_paper_instance is one-dimensional")
    elif kind == "subgradient_ell2":
        if max(abs(v) for v in x0) > 10.0:
            raise SpecError("x0", "subgradient_ell2 needs x0 inside [-10, 10]^d")
    elif kind == "subgradient_custom":
        raise SpecError("operator.kind", "subgradient_custom is reserved and not available")
    extra = {k: v for k, v in block.items() if k not in ("kind", "alpha", "direction")}
    if extra:
        raise SpecError(f"operator.{sorted(extra)[0]}", "unknown key")

    return ProblemSpec(name=name, dimension=dim, operator=op, x0=x0, **settings)


def load_spec(path):
    return parse_spec(Path(path).read_text(encoding="utf-8"))


def fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_trace_csv(path, trace):
    store = trace.store_vectors and trace.dim <= MAX_CSV_COORDS
    header = ["n", "residual", "dist_to_x0", "num_constraints", "qp_working_set_changes"]
    if store:
        header += [f"x{i}" for i in range(trace.dim)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(len(trace)):
            row = [fmt(i), fmt(trace.residual[i]), fmt(trace.dist[i]),
                   fmt(trace.num_constraints[i]), fmt(trace.qp_changes[i])]
            if store:
                row += [fmt(v) for v in trace.xs[i]]
            writer.writerow(row)


def read_trace_csv(path):
    """Return ``(xs, dist, residual, num_constraints, qp_changes)`` from an emitted CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    coords = [i for i, h in enumerate(header) if h.startswith("x")]
    if not coords:
        raise ValueError(f"{path} has no coordinate columns")
    data = np.array([[float(v) for v in row] for row in body]).reshape(len(body), len(header))
    return (data[:, coords], data[:, 2], data[:, 1], data[:, 3].astype(int), data[:, 4].astype(int))


def summary_lines(result, label="run"):
    trace = result.trace
    last = len(trace) - 1
    lines = [
        f"{label}.status: {result.status.value}",
        f"{label}.exit_code: {EXIT_CODES[result.status]}",
        f"{label}.iterations: {last}",
        f"{label}.final_residual: {fmt(trace.residual[last])}",
        f"{label}.beta: {fmt(trace.dist[last])}",
        f"{label}.num_constraints: {fmt(trace.num_constraints[last])}",
    ]
    if result.status is Status.INFEASIBLE:
        lines.append(f"{label}.infeasible_at: {result.stop_index}")
        cert = " ".join(f"{i}:{fmt(w)}" for i, w in result.infeasibility_certificate)
        lines.append(f"{label}.certificate: {cert}")
    else:
        lines.append(f"{label}.final_point: {' '.join(fmt(v) for v in result.final_point)}")
        lines.append(f"{label}.final_norm: {fmt(np.linalg.norm(result.final_point))}")
    return lines


def execute(spec, out_dir, baseline=None):
    """Run ``spec``, write its trace and summary into ``out_dir``; return the exit code."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfg = spec.run_config()
        result = run(cfg)
        write_trace_csv(out / f"{spec.name}.trace.csv", result.trace)
        lines = [f"name: {spec.name}", f"operator: {cfg.operator.describe()}",
                 f"dimension: {spec.dimension}"]
        lines += summary_lines(result)
        if spec.emit_baseline if baseline is None else baseline:
            base = halpern_baseline(cfg)
            write_trace_csv(out / f"{spec.name}.baseline.trace.csv", base.trace)
            lines += summary_lines(base, label="baseline")
        (out / f"{spec.name}.summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    except (OSError, ValueError, ArithmeticError, QPBreakdownError) as exc:
        print(f"haloproj: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_CODES[result.status]


def verify_csv(trace_path, spec):
    """Re-check the trace inequalities on an emitted CSV; return the violations."""
    cfg = spec.run_config()
    xs, dist, residual, ncons, changes = read_trace_csv(trace_path)
    ys = np.array([cfg.operator.evaluate(x) for x in xs])
    trace = Trace.from_arrays(xs, ys, dist, residual, ncons, changes)
    result = RunResult(Status.MAX_ITER_REACHED, xs[-1], trace)
    return verify_trace(result, cfg)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="haloproj", description="Nearest fixed points by halfspace outer approximation.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a problem file")
    p_run.add_argument("spec", help="TOML problem file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--baseline", action="store_true", default=None, help="also run the Halpern baseline")
    p_ver = sub.add_parser("verify", help="check trace inequalities on an emitted CSV")
    p_ver.add_argument("trace", help="<name>.trace.csv")
    p_ver.add_argument("spec", help="TOML problem file used to produce the trace")
    args = parser.parse_args(argv)

    try:
        spec = load_spec(args.spec)
    except (OSError, SpecError) as exc:
        print(f"haloproj: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.command == "run":
        return execute(spec, args.out, baseline=args.baseline)

    try:
        violations = verify_csv(args.trace, spec)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"haloproj: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s)")
    return 0 if not violations else 1


if __name__ == "__main__":
    sys.exit(main())
