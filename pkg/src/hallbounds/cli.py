"""Command-line interface: JSON job in, JSON report (or SVG) out.

    hallbounds <command> [--tol R] [--quad-order N] [--out PATH] [JOBFILE|-]

Exit codes: 0 ok, 1 a bound is violated, 2 input error, 3 pole or degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .bounds_elem import (
    BoundsVerdict,
    b_interval,
    circle_params,
    elementary_verdicts,
    superfluous_cstar_bound,
)
from .bounds_hs import DiskGeometry, HSReport, hs_bounds
from .exceptions import (
    DegenerateLaminationError,
    DegeneratePhasesError,
    HallBoundsError,
    YTransformPoleError,
)
from .gamma_verify import (
    L0Params,
    gamma_avg_adaptive,
    gamma_avg_closed,
    gamma_avg_closed_inverse,
    gamma_avg_numeric,
    gamma_relation_residual,
    graded_breakpoints,
    hs_matrix_verdicts,
)
from .laminate import (
    CounterexampleVariant,
    LaminateSpec,
    counterexample_sweep,
    rank_one_fields,
    rank_two_effective,
)
from .plot import circle_diagram_svg
from .tensor_core import (
    DEFAULT_TOL,
    PhaseDistribution,
    TIConductivity,
    build_block_L,
    matrix_to_ti,
    psd_margin,
    ti_to_matrix,
)

SCHEMA_VERSION = "1"
COMMANDS = ("bounds", "hs", "laminate", "counterexample", "gamma-check", "plot")

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_POLE = 0, 1, 2, 3


class InputError(HallBoundsError):
    pass


# -- serialization -----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"refusing to serialize non-finite value {x!r}")
    return format(x + 0.0, ".17g")  # + 0.0 turns -0.0 into 0.0


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON: insertion key order, floats to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def _encode(o, indent, level) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(o, np.ndarray):
        o = o.tolist()
    if o is None:
        return "null"
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return _fmt_float(float(o))
    if isinstance(o, str):
        return json.dumps(o, ensure_ascii=False)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in o.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in o):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in o) + "]"
        items = [inner + _encode(v, indent, level + 1) for v in o]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _finite_or_none(x):
    return float(x) if math.isfinite(float(x)) else None


def _verdict_dict(v: BoundsVerdict) -> dict:
    d = v.as_dict()
    d["inputs"] = {k: (_finite_or_none(x) if isinstance(x, (float, np.floating)) else x)
                   for k, x in d["inputs"].items()}
    return d


# -- payload parsing ---------------------------------------------------------

def _reject_constant(name):
    raise InputError(f"non-finite number {name} in input")


def load_job(text: str, command: str) -> dict:
    try:
        job = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(job, dict):
        raise InputError("job must be a JSON object")
    if "payload" in job:
        if job.get("command", command) != command:
            raise InputError(f"job is for command {job['command']!r}, not {command!r}")
        job = job["payload"]
        if not isinstance(job, dict):
            raise InputError("payload must be a JSON object")
    return job


def _number(obj: dict, key: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise InputError(f"missing field {key!r}")
        return float(default)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"field {key!r} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise InputError(f"field {key!r} must be finite")
    return float(value)


def _object(obj: dict, key: str) -> dict:
    value = obj.get(key)
    if not isinstance(value, dict):
        raise InputError(f"field {key!r} must be an object")
    return value


def _list(obj: dict, key: str) -> list:
    value = obj.get(key)
    if not isinstance(value, list) or not value:
        raise InputError(f"field {key!r} must be a non-empty list")
    return value


def _ti(obj) -> TIConductivity:
    if not isinstance(obj, dict):
        raise InputError(f"phase must be an object with a, b, c; got {obj!r}")
    return TIConductivity(_number(obj, "a"), _number(obj, "b"), _number(obj, "c", 0.0))


def _vector(value, name) -> np.ndarray:
    if not (isinstance(value, list) and len(value) == 3
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise InputError(f"{name} must be a list of three numbers")
    return np.array(value, dtype=float)


def _conductivity(obj) -> np.ndarray:
    if isinstance(obj, dict) and "sigma" in obj:
        m = obj["sigma"]
        if not (isinstance(m, list) and len(m) == 3):
            raise InputError("sigma must be a 3x3 list of rows")
        return np.array([_vector(row, "sigma row") for row in m])
    return ti_to_matrix(_ti(obj))


def _two_phase_payload(job):
    phases = _list(job, "phases")
    if len(phases) != 2:
        raise InputError(f"expected exactly two phases, got {len(phases)}")
    p1, p2 = _ti(phases[0]), _ti(phases[1])
    if "f1" in job:
        f1 = _number(job, "f1")
    elif isinstance(phases[0], dict) and "f" in phases[0]:
        f1 = _number(phases[0], "f")
    else:
        raise InputError("missing volume fraction: give 'f1' or 'f' on the first phase")
    if not 0.0 < f1 < 1.0:
        raise InputError(f"f1 must lie in (0, 1), got {f1}")
    return p1, p2, f1


def _ti_dict(p: TIConductivity) -> dict:
    return {"a": p.a, "b": p.b, "c": p.c}


# -- commands ----------------------------------------------------------------

def _bounds(job, tol, quad_order=None):
    rows = []
    for p in _list(job, "phases"):
        if not isinstance(p, dict):
            raise InputError("each phase must be an object with f, a, b, c")
        rows.append((_number(p, "f"), _number(p, "a"), _number(p, "b"), _number(p, "c", 0.0)))
    d = PhaseDistribution.from_rows(rows)
    circle = circle_params(d)
    lower, upper = b_interval(d)
    value, cap = superfluous_cstar_bound(d)
    results = {
        "b_interval": {"lower": lower, "upper": upper},
        "circle": {"a_L": circle.a_L, "c_L": circle.c_L, "d_L": circle.d_L,
                   "center": list(circle.center), "radius": circle.radius},
        "superfluous": {"bound": value, "cap": cap},
    }
    verdicts = []
    if "candidate" in job:
        cand = _object(job, "candidate")
        verdicts = elementary_verdicts(d, _number(cand, "a"), _number(cand, "b"), _number(cand, "c", 0.0), tol)
    return results, verdicts, {}, []


def _hs_report(job, tol) -> HSReport:
    p1, p2, f1 = _two_phase_payload(job)
    return hs_bounds(p1, p2, f1, _ti(_object(job, "candidate")), tol)


def _shape_dict(shape):
    if isinstance(shape, DiskGeometry):
        return {"kind": "circle", "center": list(shape.center), "radius": shape.radius,
                "tangent_point": list(shape.tangent_point)}
    return {"kind": "vertical_line", "a": shape.a}


def _hs(job, tol, quad_order=None):
    report = _hs_report(job, tol)
    h = report.coefficients
    notices = []
    if report.swapped:
        notices.append("phases swapped to satisfy b1 >= b2")
    hs_disks, phase_disks = report.geometry
    p1, p2 = report.phases
    results = {
        "ordered_phases": [_ti_dict(p1), _ti_dict(p2)],
        "f1": report.f1,
        "swapped": report.swapped,
        "alpha": {"plus": h.alpha_plus, "minus": h.alpha_minus},
        "t1": {"plus": h.t1_plus, "minus": h.t1_minus},
        "s1": {"plus": h.s1_plus, "minus": h.s1_minus},
        "degenerate": h.degenerate_flag,
        "y": {"a_Y": report.y.a_Y, "c_Y": report.y.c_Y, "b_Y": report.y.b_Y},
        "geometry": {
            "hs": [_shape_dict(s) for s in hs_disks],
            "phase": [_shape_dict(s) for s in phase_disks],
        },
        "matrix_form": [_verdict_dict(v) for v in hs_matrix_verdicts(report.y, h, p1, p2, tol)],
    }
    if h.degenerate_flag:
        notices.append("a1 == a2: the minus circle degenerates to the line a = a1")
    return results, report.verdicts, {}, notices


def _block_average(fractions, phases):
    return sum(w * build_block_L(s) for w, s in zip(fractions, phases))


def _laminate(job, tol, quad_order=None):
    phases = [_conductivity(p) for p in _list(job, "phases")]
    diagnostics = {}
    if len(phases) == 2:
        f = _number(job, "fraction")
        normal = _vector(job.get("normal"), "normal")
        EA, EB, eta = rank_one_fields(phases[0], phases[1], f, normal)
        fractions = (f, 1.0 - f)
        sigma = f * EA.T @ phases[0] @ EA + (1 - f) * EB.T @ phases[1] @ EB
        fields = {"E": [EA, EB], "eta": [eta]}
    elif len(phases) == 3:
        outer, inner = _object(job, "outer"), _object(job, "inner")
        spec = LaminateSpec(
            outer_direction=_vector(outer.get("normal"), "outer.normal"),
            outer_fraction=_number(outer, "fraction"),
            inner_direction=_vector(inner.get("normal"), "inner.normal"),
            inner_fraction=_number(inner, "fraction"),
            phases=tuple(phases),
        )
        sigma, lf = rank_two_effective(spec)
        fractions = spec.fractions
        fields = {"E": [lf.E1, lf.E2, lf.E3], "eta": [lf.eta1, lf.eta2]}
        diagnostics["condition"] = lf.condition
    else:
        raise InputError(f"a laminate needs two or three phases, got {len(phases)}")
    margin = psd_margin(build_block_L(sigma), _block_average(fractions, phases), tol)
    verdicts = [BoundsVerdict.from_residual("block_average", -margin, tol, min_eigenvalue=margin)]
    try:
        star = matrix_to_ti(sigma, 1e-10)
        d = PhaseDistribution((w, matrix_to_ti(s)) for w, s in zip(fractions, phases))
        verdicts += elementary_verdicts(d, star.a, star.b, star.c, tol)
    except HallBoundsError:
        star = None
    results = {
        "fractions": list(fractions),
        "sigma_star": sigma,
        "transversely_isotropic": star is not None,
        "fields": fields,
    }
    return results, verdicts, diagnostics, []


def _counterexample(job, tol, quad_order=None):
    kappa = _number(job, "kappa")
    variant = job.get("variant", "PlusJ")
    try:
        variant = CounterexampleVariant(variant)
    except ValueError:
        names = ", ".join(v.value for v in CounterexampleVariant)
        raise InputError(f"unknown variant {variant!r}; expected one of {names}") from None
    thetas = job.get("theta_grid", [1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
    if not (isinstance(thetas, list) and all(isinstance(t, (int, float)) and not isinstance(t, bool)
                                             for t in thetas)):
        raise InputError("theta_grid must be a list of numbers")
    sweep = counterexample_sweep(kappa, variant, thetas)
    rows = [
        {"theta": t, "c_star": c, "delta12_E2": d2, "delta12_E3": d3,
         "partial_isotropy_residual": r, "condition": k}
        for t, c, d2, d3, r, k in zip(sweep.thetas, sweep.c_star, sweep.delta12_E2,
                                      sweep.delta12_E3, sweep.partial_iso_residuals, sweep.conditions)
    ]
    results = {
        "variant": variant.value,
        "sweep": rows,
        "limit_c_star": sweep.limit_c,
        "convergence_order": _finite_or_none(sweep.order),
        "predicted_limit": sweep.predicted_limit,
        "limit_error": sweep.limit_c - sweep.predicted_limit,
        "opposite_minor_signs": bool(np.all(sweep.delta12_E2 * sweep.delta12_E3 < 0)),
    }
    diagnostics = {"max_condition": float(np.max(sweep.conditions))}
    return results, [], diagnostics, []


_XI_PROBES = np.array([
    [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0],
    [1.0, 1.0, 1.0], [1.0, -2.0, 3.0], [0.3, 0.1, -0.9],
])


def _entries_from_average(G, l0: L0Params) -> dict:
    tau = l0.t2 / l0.t1
    p1, p2 = G[3, 3], G[5, 5]
    r1, r2 = G[0, 0] - tau**2 * p1, G[2, 2]
    return {
        "p1": p1, "p2": p2,
        "q1": l0.t1 - l0.t1**2 * r1, "q2": l0.t4 - l0.t4**2 * r2,
        "r1": r1, "r2": r2,
    }


def _trace_residual(e, l0: L0Params) -> float:
    # C1^-1 averaged against xi (x) xi / (C1^-1 xi . xi) has trace one
    return abs(2 * e["q1"] / l0.t1 + e["q2"] / l0.t4 - 1.0)


def _gamma_check(job, tol, quad_order=None):
    src = job.get("l0", job)
    if not isinstance(src, dict):
        raise InputError("l0 must be an object with t1..t5")
    l0 = L0Params(*(_number(src, k) for k in ("t1", "t2", "t3", "t4", "t5")))
    if not (l0.t1 > 0 and l0.t4 > 0 and l0.t5 > 0):
        raise InputError("need t1, t4, t5 > 0")
    results = {"d1": l0.d1, "d2": l0.d2, "limit_inverse": gamma_avg_closed_inverse(l0)}
    verdicts, diagnostics, notices = [], {}, []
    if l0.d1 <= 0:
        notices.append("d1 = 0: the average diverges, only the limit of its inverse is reported")
        return results, verdicts, diagnostics, notices
    closed = gamma_avg_closed(l0)
    if quad_order is None:
        numeric, order = gamma_avg_adaptive(l0)
    else:
        numeric = gamma_avg_numeric(l0, quad_order, breakpoints=graded_breakpoints(l0))
        order = quad_order
    diagnostics["quadrature_order"] = order
    closed_entries = {k: getattr(closed, k) for k in ("p1", "p2", "q1", "q2", "r1", "r2")}
    numeric_entries = _entries_from_average(numeric, l0)
    results["entries"] = [
        {"name": k, "closed": closed_entries[k], "numeric": numeric_entries[k],
         "difference": numeric_entries[k] - closed_entries[k]}
        for k in closed_entries
    ]
    C = closed.matrix()
    avg_residual = float(np.abs(numeric - C).max() / max(1.0, np.abs(C).max()))
    relation = max(gamma_relation_residual(l0, xi / np.linalg.norm(xi), np.eye(6)) for xi in _XI_PROBES)
    trace_closed = _trace_residual(closed_entries, l0)
    trace_numeric = _trace_residual(numeric_entries, l0)
    results["inverse_minus_limit"] = float(
        np.abs(np.linalg.inv(C) - results["limit_inverse"]).max()
    )
    verdicts = [
        BoundsVerdict.from_residual("gamma_relations", relation, tol, directions=len(_XI_PROBES)),
        BoundsVerdict.from_residual("average_numeric_vs_closed", avg_residual, tol, order=order),
        BoundsVerdict.from_residual("trace_identity", max(trace_closed, trace_numeric), tol,
                                    closed=trace_closed, numeric=trace_numeric),
    ]
    return results, verdicts, diagnostics, notices


HANDLERS = {
    "bounds": _bounds,
    "hs": _hs,
    "laminate": _laminate,
    "counterexample": _counterexample,
    "gamma-check": _gamma_check,
}


def build_report(command, job, tol, quad_order=None) -> tuple[dict, int]:
    results, verdicts, diagnostics, notices = HANDLERS[command](job, tol, quad_order)
    ok = all(v.satisfied for v in verdicts)
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "input": job,
        "options": {"tol": tol, "quad_order": quad_order},
        "status": "ok" if ok else "violated",
        "results": results,
        "verdicts": [_verdict_dict(v) for v in verdicts],
        "diagnostics": diagnostics,
        "notices": notices,
    }
    return report, EXIT_OK if ok else EXIT_VIOLATED


def run_bounds(job: dict, tol: float = DEFAULT_TOL) -> dict:
    return build_report("bounds", job, tol)[0]


def run_hs(job: dict, tol: float = DEFAULT_TOL) -> dict:
    return build_report("hs", job, tol)[0]


def run_laminate(job: dict, tol: float = DEFAULT_TOL) -> dict:
    return build_report("laminate", job, tol)[0]


def run_counterexample(job: dict, tol: float = DEFAULT_TOL) -> dict:
    return build_report("counterexample", job, tol)[0]


def run_gamma_check(job: dict, tol: float = DEFAULT_TOL, quad_order: int | None = None) -> dict:
    return build_report("gamma-check", job, tol, quad_order)[0]


def run_plot(job: dict, tol: float = DEFAULT_TOL) -> str:
    """SVG 1.1 circle diagram for an ``hs`` job."""
    return circle_diagram_svg(_hs_report(job, tol), title="Hashin-Shtrikman bound circles")


# -- entry point -------------------------------------------------------------

def _write(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hallbounds-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hallbounds", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("jobfile", nargs="?", default="-", help="JSON job file, '-' for standard input")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute tolerance for every check")
    p.add_argument("--quad-order", type=int, default=None,
                   help="fixed Gauss-Legendre order per panel for sphere averages (default: adaptive)")
    p.add_argument("--out", default=None, help="output path (default: standard output)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = _parser().parse_intermixed_args(argv)
    try:
        if not (math.isfinite(args.tol) and args.tol >= 0):
            raise InputError(f"--tol must be a finite non-negative number, got {args.tol}")
        if args.quad_order is not None and args.quad_order < 2:
            raise InputError("--quad-order must be at least 2")
        if args.jobfile == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(args.jobfile, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(f"cannot read job file: {exc}") from None
        job = load_job(text, args.command)
        if args.command == "plot":
            _write(run_plot(job, args.tol), args.out)
            return EXIT_OK
        report, code = build_report(args.command, job, args.tol, args.quad_order)
        _write(dumps(report), args.out)
        return code
    except (YTransformPoleError, DegeneratePhasesError, DegenerateLaminationError) as exc:
        msg = str(exc)
        if isinstance(exc, YTransformPoleError) and "arithmetic-mean pole" not in msg:
            msg += " (arithmetic-mean pole)"
        print(f"hallbounds: error: {msg}", file=sys.stderr)
        return EXIT_POLE
    except HallBoundsError as exc:
        print(f"hallbounds: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
