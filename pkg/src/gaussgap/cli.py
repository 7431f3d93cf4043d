"""Command line interface: model files, reports, sweeps and oracle checks.

Model files are JSON with complex entries always written as [re, im] pairs:

    {"version": 1, "d": 1, "m": 2,
     "omega": [[[0.0, 0.0]]], "kappa": [[[0.0, 0.0]]],
     "U": [[[0.0, 0.0]], [[1.0, 0.0]]], "V": [[[1.732, 0.0]], [[0.0, 0.0]]],
     "zeta": [[0.0, 0.0]]}

or a preset for the single-mode family:

    {"version": 1, "one_dim": {"mu2": 3.0, "lambda2": 1.0,
                               "omega": 2.0, "kappa": 1.0}}

Reports are deterministic given the input (and seed, where sampling is
involved): keys are sorted and floats serialized with repr.  CSV output is
RFC 4180 with '.' decimals and 17 significant digits so doubles round-trip.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import classical, dynamics, fock, gap
from .errors import (
    GaussGapError,
    NoFaithfulState,
    ParseError,
    ShapeError,
)
from .model import (
    GklsModel,
    build_drift_diffusion,
    kraus_rank_full,
    one_dim_family,
    validate,
)
from .stationary import is_stable, solve_stationary

__all__ = ["parse_model", "run_report", "main"]

REPORT_SCHEMA = "gaussgap.report/1"


# ---------------------------------------------------------------------------
# model file handling
# ---------------------------------------------------------------------------


def _reject_constants(name):
    raise ParseError(f"non-finite constant {name!r} is not allowed in model files")


def _as_complex_array(node, shape, name):
    try:
        data = np.asarray(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"{name}: entries must be [re, im] pairs") from exc
    if data.shape != shape + (2,):
        raise ShapeError(
            f"{name}: expected shape {shape + (2,)} of [re, im] pairs, "
            f"got {data.shape}"
        )
    if not np.all(np.isfinite(data)):
        raise ShapeError(f"{name}: non-finite entries rejected")
    return data[..., 0] + 1j * data[..., 1]


def parse_model(source) -> GklsModel:
    """Parse a model document (path, file-like or JSON text)."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, (str, os.PathLike)) and os.path.exists(str(source)):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(source)
    if not text.strip():
        raise ParseError("empty model document")
    try:
        doc = json.loads(text, parse_constant=_reject_constants)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    version = doc.get("version")
    if version != 1:
        raise ParseError(f"unsupported model file version {version!r}")
    if "one_dim" in doc:
        preset = doc["one_dim"]
        try:
            return one_dim_family(
                float(preset["mu2"]),
                float(preset["lambda2"]),
                float(preset.get("omega", 0.0)),
                float(preset.get("kappa", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad one_dim preset: {exc}") from exc
    for key in ("d", "m", "omega", "kappa", "U", "V", "zeta"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}")
    d, m = int(doc["d"]), int(doc["m"])
    return GklsModel(
        d=d,
        m=m,
        omega=_as_complex_array(doc["omega"], (d, d), "omega"),
        kappa=_as_complex_array(doc["kappa"], (d, d), "kappa"),
        u_mat=_as_complex_array(doc["U"], (m, d), "U"),
        v_mat=_as_complex_array(doc["V"], (m, d), "V"),
        zeta=_as_complex_array(doc["zeta"], (d,), "zeta"),
    )


# ---------------------------------------------------------------------------
# JSON serialization helpers
# ---------------------------------------------------------------------------


def _c(x):
    x = complex(x)
    return [x.real, x.imag]


def _cvec(v):
    return [_c(x) for x in np.asarray(v).ravel()]


def _cmat(m):
    return [[_c(x) for x in row] for row in np.asarray(m)]


def _rmat(m):
    return [[float(x) for x in row] for row in np.asarray(m)]


def _unavailable(reason):
    return {"available": False, "reason": reason}


def run_report(model: GklsModel, closed_form=None) -> dict:
    """Full analysis of one model as a JSON-serializable dict.

    closed_form, when given, is the (mu2, lambda2, omega, kappa) tuple of the
    single-mode preset; the report then carries the closed-form comparison.
    """
    report = {"schema": REPORT_SCHEMA}
    report["model"] = {
        "d": model.d,
        "m": model.m,
        "omega": _cmat(model.omega),
        "kappa": _cmat(model.kappa),
        "U": _cmat(model.u_mat),
        "V": _cmat(model.v_mat),
        "zeta": _cvec(model.zeta),
    }
    vrep = validate(model, strict=False)
    report["validation"] = {
        "ok": vrep.ok,
        "hermiticity_residual": vrep.hermiticity_residual,
        "symmetry_residual": vrep.symmetry_residual,
        "kraus_rank": vrep.kraus_rank,
        "errors": [type(e).code for e in vrep.errors],
    }
    if not vrep.ok:
        return report

    dd = build_drift_diffusion(model)
    info = is_stable(dd)
    report["stability"] = {
        "stable": info.stable,
        "abscissa": float(info.abscissa),
        "eigenvalues": _cvec(info.eigenvalues),
    }
    cz_spec = np.linalg.eigvalsh(dd.cz)
    report["cz"] = {
        "spectrum": [float(x) for x in cz_spec],
        "min_eig": float(dd.cz_min_eig),
        "full_rank": kraus_rank_full(dd),
    }
    grep = gap.analyze(dd, model.zeta)
    report["has_gns_gap"] = grep.has_gns_gap
    report["diagnostics"] = [
        {
            "kind": f.kind,
            "message": f.message,
            "case": f.case,
            "eigenvalue": None if f.eigenvalue is None else _c(f.eigenvalue),
            "eigenvector": None if f.eigenvector is None else _cvec(f.eigenvector),
            "kernel_vector": None
            if f.kernel_vector is None
            else _cvec(f.kernel_vector),
            "residual": f.residual,
        }
        for f in grep.diagnostics
    ]
    st = grep.stationary
    if st is None:
        report["stationary"] = _unavailable("Unstable")
        report["gns"] = _unavailable("Unstable")
        report["kms"] = _unavailable("Unstable")
    else:
        report["stationary"] = {
            "available": True,
            "mu": _cvec(st.mu),
            "s2d": _rmat(st.s2d),
            "det_s_tilde": st.det_s_tilde,
            "sigma": [float(x) for x in st.sigma],
            "faithful": st.faithful,
            "unique": bool(info.stable and kraus_rank_full(dd)),
        }
        if grep.g is None:
            report["gns"] = _unavailable("NotFaithful")
            report["kms"] = _unavailable("NotFaithful")
        else:
            report["gns"] = {
                "available": True,
                "omega0": grep.omega0,
                "g": grep.g,
                "witness": _cvec(grep.gns_witness),
                "has_gap": grep.has_gns_gap,
            }
            report["kms"] = {
                "available": True,
                "omega0": grep.omega0_breve,
                "g": grep.g_breve,
                "witness": [float(x) for x in np.asarray(grep.kms_witness).real],
                "kbreve_min_eig": grep.kbreve_min_eig,
                "kernel_condition_ok": grep.kms_kernel_condition_ok,
            }
    try:
        ou = classical.restrict_to_ou(model)
        block = {
            "available": True,
            "Q": _rmat(ou.q_mat),
            "A": _rmat(ou.a_mat),
        }
        if model.d == 1 and float(ou.a_mat[0, 0]) < 0:
            block["gap_1d"] = classical.ou_gap_1d(ou)
        report["classical"] = block
    except GaussGapError as exc:
        report["classical"] = _unavailable(type(exc).code)

    if closed_form is not None:
        mu2, lambda2, omega_h, kappa_h = closed_form
        try:
            cf = gap.one_dim_closed_forms(mu2, lambda2, omega_h, kappa_h)
            report["closed_form"] = {
                "available": True,
                "gamma": cf.gamma,
                "g": cf.g,
                "g_breve": cf.g_breve,
                "sigma": cf.sigma,
            }
        except NoFaithfulState:
            report["closed_form"] = _unavailable("NoFaithfulState")
    return report


def _report_exit_code(report: dict) -> int:
    if not report.get("validation", {}).get("ok", False):
        return 1
    return 0 if report.get("has_gns_gap") else 2


def _dump_json(obj, stream):
    json.dump(obj, stream, sort_keys=True, indent=2)
    stream.write("\n")


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _closed_form_params(source) -> tuple | None:
    """Extract preset parameters when the model file used the preset form."""
    try:
        if hasattr(source, "read"):
            return None
        if isinstance(source, (str, os.PathLike)) and os.path.exists(str(source)):
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        else:
            doc = json.loads(str(source))
        preset = doc.get("one_dim")
        if preset is None:
            return None
        return (
            float(preset["mu2"]),
            float(preset["lambda2"]),
            float(preset.get("omega", 0.0)),
            float(preset.get("kappa", 0.0)),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, OSError):
        return None


def _cmd_analyze(args) -> int:
    model = parse_model(args.model)
    report = run_report(model, closed_form=_closed_form_params(args.model))
    if args.json:
        _dump_json(report, sys.stdout)
    else:
        _print_human(report)
    return _report_exit_code(report)


def _print_human(report: dict):
    out = sys.stdout
    val = report.get("validation", {})
    if not val.get("ok", False):
        out.write(f"model invalid: {', '.join(val.get('errors', []))}\n")
        return
    stab = report["stability"]
    out.write(
        f"stability: {'stable' if stab['stable'] else 'UNSTABLE'} "
        f"(abscissa {stab['abscissa']:.6g})\n"
    )
    out.write(
        f"noise form: min eig {report['cz']['min_eig']:.6g} "
        f"({'full rank' if report['cz']['full_rank'] else 'singular'})\n"
    )
    st = report["stationary"]
    if st.get("available"):
        out.write(
            f"invariant state: sigma = {st['sigma']}, "
            f"faithful = {st['faithful']}, det(S+iJ) = {st['det_s_tilde']:.6g}\n"
        )
    gns = report["gns"]
    if gns.get("available"):
        out.write(f"gap (one-sided embedding):  g = {gns['g']:.12g}\n")
    else:
        out.write(f"gap (one-sided embedding):  unavailable ({gns['reason']})\n")
    kms = report["kms"]
    if kms.get("available"):
        out.write(f"gap (split embedding):      g = {kms['g']:.12g}\n")
    else:
        out.write(f"gap (split embedding):      unavailable ({kms['reason']})\n")
    cf = report.get("closed_form")
    if cf and cf.get("available"):
        out.write(
            f"closed forms: g = {cf['g']:.12g}, g_breve = {cf['g_breve']:.12g}, "
            f"sigma = {cf['sigma']:.12g}\n"
        )
    cl = report.get("classical")
    if cl and cl.get("available") and "gap_1d" in cl:
        out.write(f"classical restriction gap:  {cl['gap_1d']:.12g}\n")
    for diag in report.get("diagnostics", []):
        out.write(f"diagnostic [{diag['kind']}]: {diag['message']}\n")


def _cmd_gap(args) -> int:
    model = parse_model(args.model)
    report = run_report(model, closed_form=_closed_form_params(args.model))
    wanted = {"gns": ["gns"], "kms": ["kms"], "both": ["gns", "kms"]}[args.mode]
    out = {key: report[key] for key in wanted}
    out["has_gns_gap"] = report["has_gns_gap"]
    out["schema"] = REPORT_SCHEMA
    _dump_json(out, sys.stdout)
    return _report_exit_code(report)


def _cmd_evolve(args) -> int:
    model = parse_model(args.model)
    dd = build_drift_diffusion(model)
    times = [float(t) for t in args.t.split(",") if t.strip() != ""]
    if any(t < 0 for t in times):
        raise GaussGapError("evolution times must be non-negative")
    st = None
    if args.s0 == "vacuum":
        sp = dynamics.GaussianStateParams.vacuum(model.d)
    elif args.s0 == "stationary":
        st = solve_stationary(dd, model.zeta)
        sp = dynamics.GaussianStateParams(mean=st.mu, cov2d=st.s2d)
    else:
        with open(args.s0, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        sp = dynamics.GaussianStateParams(
            mean=np.asarray([re + 1j * im for re, im in doc["mean"]]),
            cov2d=np.asarray(doc["cov2d"], dtype=float),
        )
    if st is None:
        try:
            st = solve_stationary(dd, model.zeta)
        except GaussGapError:
            st = None
    rows = []
    for t in times:
        evolved = dynamics.state_evolve(dd, sp, t, model.zeta)
        row = {
            "t": t,
            "mean": _cvec(evolved.mean),
            "cov2d": _rmat(evolved.cov2d),
        }
        if st is not None:
            row["dist_to_stationary"] = float(
                np.linalg.norm(evolved.cov2d - st.s2d)
            )
        rows.append(row)
    _dump_json({"schema": REPORT_SCHEMA, "states": rows}, sys.stdout)
    return 0


def _cmd_decay(args) -> int:
    model = parse_model(args.model)
    dd = build_drift_diffusion(model)
    st = solve_stationary(dd, model.zeta)
    grep = gap.analyze(dd, model.zeta)
    if grep.g is None:
        sys.stderr.write("decay curves need a faithful invariant state\n")
        return 1
    times = [float(t) for t in args.t_grid.split(",")]
    rng = np.random.default_rng(args.seed)
    writer = csv.writer(sys.stdout, lineterminator="\r\n")
    writer.writerow(
        [
            "sample",
            "t",
            "gns_norm_sq",
            "gns_bound",
            "kms_norm_sq",
            "kms_bound",
        ]
    )
    for s in range(args.samples):
        n_terms = int(rng.integers(1, 4))
        combo = dynamics.WeylCombo(
            coefficients=rng.standard_normal(n_terms)
            + 1j * rng.standard_normal(n_terms),
            vectors=0.5
            * (
                rng.standard_normal((n_terms, model.d))
                + 1j * rng.standard_normal((n_terms, model.d))
            ),
        )
        gns0 = dynamics.norm_decay(st, dd, combo, 0.0, "gns")
        kms0 = dynamics.norm_decay(st, dd, combo, 0.0, "kms")
        for t in times:
            writer.writerow(
                [
                    s,
                    _fmt(t),
                    _fmt(dynamics.norm_decay(st, dd, combo, t, "gns")),
                    _fmt(np.exp(-2.0 * grep.g * t) * gns0),
                    _fmt(dynamics.norm_decay(st, dd, combo, t, "kms")),
                    _fmt(np.exp(-2.0 * grep.g_breve * t) * kms0),
                ]
            )
    return 0


def _sweep_point(params):
    mu2, lambda2, omega_h, kappa_h = params
    model = one_dim_family(mu2, lambda2, omega_h, kappa_h)
    dd = build_drift_diffusion(model)
    st = solve_stationary(dd, model.zeta)
    cf = gap.one_dim_closed_forms(mu2, lambda2, omega_h, kappa_h)
    gns = gap.gns_gap(dd, st)
    kms = gap.kms_gap(dd, st)
    return (
        mu2,
        lambda2,
        omega_h,
        kappa_h,
        gns.g,
        cf.g,
        kms.g,
        cf.g_breve,
        float(st.sigma[0]),
    )


def _parse_grid(grid_arg: str) -> dict:
    grid = {}
    for part in grid_arg.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise GaussGapError(f"bad grid component {part!r}; use name=v1,v2,...")
        name, values = part.split("=", 1)
        grid[name.strip()] = [float(v) for v in values.split(",")]
    return grid


DEFAULT_GRID = {
    "mu2": [1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
    "lambda2": [0.0, 0.25, 0.5, 0.75, 1.0],
    "omega": [0.0, 1.0, 2.0],
    "kappa": [0.0, 0.5, 1.0],
}


def _cmd_sweep(args) -> int:
    if args.preset != "one-dim":
        raise GaussGapError(f"unknown sweep preset {args.preset!r}")
    grid = dict(DEFAULT_GRID)
    if args.grid:
        grid.update(_parse_grid(args.grid))
    points = []
    for mu2 in grid["mu2"]:
        for lambda2 in grid["lambda2"]:
            for omega_h in grid["omega"]:
                for kappa_h in grid["kappa"]:
                    if not 0 <= lambda2 < mu2:
                        continue
                    gamma = 0.5 * (mu2 - lambda2)
                    if gamma**2 + omega_h**2 - kappa_h**2 <= 1e-12:
                        continue  # inadmissible: no faithful invariant state
                    if lambda2 == 0.0 and kappa_h == 0.0:
                        continue  # pure vacuum boundary
                    points.append((mu2, lambda2, omega_h, kappa_h))
    workers = int(os.environ.get("GAUSSGAP_THREADS", "0") or 0)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    writer = csv.writer(sys.stdout, lineterminator="\r\n")
    writer.writerow(
        [
            "mu2",
            "lambda2",
            "omega",
            "kappa",
            "g",
            "g_closed",
            "g_breve",
            "g_breve_closed",
            "sigma",
        ]
    )
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return 0


def _cmd_oracle(args) -> int:
    model = parse_model(args.model)
    dd = build_drift_diffusion(model)
    st = solve_stationary(dd, model.zeta)
    cutoff = args.cutoff if args.cutoff else (30 if args.check == "gap" else 40)
    space = fock.build_space(model.d, cutoff)
    out = {"schema": REPORT_SCHEMA, "cutoff": cutoff, "check": args.check}
    if args.check == "char":
        superop = fock.build_superoperator(model, space)
        rho = fock.steady_state(superop)
        sp = dynamics.GaussianStateParams(mean=st.mu, cov2d=st.s2d)
        grid = [complex(x, y) for x in (-1.0, 0.0, 1.0) for y in (-1.0, 0.0, 1.0)]
        errs = []
        for z in grid:
            zz = np.full(model.d, z)
            closed = dynamics.char_fn(sp, zz)
            oracle = fock.oracle_char_fn(space, rho, zz)
            errs.append(abs(closed - oracle))
        out["max_abs_error"] = float(max(errs))
        out["pass"] = bool(max(errs) < 1e-6)
    elif args.check == "kms-trace":
        superop = fock.build_superoperator(model, space)
        rho = fock.steady_state(superop)
        errs = []
        for z, w in [(1.0, 1.0), (0.5, -0.5), (0.8j, 0.3)]:
            zz = np.full(model.d, z)
            ww = np.full(model.d, w)
            closed = dynamics.kms_weyl_trace(st, zz, ww)
            oracle = fock.oracle_kms_trace(space, rho, zz, ww).real
            errs.append(abs(closed - oracle) / max(abs(closed), 1e-300))
        out["max_rel_error"] = float(max(errs))
        out["pass"] = bool(max(errs) < 1e-6)
    else:  # gap
        grep = gap.analyze(dd, model.zeta)
        out["gns"] = {
            "oracle": fock.oracle_gap(model, space, "gns"),
            "closed_form": grep.g,
        }
        out["kms"] = {
            "oracle": fock.oracle_gap(model, space, "kms"),
            "closed_form": grep.g_breve,
        }
        rel = max(
            abs(out["gns"]["oracle"] - out["gns"]["closed_form"])
            / max(out["gns"]["closed_form"], 1e-300),
            abs(out["kms"]["oracle"] - out["kms"]["closed_form"])
            / max(out["kms"]["closed_form"], 1e-300),
        )
        out["max_rel_error"] = float(rel)
        out["pass"] = bool(rel < 0.05)
    _dump_json(out, sys.stdout)
    return 0 if out.get("pass", True) else 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gaussgap",
        description=(
            "Spectral gaps, invariant states and closed-form dynamics of "
            "Gaussian quantum Markov semigroups"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for a model file")
    p.add_argument("model")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("gap", help="spectral gap(s) of a model file")
    p.add_argument("model")
    p.add_argument("--mode", choices=["gns", "kms", "both"], default="both")
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("evolve", help="evolve Gaussian state parameters")
    p.add_argument("model")
    p.add_argument("--t", required=True, help="comma-separated times")
    p.add_argument(
        "--s0",
        default="vacuum",
        help="initial state: vacuum, stationary, or a JSON file path",
    )
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("decay", help="decay curves for random Weyl combinations")
    p.add_argument("model")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-grid", default="0.05,0.2,0.5,1,3", dest="t_grid")
    p.set_defaults(func=_cmd_decay)

    p = sub.add_parser("sweep", help="CSV sweep over the single-mode family")
    p.add_argument("--preset", default="one-dim")
    p.add_argument(
        "--grid",
        default="",
        help="grid spec 'mu2=1.5,2;lambda2=0,1;omega=0;kappa=0,0.5'",
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle", help="truncated Fock-space cross checks")
    p.add_argument("model")
    p.add_argument(
        "--cutoff",
        type=int,
        default=0,
        help="occupation cutoff (default 40 for trace checks, 30 for gap)",
    )
    p.add_argument("--check", choices=["char", "kms-trace", "gap"], default="char")
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GaussGapError as exc:
        sys.stderr.write(f"error [{type(exc).code}]: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
