"""Command-line interface: ``epdyn {spectrum,ep,survival,encircle}``.

Exit codes: 0 success, 2 invalid input, 3 numerical quality problem,
4 internal error. ``EPDYN_MAX_EVALS`` caps quadrature work per point.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, encircle, model_one, model_two, survival
from .errors import EpdynError, NumericalError, ValidationError
from .model_one import ModelOneParams
from .model_two import ModelTwoParams

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_INTERNAL = 0, 2, 3, 4
FAIL_FRACTION = 0.10
NEAR_EP_REL = 1e-6

# parameter values as printed with the corresponding figures
PRESETS = {
    "fig3": dict(model="I", g=0.1, eps_d=-1.989974, grid="log", t_min=1.0, t_max=1e5,
                 n_points=60, methods=["contour", "near_threshold", "longtime"]),
    "fig4a": dict(model="I", g=0.5, eps_d=-1.7321, grid="log", t_min=0.1, t_max=1e4,
                  n_points=60, methods=["contour", "near_threshold", "longtime"]),
    "fig4b": dict(model="I", g=0.9, eps_d=-0.87, grid="linear", t_min=0.0, t_max=10.0,
                  n_points=201, methods=["contour", "near_threshold", "zeno"]),
    "fig5a": dict(model="II", g=0.1, V=0.00501260, grid="linear", t_min=0.0, t_max=600.0,
                  n_points=301, methods=["contour", "ep2b_pole", "zeno"]),
    "fig5b": dict(model="II", g=0.1, V=0.00501256, grid="linear", t_min=0.0, t_max=2000.0,
                  n_points=401, methods=["contour", "ep2b_longtime"]),
    "fig5c": dict(model="II", g=0.75, V=0.3385622, grid="linear", t_min=0.0, t_max=10.0,
                  n_points=201, methods=["contour", "ep2b_pole", "zeno"]),
    "fig5d": dict(model="II", g=0.75, V=0.3385620, grid="linear", t_min=0.0, t_max=200.0,
                  n_points=401, methods=["contour", "ep2b_longtime"]),
}


@dataclass
class RunConfig:
    model: str
    g: float
    eps_d: float | None = None
    V: float | None = None
    grid: str = "log"
    t_min: float = 0.1
    t_max: float = 100.0
    n_points: int = 50
    methods: list = field(default_factory=lambda: ["contour"])
    tol: float = survival.CONTOUR_TOL
    n_sites: int | None = None
    preset: str | None = None

    def params(self):
        if self.model == "I":
            if self.eps_d is None:
                raise ValidationError("--eps-d is required for model I")
            return ModelOneParams(self.g, self.eps_d)
        if self.model == "II":
            if self.V is None:
                raise ValidationError("--V is required for model II")
            return ModelTwoParams(self.g, self.V)
        raise ValidationError("model must be I or II")

    def times(self) -> np.ndarray:
        if self.n_points < 2:
            raise ValidationError("n_points must be >= 2")
        if not self.t_max > self.t_min:
            raise ValidationError("t_max must exceed t_min")
        if self.grid == "log":
            if not self.t_min > 0:
                raise ValidationError("t_min must be positive for a log grid")
            return np.geomspace(self.t_min, self.t_max, self.n_points)
        if self.grid == "linear":
            if self.t_min < 0:
                raise ValidationError("t_min must be non-negative")
            return np.linspace(self.t_min, self.t_max, self.n_points)
        raise ValidationError("grid must be log or linear")


def _num(x):
    """JSON-safe float: NaN/inf become null, everything else keeps full precision."""
    x = float(x)
    return x if math.isfinite(x) else None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(meta: dict, header: list, rows: list) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {json.dumps(v) if not isinstance(v, str) else v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


# ------------------------------------------------------------------ commands

def cmd_spectrum(args) -> int:
    cfg = RunConfig(model=args.model, g=args.g, eps_d=args.eps_d, V=args.V)
    p = cfg.params()
    rows, warnings = [], []
    if isinstance(p, ModelOneParams):
        spec = model_one.discrete_spectrum(p)
        labelled = [("+", spec.plus), ("-", spec.minus)]
        if spec.near_ep:
            ep = model_one.ep_location(p.g, "lower" if p.eps_d < 0 else "upper")
            warnings.append(f"near coalescence: eps_bar={ep.eps_bar!r} E_bar={ep.E_bar!r} "
                            f"lambda_bar={ep.lambda_bar!r}")
    else:
        spec = model_two.quartic_spectrum(p)
        labelled = [(str(i), s) for i, s in enumerate(spec)]
        if p.g > 0:
            eps = model_two.ep_locations_m2(p.g)
            for name, vbar in (("EP2B", eps.ep2b.V_bar), ("EP2A", eps.ep2a)):
                if abs(p.V - vbar) <= NEAR_EP_REL * vbar or spec.at_ep:
                    extra = (f" E_bar={eps.ep2b.E_bar!r} lambda_bar={eps.ep2b.lambda_bar!r}"
                             if name == "EP2B" else "")
                    warnings.append(f"near coalescence ({name}): V_bar={vbar!r}{extra}")
                    break
    for label, s in labelled:
        rows.append([label, s.lam.real, s.lam.imag, s.energy.real, s.energy.imag,
                     s.classification.value, s.dispersion_residual])
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    header = ["branch", "re_lambda", "im_lambda", "re_E", "im_E", "class", "residual"]
    meta = {"version": __version__, "command": "spectrum", "params": asdict(p)}
    if warnings:
        meta["warning"] = "; ".join(warnings)
    if args.format == "json":
        text = json.dumps({"meta": meta, "rows": [dict(zip(header, r)) for r in rows]}, indent=1)
    else:
        text = _csv_text(meta, header, rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_ep(args) -> int:
    if args.model == "I":
        out = {w: asdict(model_one.ep_location(args.g, w)) for w in ("lower", "upper")}
        out["delta_ep"] = survival.delta_ep(args.g)
    else:
        eps = model_two.ep_locations_m2(args.g)
        b = eps.ep2b
        out = {"ep2a": {"V_bar": eps.ep2a},
               "ep2b": {"V_bar": b.V_bar, "E_bar": [b.E_bar.real, b.E_bar.imag],
                        "lambda_bar": [b.lambda_bar.real, b.lambda_bar.imag],
                        "gamma_bar": b.gamma_bar}}
    _emit(json.dumps({"meta": {"version": __version__, "command": "ep", "model": args.model,
                               "g": args.g}, "ep": out}, indent=1) + "\n", args.out)
    return EXIT_OK


def _config_from_args(args) -> RunConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            blob = json.load(fh)
        return RunConfig(**blob["meta"]["config"])
    if args.preset:
        base = dict(PRESETS[args.preset])
        cfg = RunConfig(**base, preset=args.preset)
    else:
        if args.model is None or args.g is None:
            raise ValidationError("--model and --g are required without --preset")
        cfg = RunConfig(model=args.model, g=args.g, eps_d=args.eps_d, V=args.V)
    for name in ("grid", "t_min", "t_max", "n_points", "tol", "n_sites"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    if args.methods:
        cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in cfg.methods:
        try:
            survival.Method(m)
        except ValueError:
            raise ValidationError(f"unknown method {m!r}") from None
    return cfg


def run_survival(cfg: RunConfig) -> tuple[dict, list]:
    """Evaluate every requested method; returns ``(meta, series)``."""
    p = cfg.params()
    t = cfg.times()
    series = [survival.survival_series(p, t, m, n_sites=cfg.n_sites, tol=cfg.tol)
              for m in cfg.methods]
    meta = {"version": __version__, "command": "survival", "config": asdict(cfg),
            "params": asdict(p)}
    return meta, series


def cmd_survival(args) -> int:
    cfg = _config_from_args(args)
    meta, series = run_survival(cfg)
    if args.format == "json":
        payload = {"meta": meta, "series": [
            {"method": s.method.value, "t": [_num(x) for x in s.times],
             "re_a": [_num(x) for x in s.amplitude.real], "im_a": [_num(x) for x in s.amplitude.imag],
             "p": [_num(x) for x in s.probability], "err_est": [_num(x) for x in s.err_est]}
            for s in series]}
        text = json.dumps(payload) + "\n"
    else:
        rows = []
        for s in series:
            for i in range(s.times.size):
                rows.append([float(s.times[i]), float(s.amplitude[i].real), float(s.amplitude[i].imag),
                             float(s.probability[i]), s.method.value, float(s.err_est[i])])
        text = _csv_text(meta, ["t", "re_a", "im_a", "p", "method", "err_est"], rows)
    _emit(text, args.out)
    n_fail = sum(int(s.failed.sum()) for s in series)
    n_all = sum(s.times.size for s in series)
    if n_fail:
        print(f"warning: {n_fail} of {n_all} points failed", file=sys.stderr)
    return EXIT_NUMERICAL if n_fail > FAIL_FRACTION * n_all else EXIT_OK


def cmd_encircle(args) -> int:
    g, ratio = args.g, args.chi_ratio
    if ratio < 1.0:
        loop = encircle.LoopSpec.around_ep(g, ratio, args.dir, args.steps)
    else:
        loop = encircle.LoopSpec.around_both(g, ratio, args.dir, args.steps)
    trace = encircle.trace_lambda_loop(g, loop)
    if trace.enclosed == 1:
        cycle = encircle.revolution_cycle(g, args.dir, args.loops)
        plus_to, minus_to = cycle[-1]
        report = encircle.ExchangeReport(args.dir, args.loops, plus_to, minus_to).describe()
        branches = "branches swap" if trace.swapped else "branches return"
    else:
        report = "no swap (both EPs enclosed)" if trace.enclosed == 2 else "no swap (no EP enclosed)"
        branches = "branches return" if not trace.swapped else "branches swap"
    meta = {"version": __version__, "command": "encircle", "g": g, "chi_ratio": ratio,
            "direction": args.dir, "steps": args.steps, "loops": args.loops,
            "center": loop.center, "radius": loop.radius, "theta_shift": trace.theta_shift,
            "branches": branches, "report": report}
    rows = [[float(d), float(x.real), float(x.imag), float(a.real), float(a.imag),
             float(b.real), float(b.imag)]
            for d, x, a, b in zip(trace.delta, trace.xi, trace.branch_a, trace.branch_b)]
    header = ["delta", "re_xi", "im_xi", "re_lam_a", "im_lam_a", "re_lam_b", "im_lam_b"]
    if args.format == "json":
        text = json.dumps({"meta": meta, "trace": [dict(zip(header, r)) for r in rows]}) + "\n"
    else:
        text = _csv_text(meta, header, rows)
    _emit(text, args.out)
    if args.out:
        print(report)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epdyn", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"epdyn {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", help="Write to this file instead of stdout.")

    sp = sub.add_parser("spectrum", help="Discrete eigenvalues and their classification.")
    sp.add_argument("--model", choices=["I", "II"], required=True)
    sp.add_argument("--g", type=float, required=True)
    sp.add_argument("--eps-d", type=float, help="Impurity energy (model I).")
    sp.add_argument("--V", type=float, help="Impurity-impurity coupling (model II).")
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    ep = sub.add_parser("ep", help="Exceptional-point locations.")
    ep.add_argument("--model", choices=["I", "II"], required=True)
    ep.add_argument("--g", type=float, required=True)
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_ep)

    sv = sub.add_parser("survival", help="Survival amplitude and probability on a time grid.")
    sv.add_argument("--preset", choices=sorted(PRESETS))
    sv.add_argument("--config", help="Re-run the configuration stored in a JSON output file.")
    sv.add_argument("--model", choices=["I", "II"])
    sv.add_argument("--g", type=float)
    sv.add_argument("--eps-d", type=float)
    sv.add_argument("--V", type=float)
    sv.add_argument("--grid", choices=["log", "linear"])
    sv.add_argument("--t-min", type=float)
    sv.add_argument("--t-max", type=float)
    sv.add_argument("--n-points", type=int)
    sv.add_argument("--methods", help="Comma-separated: " + ",".join(m.value for m in survival.Method))
    sv.add_argument("--tol", type=float, help="Absolute quadrature tolerance for the contour route.")
    sv.add_argument("--n-sites", type=int, help="Chain length for the finite_chain method.")
    common(sv)
    sv.set_defaults(func=cmd_survival)

    en = sub.add_parser("encircle", help="Parametric loop around the lower EP of model I.")
    en.add_argument("--g", type=float, required=True)
    en.add_argument("--chi-ratio", type=float, default=0.5,
                    help="Loop radius over lambda_bar; > 1 loops around both EPs.")
    en.add_argument("--dir", choices=list(encircle.DIRECTIONS), default="ccw")
    en.add_argument("--steps", type=int, default=256)
    en.add_argument("--loops", type=int, default=1)
    common(en)
    en.set_defaults(func=cmd_encircle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, EpdynError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
