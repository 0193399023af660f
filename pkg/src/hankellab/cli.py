"""Command-line front end: configure grids and symbols, run the check
suites, and emit reports as JSON, CSV, and a summary table.

Exit status: 0 when every requested suite passes, 2 when any is
inconclusive, 1 on failure or runtime error, 64 on unusable configuration.
"""

import argparse
import hashlib
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .dyadic import make_partition
from .grid import Grid, GridFunction, norm
from .heat import HeatKernelEval, TimeGrid, gaussian_bound_check, heat_apply
from .report import FAIL, INCONCLUSIVE, PASS, EstimateReport
from .specfun import MultiIndex
from .symbols import parse_symbol
from .sobolev import hormander_sup
from .transform import TransformPlan, hankel_transform, inverse_hankel
from .multiplier import apply_multiplier
from .verify import (cz_hormander_check, h1_atom_check, lp_norm_probe,
                     weak11_probe)

USAGE_ERROR = 64
MEMORY_LIMIT_BYTES = 2 << 30

SUITES = ("transform-selftest", "heat-selftest", "multiplier-check",
          "cz-check", "h1-check", "lp-probe")


@dataclass
class RunConfig:
    """Effective (post-default) configuration of one CLI run."""

    suite: str = "transform-selftest"
    alpha: tuple = (0.5,)
    dims: int = 1
    n: int = 1024
    R: float = 24.0
    grading: int = 10
    symbol: str = "laplace_type{phi=imag_power:gamma=1.0}"
    beta: float = 2.0
    jmin: int = -10
    jmax: int = 10
    p: float = 2.0
    seed: int = 1234
    threads: int = 0
    output: str = "hankellab-out"

    def digest(self):
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _parse_config_file(path):
    """Flat key=value file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _coerce(cfg: RunConfig, key, val):
    cur = getattr(cfg, key)
    if key == "alpha":
        return tuple(float(a) for a in str(val).split(","))
    if isinstance(cur, bool):
        return str(val).lower() in ("1", "true", "yes")
    if isinstance(cur, int):
        return int(val)
    if isinstance(cur, float):
        return float(val)
    if isinstance(cur, tuple):
        return tuple(val)
    return str(val)


def build_config(args):
    cfg = RunConfig()
    if args.config:
        for key, val in _parse_config_file(args.config).items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key: {key}")
            setattr(cfg, key, _coerce(cfg, key, val))
    for key in vars(cfg):
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, _coerce(cfg, key, flag))
    if len(cfg.alpha) == 1 and cfg.dims > 1:
        cfg.alpha = cfg.alpha * cfg.dims
    cfg.dims = len(cfg.alpha)
    if cfg.threads == 0:
        cfg.threads = int(os.environ.get("HML_THREADS", "0")) or os.cpu_count()
    return cfg


def _estimate_plan_bytes(cfg):
    # two dense axis matrices per dimension
    return 2 * cfg.dims * cfg.n * cfg.n * 8


def _plan(cfg):
    need = _estimate_plan_bytes(cfg)
    if need > MEMORY_LIMIT_BYTES:
        raise MemoryError(
            f"plan would need ~{need / 2**30:.1f} GiB of kernel matrices; "
            "reduce n or dims"
        )
    grid = Grid.build(cfg.alpha, R=cfg.R, n=cfg.n,
                      grading_levels=cfg.grading)
    return TransformPlan.build(grid)


# ---------------------------------------------------------------------------
# suites

def suite_transform_selftest(cfg):
    plan = _plan(cfg)
    grid = plan.grid
    rng = np.random.default_rng(cfg.seed)
    rep = EstimateReport(
        name="transform_selftest",
        parameters={"alpha": list(cfg.alpha), "n": cfg.n, "R": cfg.R},
        provenance="Plancherel identity and self-inversion battery",
    )
    worst_pl, worst_inv = 0.0, 0.0
    for i in range(8):
        c = rng.uniform(cfg.R / 8, cfg.R / 3, size=cfg.dims)
        w = rng.uniform(0.8, 2.0)
        f = grid.sample(lambda *xs: np.exp(
            -np.sum(((np.stack(xs, axis=-1) - c) / w) ** 2, axis=-1)))
        g = hankel_transform(plan, f)
        pl = abs(norm(g, 2.0) / norm(f, 2.0) - 1.0)
        back = inverse_hankel(plan, g)
        inv = norm(back - f, 2.0) / norm(f, 2.0)
        worst_pl, worst_inv = max(worst_pl, pl), max(worst_inv, inv)
        rep.add(f"plancherel_dev@f{i}", pl)
        rep.add(f"inversion_err@f{i}", inv)
    rep.fitted_constants["max_plancherel_deviation"] = worst_pl
    rep.fitted_constants["max_inversion_error"] = worst_inv
    rep.verdict = PASS if (worst_pl <= 1e-6 and worst_inv <= 1e-6) else FAIL
    return [rep]


def suite_heat_selftest(cfg):
    alpha = MultiIndex(cfg.alpha)
    hk = HeatKernelEval(alpha)
    plan = _plan(cfg)
    grid = plan.grid
    mesh = np.stack(grid.meshgrid(), axis=-1)
    f = grid.sample(lambda *xs: np.exp(
        -np.sum((np.stack(xs, axis=-1) - 2.0) ** 2, axis=-1)))
    spec = hankel_transform(plan, f)
    lam2 = np.sum(np.stack(plan.dual_grid.meshgrid(), axis=-1) ** 2, axis=-1)
    rep = EstimateReport(
        name="heat_selftest",
        parameters={"alpha": list(cfg.alpha), "n": cfg.n, "R": cfg.R},
        provenance="kernel route against the spectral Gaussian multiplier",
    )
    worst = 0.0
    for t in (0.25, 1.0, 4.0):
        kern = heat_apply(hk, t, f).values
        spect = inverse_hankel(
            plan, GridFunction(plan.dual_grid, spec.values * np.exp(-t * lam2))
        ).values
        interior = np.all(mesh < (cfg.R - 6.0 * np.sqrt(t)), axis=-1)
        dev = float(np.max(np.abs((kern - spect)[interior])))
        rep.add(f"route_deviation@t={t}", dev)
        worst = max(worst, dev)
    rng = np.random.default_rng(cfg.seed)
    samples = [(float(np.exp(rng.uniform(-2, 2))),
                rng.uniform(0.3, 5.0, cfg.dims),
                rng.uniform(0.3, 5.0, cfg.dims)) for _ in range(40)]
    gb = gaussian_bound_check(hk, samples)
    rep.fitted_constants["max_route_deviation"] = worst
    rep.fitted_constants["C_gauss"] = gb.fitted_constants["C_gauss"]
    rep.verdict = PASS if (worst <= 1e-6 and gb.verdict == PASS) else FAIL
    return [rep, gb]


def suite_multiplier_check(cfg, flat_tol=10.0):
    sym = parse_symbol(cfg.symbol, cfg.dims)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prof = hormander_sup(sym, cfg.beta, (cfg.jmin, cfg.jmax))
    rep = EstimateReport(
        name="multiplier_check",
        parameters={"symbol": cfg.symbol, "beta": cfg.beta,
                    "j_range": [cfg.jmin, cfg.jmax]},
        provenance="dyadic localized Sobolev profile of the symbol",
    )
    for j in sorted(prof.norms):
        rep.add(f"norm@j={j}", prof.norms[j])
    flat = prof.flatness()
    rep.fitted_constants["sup_norm"] = prof.sup_norm
    rep.fitted_constants["flatness"] = flat
    rep.verdict = PASS if (np.isfinite(prof.sup_norm)
                           and flat <= flat_tol) else FAIL
    return [rep]


def suite_cz_check(cfg):
    if cfg.dims != 1:
        raise ValueError("cz-check runs in one dimension")
    sym = parse_symbol(cfg.symbol, cfg.dims)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = cz_hormander_check(MultiIndex(cfg.alpha), sym,
                                 make_partition("plain"))
    return [rep]


def suite_h1_check(cfg):
    if cfg.dims != 1:
        raise ValueError("h1-check runs in one dimension")
    sym = parse_symbol(cfg.symbol, cfg.dims)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = h1_atom_check(MultiIndex(cfg.alpha), sym,
                            make_partition("squared"))
    return [rep]


def suite_lp_probe(cfg):
    sym = parse_symbol(cfg.symbol, cfg.dims)
    plan = _plan(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reps = [lp_norm_probe(plan, sym, cfg.p, seed=cfg.seed)]
        if cfg.dims == 1:
            reps.append(weak11_probe(plan, sym))
    return reps


_SUITE_FNS = {
    "transform-selftest": suite_transform_selftest,
    "heat-selftest": suite_heat_selftest,
    "multiplier-check": suite_multiplier_check,
    "cz-check": suite_cz_check,
    "h1-check": suite_h1_check,
    "lp-probe": suite_lp_probe,
}


# ---------------------------------------------------------------------------
# artifacts

def _write_artifacts(cfg, suite, reports, outdir):
    os.makedirs(outdir, exist_ok=True)
    meta = {"tool": "hankellab", "version": __version__,
            "config_hash": cfg.digest(), "config": asdict(cfg)}
    payload = dict(meta)
    payload["reports"] = [json.loads(r.to_json()) for r in reports]
    with open(os.path.join(outdir, f"report-{suite}.json"), "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")
    with open(os.path.join(outdir, f"data-{suite}.csv"), "w") as fh:
        fh.write(f"# hankellab {__version__} config {cfg.digest()}\n")
        fh.write("report,descriptor,value\n")
        for r in reports:
            for d, v in r.measurements:
                fh.write(f"{r.name},{d},{v!r}\n")
    return meta


def _write_summary(cfg, all_reports, outdir):
    lines = [f"hankellab {__version__}  config {cfg.digest()}"]
    for r in all_reports:
        lines.append(f"{r.verdict.upper():14s} {r.name}")
    text = "\n".join(lines) + "\n"
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write(text)
    return text


# ---------------------------------------------------------------------------
# entry point

def _make_parser():
    parser = argparse.ArgumentParser(
        prog="hankellab",
        description="Hankel-transform multiplier laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITES + ("suite",):
        p = sub.add_parser(name)
        if name == "suite":
            p.add_argument("which", help="'all' or comma list of suites")
        p.add_argument("--config", default=None,
                       help="flat key=value config file (flags win)")
        p.add_argument("--alpha", default=None, help="comma list")
        p.add_argument("--dims", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--R", type=float, default=None)
        p.add_argument("--symbol", default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--jmin", type=int, default=None)
        p.add_argument("--jmax", type=int, default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--output", default=None)
    return parser


def main(argv=None):
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        cfg = build_config(args)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    os.environ.setdefault("OMP_NUM_THREADS", str(cfg.threads))
    if args.command == "suite":
        names = list(_SUITE_FNS) if args.which == "all" \
            else [s.strip() for s in args.which.split(",")]
        unknown = [s for s in names if s not in _SUITE_FNS]
        if unknown:
            print(f"unknown suites: {unknown}", file=sys.stderr)
            return USAGE_ERROR
    else:
        names = [args.command]
    all_reports = []
    try:
        for name in names:
            cfg.suite = name
            reports = _SUITE_FNS[name](cfg)
            _write_artifacts(cfg, name, reports, cfg.output)
            all_reports.extend(reports)
    except MemoryError as exc:
        print(f"refusing to run: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure of a suite
        print(f"suite error: {exc}", file=sys.stderr)
        return 1
    print(_write_summary(cfg, all_reports, cfg.output), end="")
    verdicts = {r.verdict for r in all_reports}
    if FAIL in verdicts:
        return 1
    if INCONCLUSIVE in verdicts:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
