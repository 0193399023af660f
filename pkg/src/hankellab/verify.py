"""Experiment harness: Calderon-Zygmund kernel checks, L^p and weak-(1,1)
probing, Hardy-space atoms, and the maximal-function kernel estimates.

The kernel checks sweep scale-adapted transform plans: each dyadic piece or
atom gets a grid pair whose bandwidth product Lambda * R stays at a fixed
points-per-wavelength budget, so a single sweep can span many decades of
separations and radii without a monster grid.  Geometric parameters
(centers, margins, exclusion radii) scale with the probe radius, which keeps
the sweeps covariant under the dilation structure the estimates live on.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicPartition
from .grid import Grid, GridFunction, ball_measure, integrate, norm
from .heat import TimeGrid
from .report import (FAIL, INCONCLUSIVE, PASS, EstimateReport, bounded_no_trend,
                     loglog_slope)
from .specfun import MultiIndex, e_kernel_axis
from .symbols import Symbol
from .transform import TransformPlan, _contract
from .multiplier import apply_multiplier, resolvable_j_band, _symbol_values

DEFAULT_SEED = 1234
BATTERY_SIZE = 64


# ---------------------------------------------------------------------------
# atoms

@dataclass(frozen=True)
class Atom:
    """A Hardy-space atom: mean zero, supported in B(y0, r), sup-normalized
    against the quadrature ball measure."""

    values: GridFunction
    center: np.ndarray
    radius: float
    ball_measure: float


def make_atom(grid: Grid, y0, r, profile=None):
    """Mean-zero atom from a radial bump minus a rebalanced wider bump.

    The inner bump sits in B(y0, r/2) and the outer in B(y0, r); the outer
    coefficient is fixed by quadrature so the d-nu integral vanishes, then
    the whole thing is scaled to sup norm 1/nu(B(y0, r)).
    """
    from .dyadic import smooth_chi

    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    r = float(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    mesh = np.stack(grid.meshgrid(), axis=-1)
    rho = np.sqrt(np.sum((mesh - y0) ** 2, axis=-1))
    if profile is None:
        inner = smooth_chi(4.0 * rho / r)
        outer = smooth_chi(2.0 * rho / r)
    else:
        inner = np.asarray(profile(2.0 * rho / r))
        outer = np.asarray(profile(rho / r))
    wts = grid.weight_tensor()
    mi, mo = float(np.sum(inner * wts)), float(np.sum(outer * wts))
    if mo <= 0 or mi <= 0:
        raise ValueError("ball measure below quadrature resolution at "
                         f"y0={y0.tolist()}, r={r}")
    raw = inner - (mi / mo) * outer
    nu_b = ball_measure(grid, y0, r)
    vals = raw / (float(np.max(np.abs(raw))) * nu_b)
    atom = Atom(GridFunction(grid, vals), y0, r, nu_b)
    check_atom(atom)
    return atom


def check_atom(atom: Atom, support_tol=1e-14, mean_tol=1e-10):
    """Re-verify the three atom conditions on the quadrature grid."""
    g = atom.values
    mesh = np.stack(g.grid.meshgrid(), axis=-1)
    rho = np.sqrt(np.sum((mesh - atom.center) ** 2, axis=-1))
    sup = float(np.max(np.abs(g.values)))
    outside = rho > atom.radius
    leak = float(np.max(np.abs(g.values[outside]))) if outside.any() else 0.0
    if leak > support_tol * max(sup, 1e-300):
        raise ValueError("atom leaks outside its ball")
    if sup > (1.0 + 1e-12) / atom.ball_measure:
        raise ValueError("atom exceeds the 1/nu(B) sup bound")
    mean = abs(float(np.real(integrate(g))))
    if mean > mean_tol * sup * atom.ball_measure:
        raise ValueError(f"atom mean {mean:.2e} is not zero at tolerance")
    return True


# ---------------------------------------------------------------------------
# scale-adapted plans and spectral kernel rows

def _alpha_of(plan_or_alpha):
    if isinstance(plan_or_alpha, TransformPlan):
        return plan_or_alpha.grid.alpha
    if isinstance(plan_or_alpha, MultiIndex):
        return plan_or_alpha
    return MultiIndex(tuple(np.atleast_1d(plan_or_alpha)))


def adapted_plan(alpha, R, Lam, ppw=5.0, n_min=256, n_max=3072, n_dual=512):
    """Plan with the spatial node count set by a points-per-wavelength
    budget at the bandwidth corner."""
    n_x = int(np.clip(np.ceil(Lam * R / (2.0 * np.pi) * ppw), n_min, n_max))
    grid = Grid.build(alpha, R=R, n=n_x)
    dual = Grid.build(alpha, R=Lam, n=n_dual)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return TransformPlan.build(grid, dual)


def _kernel_row(plan, mvals, y):
    """tau^y H(m) evaluated on the plan's grid, via H(E_y m)."""
    return _contract(plan.inv, mvals * plan.e_dual(np.atleast_1d(y)))


def _maximal_field(plan, spec_vals, tg: TimeGrid):
    """sup over the time grid of |H(e^{-t|lambda|^2} spec_vals)|."""
    lam2 = 0.0
    for k, dax in enumerate(plan.dual_grid.axes):
        sh = [1] * plan.grid.d
        sh[k] = dax.n
        lam2 = lam2 + (dax.nodes**2).reshape(sh)
    best = np.zeros(plan.grid.shape)
    for t in tg.t_values:
        damp = np.exp(-t * lam2)
        if damp.max() < 1e-16:
            continue
        np.maximum(best, np.abs(_contract(plan.inv, spec_vals * damp)),
                   out=best)
    return best


# ---------------------------------------------------------------------------
# Calderon-Zygmund condition and kernel association

def default_cz_pairs(n_pairs=8, y_lo=0.02, y_hi=20.0, offset=1.3):
    """Pairs (y, offset*y) along the dilation orbit; the separation
    |y - y'| then sweeps decades while the geometry stays self-similar."""
    return [(np.array([y]), np.array([offset * y]))
            for y in np.geomspace(y_lo, y_hi, n_pairs)]


def cz_hormander_check(plan_or_alpha, m: Symbol, psi: DyadicPartition,
                       pairs=None, j_margin=(20, 8), n_dual=512,
                       slope_tol=0.05, ratio_tol=5.0):
    """Hormander integral condition for the assembled kernel K = sum_j K_j.

    For each pair (y, y') measures D = sum_j int_{|x-y|>2|y-y'|}
    |K_j(x,y) - K_j(x,y')| dnu(x) with per-(pair, j) scale-adapted plans,
    the dyadic band centered at j* = -2 log2(2|y-y'|).  Passes when D is
    bounded with no trend across separations.
    """
    alpha = _alpha_of(plan_or_alpha)
    if alpha.d != 1:
        raise NotImplementedError("the adapted-plan sweep is 1-dimensional")
    pairs = pairs if pairs is not None else default_cz_pairs()
    rep = EstimateReport(
        name="cz_hormander_condition",
        parameters={"alpha": list(alpha.alpha), "symbol": m.name,
                    "n_pairs": len(pairs), "j_margin": list(j_margin),
                    "slope_tol": slope_tol, "ratio_tol": ratio_tol},
        provenance="Hormander integral condition for the dyadic kernel sum",
    )
    seps, totals = [], []
    n_alias = 0
    mid = len(pairs) // 2
    for idx, (y, yp) in enumerate(pairs):
        y = np.atleast_1d(np.asarray(y, float))
        yp = np.atleast_1d(np.asarray(yp, float))
        r2 = 2.0 * float(np.linalg.norm(y - yp))
        jstar = int(np.ceil(-2.0 * np.log2(r2)))
        total = 0.0
        perj = []
        for j in range(jstar - j_margin[0], jstar + j_margin[1] + 1):
            scale = 2.0 ** (-j / 2.0)
            Lam = 1.05 * 2.0 ** ((j + 1) / 2.0)
            R = float(max(y.max(), yp.max()) + max(40.0 * scale, 4.0 * r2))
            pl = adapted_plan(alpha, R, Lam, n_dual=n_dual)
            u = np.stack([dax.nodes**2 for dax in pl.dual_grid.axes], axis=-1)
            with warnings.catch_warnings(record=True) as wlog:
                warnings.simplefilter("always")
                mj = psi.dilated(j, u) * m(u)
                row = _kernel_row(pl, mj, y) - _kernel_row(pl, mj, yp)
            n_alias += len(wlog)
            x = pl.grid.axes[0].nodes
            sel = np.abs(x - y[0]) > r2
            dj = float(np.sum(np.abs(row)[sel] * pl.grid.weight_tensor()[sel]))
            total += dj
            perj.append((j, dj))
        if idx == mid:
            for j, dj in perj:
                rep.add(f"D_j@j={j},sep={r2 / 2:.3e}", dj)
        rep.add(f"D@sep={r2 / 2:.3e}", total)
        seps.append(r2 / 2.0)
        totals.append(total)
        # geometric estimate of the mass truncated above the top piece
        rep.fitted_constants.setdefault("truncation_indicator", 0.0)
        rep.fitted_constants["truncation_indicator"] = max(
            rep.fitted_constants["truncation_indicator"], perj[-1][1]
        )
    ok, stats = bounded_no_trend(seps, totals, slope_tol, ratio_tol)
    rep.fitted_constants["C_hormander"] = float(np.max(totals))
    rep.fitted_constants["band_ratio"] = stats["ratio"]
    rep.fitted_constants["trend_slope"] = stats["slope"]
    rep.fitted_constants["n_resolution_warnings"] = float(n_alias)
    rep.verdict = PASS if ok else FAIL
    return rep


def association_check(plan: TransformPlan, m: Symbol, f: GridFunction,
                      x_samples, tol=1e-3):
    """Kernel association: T_m f(x) (spectral) against the integral of the
    assembled kernel row against f, at points x off the support of f.

    The kernel is assembled from the partial partition sum over the plan's
    resolvable dyadic band; discrepancies are reported relative to the sup
    of T_m f over the grid.
    """
    from .dyadic import make_partition

    psi = make_partition("plain")
    band = resolvable_j_band(plan)
    u = _dual_sq(plan)
    S = np.zeros(plan.dual_grid.shape)
    for j in band:
        S = S + psi.dilated(j, u)
    mvals = _symbol_values(plan, m)
    tmf = apply_multiplier(plan, m, f)
    scale = float(np.max(np.abs(tmf.values)))
    wts = plan.grid.weight_tensor()
    rep = EstimateReport(
        name="kernel_association",
        parameters={"symbol": m.name, "j_band": [band[0], band[-1]],
                    "tol": tol, "n_samples": len(x_samples)},
        provenance="agreement of the spectral route with the kernel integral",
    )
    worst = 0.0
    for x in x_samples:
        x = np.atleast_1d(np.asarray(x, float))
        idx = tuple(int(np.argmin(np.abs(ax.nodes - x[k])))
                    for k, ax in enumerate(plan.grid.axes))
        xg = np.array([plan.grid.axes[k].nodes[idx[k]]
                       for k in range(plan.grid.d)])
        row = _kernel_row(plan, mvals * S, xg)
        rhs = complex(np.sum(row * f.values * wts))
        lhs = complex(tmf.values[idx])
        rel = abs(lhs - rhs) / scale
        worst = max(worst, rel)
        rep.add(f"rel_err@x={xg.tolist()}", rel)
    rep.fitted_constants["max_relative_error"] = worst
    rep.verdict = PASS if worst <= tol else FAIL
    return rep


def _dual_sq(plan):
    mesh = np.stack(
        np.meshgrid(*(ax.nodes for ax in plan.dual_grid.axes), indexing="ij"),
        axis=-1,
    )
    return mesh**2


# ---------------------------------------------------------------------------
# operator-norm probing

def make_battery(plan: TransformPlan, count=BATTERY_SIZE, seed=DEFAULT_SEED):
    """Deterministic battery of bumps, dilates, translates, and
    trigonometric-bump mixes, band-limited to the plan's dual truncation."""
    rng = np.random.default_rng(seed)
    grid = plan.grid
    Lam = min(ax.R for ax in plan.dual_grid.axes)
    R = min(ax.R for ax in grid.axes)
    mesh = grid.meshgrid()
    out = []
    for _ in range(count):
        width = float(np.exp(rng.uniform(np.log(8.0 / Lam), np.log(R / 8.0))))
        centers = rng.uniform(width, R / 2.0, size=grid.d)
        vals = np.ones(grid.shape)
        for k in range(grid.d):
            vals = vals * np.exp(-(((mesh[k] - centers[k]) / width) ** 2))
        n_modes = rng.integers(0, 4)
        for _ in range(n_modes):
            om = rng.uniform(0.0, 0.4 * Lam)
            ph = rng.uniform(0.0, 2.0 * np.pi)
            vals = vals * (1.0 + 0.5 * np.cos(om * mesh[0] + ph))
        out.append(GridFunction(grid, vals))
    return out


def lp_norm_probe(plan: TransformPlan, m: Symbol, p, battery=None,
                  bound=None, tol=1e-6, seed=DEFAULT_SEED):
    """Max of ||T_m f||_p / ||f||_p over the battery.

    Probing yields lower bounds on the true operator norm only; for p = 2
    the ratio is additionally checked against ||m||_inf (Plancherel).
    """
    if not 1.0 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    battery = battery if battery is not None else make_battery(plan, seed=seed)
    rep = EstimateReport(
        name="lp_norm_probe",
        parameters={"p": p, "symbol": m.name, "battery": len(battery),
                    "seed": seed},
        provenance="L^p ratio probe (lower bounds on the operator norm)",
    )
    worst = 0.0
    for i, f in enumerate(battery):
        ratio = norm(apply_multiplier(plan, m, f), p) / norm(f, p)
        worst = max(worst, ratio)
        if i < 8:
            rep.add(f"ratio@f{i}", ratio)
    rep.fitted_constants["max_ratio"] = worst
    ok = np.isfinite(worst)
    if p == 2.0:
        ok = ok and worst <= m.sup_norm * (1.0 + tol)
        rep.fitted_constants["plancherel_budget"] = m.sup_norm
    if bound is not None:
        ok = ok and worst <= bound * (1.0 + tol)
        rep.fitted_constants["declared_bound"] = bound
    rep.verdict = PASS if ok else FAIL
    return rep


def weak11_probe(plan: TransformPlan, m: Symbol, centers=None, width=None,
                 sharpen=4.0, n_levels=32, band_factor=5.0):
    """Weak-(1,1) quantity sup_lambda lambda nu{|T_m f| > lambda} / ||f||_1
    over L^1-normalized spikes; passes when stable as spikes sharpen."""
    grid = plan.grid
    Lam = min(ax.R for ax in plan.dual_grid.axes)
    width = width if width is not None else 48.0 / Lam
    centers = centers if centers is not None else [0.5, 1.0, 2.0, 4.0, 8.0]
    mesh = np.stack(grid.meshgrid(), axis=-1)
    wts = grid.weight_tensor()
    rep = EstimateReport(
        name="weak_11_probe",
        parameters={"symbol": m.name, "width": width, "sharpen": sharpen,
                    "centers": list(map(float, centers)),
                    "band_factor": band_factor},
        provenance="weak-type (1,1) level-set probe under spike sharpening",
    )

    def quantity(c, h):
        c = np.full(grid.d, float(c))
        vals = np.exp(-np.sum(((mesh - c) / h) ** 2, axis=-1))
        f = GridFunction(grid, vals)
        f = GridFunction(grid, vals / norm(f, 1.0))
        g = np.abs(apply_multiplier(plan, m, f).values)
        peak = float(g.max())
        best = 0.0
        for lam in np.geomspace(1e-3, 0.9, n_levels) * peak:
            best = max(best, lam * float(np.sum(wts[g > lam])))
        return best

    ok, worst = True, 0.0
    for c in centers:
        q0 = quantity(c, width)
        q1 = quantity(c, width / sharpen)
        rep.add(f"q@c={c},base", q0)
        rep.add(f"q@c={c},sharp", q1)
        ratio = q1 / q0
        ok = ok and (1.0 / band_factor) <= ratio <= band_factor
        worst = max(worst, q0, q1)
    rep.fitted_constants["max_quantity"] = worst
    rep.verdict = PASS if (ok and np.isfinite(worst)) else FAIL
    return rep


# ---------------------------------------------------------------------------
# Hardy-space atoms against the maximal function

def default_atom_family(radii=None, center_factors=(1.2, 5.0, 20.0)):
    """(center, radius) pairs covariant under dilation: centers at fixed
    multiples of the radius, including boundary-adjacent balls."""
    if radii is None:
        radii = np.geomspace(2.0**-4, 2.0**4, 8)
    return [(c * r, r) for r in radii for c in center_factors]


def h1_atom_check(plan_or_alpha, m: Symbol, psi_squared: DyadicPartition,
                  atoms=None, tg: TimeGrid | None = None,
                  per_j_radii=None, slope_tol=0.05,
                  ratio_tol=5.0, structure_factor=0.5):
    """||M(T_m a)||_1 over an atom family, split into the local ball part
    and the far part, with a per-j far-field profile on a subfamily.

    Each atom gets two adapted plans: a fine one resolving the atom scale
    out to a margin of 24 radii, and a coarse one carrying the slowly
    decaying maximal-function tail out to hundreds of radii.  With tg=None
    the time window also adapts per atom, t in r^2 [1e-5, 1e5], since a
    fixed window truncates the supremum below the smallest atom scales and
    fakes a radius trend.  Passes when
    the per-radius max of the total norm is flat in the radius and the
    per-j far profile peaks near j = -2 log2(r) and decays at the band ends.
    """
    alpha = _alpha_of(plan_or_alpha)
    if alpha.d != 1:
        raise NotImplementedError("the adapted-plan sweep is 1-dimensional")
    atoms = atoms if atoms is not None else default_atom_family()
    if per_j_radii is None:
        # a small/middle/large subfamily for the per-j far-field profile
        rs = sorted({r for _, r in atoms})
        per_j_radii = {rs[len(rs) // 4], rs[len(rs) // 2], rs[-2]}
    rep = EstimateReport(
        name="h1_atom_maximal_bound",
        parameters={"alpha": list(alpha.alpha), "symbol": m.name,
                    "n_atoms": len(atoms), "slope_tol": slope_tol,
                    "ratio_tol": ratio_tol},
        provenance="L^1 bound for the maximal function of multiplied atoms",
    )
    by_radius = {}
    perj_profiles = {}
    for y0, r in atoms:
        tg_atom = tg or TimeGrid(r * r * np.geomspace(1e-5, 1e5, 80))
        fine = adapted_plan(alpha, R=y0 + 24.0 * r, Lam=40.0 / r,
                            n_dual=640, ppw=5.0)
        coarse = adapted_plan(alpha, R=y0 + 240.0 * r, Lam=10.0 / r,
                              n_dual=512, ppw=4.0)
        atom = make_atom(fine.grid, y0, r)
        spec_f = _contract(fine.fwd, atom.values.values)
        mv_f = _symbol_values(fine, m)
        x_f = fine.grid.axes[0].nodes
        w_f = fine.grid.weight_tensor()
        F = y0 + 18.0 * r
        Mf = _maximal_field(fine, mv_f * spec_f, tg_atom)
        local_sel = np.abs(x_f - y0) <= 2.0 * r
        near_sel = (~local_sel) & (x_f <= F)
        local = float(np.sum(Mf[local_sel] * w_f[local_sel]))
        near = float(np.sum(Mf[near_sel] * w_f[near_sel]))
        # atom spectrum on the coarse dual grid, by fine-grid quadrature
        dax = coarse.dual_grid.axes[0]
        E = e_kernel_axis(alpha.alpha[0], np.outer(dax.nodes, x_f))
        spec_c = E @ (atom.values.values * w_f)
        mv_c = _symbol_values(coarse, m)
        Mc = _maximal_field(coarse, mv_c * spec_c, tg_atom)
        x_c = coarse.grid.axes[0].nodes
        far_sel = x_c > F
        far = float(np.sum(Mc[far_sel] * coarse.grid.weight_tensor()[far_sel]))
        total = local + near + far
        rep.add(f"total@r={r:.3g},y0={y0:.3g}", total)
        rep.add(f"local@r={r:.3g},y0={y0:.3g}", local)
        rep.add(f"far@r={r:.3g},y0={y0:.3g}", near + far)
        by_radius.setdefault(r, []).append(total)
        if r in per_j_radii and abs(y0 / r - 5.0) < 1e-9:
            jc = int(round(-2.0 * np.log2(r)))
            u_f = _dual_sq(fine)
            u_c = _dual_sq(coarse)
            prof = []
            for j in range(jc - 8, jc + 9):
                pj_f = psi_squared.dilated(j, u_f) ** 2
                fj = _maximal_field(fine, pj_f * mv_f * spec_f, tg_atom)
                val = float(np.sum(fj[near_sel] * w_f[near_sel]))
                if 2.0 ** ((j + 1) / 2.0) <= coarse.dual_grid.axes[0].R:
                    pj_c = psi_squared.dilated(j, u_c) ** 2
                    fc = _maximal_field(coarse, pj_c * mv_c * spec_c, tg_atom)
                    val += float(np.sum(
                        fc[far_sel] * coarse.grid.weight_tensor()[far_sel]))
                rep.add(f"far_j@r={r:.3g},j={j}", val)
                prof.append(val)
            perj_profiles[r] = (jc, prof)
    radii = sorted(by_radius)
    maxima = [max(by_radius[r]) for r in radii]
    ok, stats = bounded_no_trend(radii, maxima, slope_tol, ratio_tol)
    rep.fitted_constants["C_atom"] = float(np.max(maxima))
    rep.fitted_constants["band_ratio"] = stats["ratio"]
    rep.fitted_constants["trend_slope"] = stats["slope"]
    structure_ok = True
    for r, (jc, prof) in perj_profiles.items():
        peak = max(prof)
        ends = max(prof[0], prof[-1])
        rep.fitted_constants[f"far_j_end_over_peak@r={r:.3g}"] = \
            ends / peak if peak > 0 else 0.0
        structure_ok = structure_ok and (peak == 0.0
                                         or ends <= structure_factor * peak)
    rep.verdict = PASS if (ok and structure_ok) else FAIL
    return rep


# ---------------------------------------------------------------------------
# maximal-kernel estimates for the dyadic-heat compositions

def mjt_kernel_checks(plan_or_alpha, m: Symbol, psi_squared: DyadicPartition,
                      j_set=tuple(range(-4, 5)), y=2.0,
                      rho_values=(2.0, 4.0, 8.0, 16.0, 32.0),
                      tg: TimeGrid | None = None, band_factor=5.0):
    """Scaling checks for M_(j,t)(x, y), the kernels of the dyadic pieces
    composed with the heat semigroup.

    Tail: int_{|x-y|>r} sup_t |M_(j,t)| dnu against (2^{j/2} r)^{-delta},
    with r = rho 2^{-j/2} so the abscissa rho is shared across j.
    Lipschitz: the y-difference integral against 2^{j/2}|y-y'|.  Passes
    when the fitted tail slope is negative and both constants sit in a
    j-uniform band.
    """
    alpha = _alpha_of(plan_or_alpha)
    if alpha.d != 1:
        raise NotImplementedError("the adapted-plan sweep is 1-dimensional")
    tg = tg or TimeGrid.build()
    rep = EstimateReport(
        name="mjt_kernel_estimates",
        parameters={"alpha": list(alpha.alpha), "symbol": m.name,
                    "j_set": list(j_set), "y": y,
                    "rho_values": list(map(float, rho_values)),
                    "band_factor": band_factor},
        provenance="tail decay and Lipschitz scaling of maximal dyadic "
                   "heat kernels",
    )
    all_rho, all_tail = [], []
    tail_by_j, lip_by_j = {}, {}
    for j in j_set:
        scale = 2.0 ** (-j / 2.0)
        Lam = 1.05 * 2.0 ** ((j + 1) / 2.0)
        R = y + (max(rho_values) + 30.0) * scale
        pl = adapted_plan(alpha, R, Lam, n_dual=512, ppw=5.0)
        u = _dual_sq(pl)
        mj = psi_squared.dilated(j, u) ** 2 * _symbol_values(pl, m)
        ey = pl.e_dual(np.array([y]))
        sup_f = _maximal_field(pl, mj * ey, tg)
        x = pl.grid.axes[0].nodes
        w = pl.grid.weight_tensor()
        tails = []
        for rho in rho_values:
            sel = np.abs(x - y) > rho * scale
            tail = float(np.sum(sup_f[sel] * w[sel]))
            rep.add(f"tail@j={j},rho={rho:g}", tail)
            tails.append(tail)
            all_rho.append(rho)
            all_tail.append(tail)
        tail_by_j[j] = tails
        yp = y + 0.1 * scale
        eyp = pl.e_dual(np.array([yp]))
        diff = _maximal_field(pl, mj * (ey - eyp), tg)
        lip = float(np.sum(diff * w)) / (2.0 ** (j / 2.0) * (yp - y))
        rep.add(f"lipschitz_ratio@j={j}", lip)
        lip_by_j[j] = lip
    slope = loglog_slope(all_rho, all_tail)
    delta_fit = -slope
    rep.fitted_constants["delta_fit"] = delta_fit
    c_j = {j: max(t * np.asarray(rho_values) ** delta_fit)
           for j, t in tail_by_j.items()}
    tail_band = max(c_j.values()) / min(c_j.values())
    lip_band = max(lip_by_j.values()) / min(lip_by_j.values())
    rep.fitted_constants["tail_constant_band"] = float(tail_band)
    rep.fitted_constants["lipschitz_band"] = float(lip_band)
    ok = delta_fit > 0 and tail_band <= band_factor and lip_band <= band_factor
    rep.verdict = PASS if ok else FAIL
    return rep


# ---------------------------------------------------------------------------
# resolution robustness

def compare_resolutions(rep_base: EstimateReport, rep_fine: EstimateReport,
                        rel_tol=0.10):
    """Downgrade to inconclusive when refined resolution moves any shared
    fitted constant by more than rel_tol."""
    merged = EstimateReport(
        name=rep_base.name + "_resolution",
        parameters=dict(rep_base.parameters),
        provenance=rep_base.provenance,
    )
    worst = 0.0
    for key in sorted(set(rep_base.fitted_constants)
                      & set(rep_fine.fitted_constants)):
        a, b = rep_base.fitted_constants[key], rep_fine.fitted_constants[key]
        if not (isinstance(a, float) and isinstance(b, float)):
            continue
        drift = abs(b - a) / max(abs(a), abs(b), 1e-300)
        merged.add(f"drift@{key}", drift)
        worst = max(worst, drift)
    merged.fitted_constants["max_drift"] = worst
    if rep_base.verdict == rep_fine.verdict and worst <= rel_tol:
        merged.verdict = rep_base.verdict
    else:
        merged.verdict = INCONCLUSIVE
    return merged
