"""Multiplier symbols n on R^d (with m(lambda) = n(lambda_1^2, ..., lambda_d^2)),
their standard families, and the config-file mini-language.

Families:
  laplace_type{phi=const}              n = Xi (identically 1 on the quadrant)
  laplace_type{phi=imag_power:gamma=G} n = Xi * Gamma(1+iG) s^{-iG}, s = sum u_k
  bump                                 the radial partition bump in A_{1/2,2}
  oscillatory{k=K}                     eta(u) e^{i K u_1}
  potential{s=S,h=NAME}                h * G_S built constructively (see sobolev)
  divergent                            e^{i/s} * cutoff; the negative control
Tabulated symbols load from CSV with columns u_1..u_d, Re n, Im n.
"""

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .dyadic import make_partition, smooth_chi, smoothstep


@dataclass(frozen=True)
class Symbol:
    """A multiplier symbol n on R^d plus boundedness/support metadata."""

    fn: callable
    d: int
    sup_norm: float
    support_annulus: tuple | None = None  # (r_lo, r_hi) or None
    name: str = "symbol"

    def __call__(self, u):
        """Evaluate n at points u with last axis of length d."""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.d:
            raise ValueError(f"expected last axis {self.d}, got {u.shape[-1]}")
        vals = np.asarray(self.fn(u))
        mags = np.abs(vals)
        if mags.size and float(np.max(mags)) > self.sup_norm * (1 + 1e-9):
            raise RuntimeError(
                f"symbol {self.name} exceeds its recorded sup norm: "
                f"{float(np.max(mags))} > {self.sup_norm}"
            )
        return vals

    def on_dual_grid(self, dual_grid):
        """m(lambda) = n(lambda^2) sampled on a dual tensor grid."""
        mesh = np.stack(
            np.meshgrid(*(ax.nodes for ax in dual_grid.axes), indexing="ij"),
            axis=-1,
        )
        return self(mesh**2)


def _xi_cutoff(u):
    """Smooth 0-homogeneous angular cutoff: 1 on the open quadrant, 0 where
    u_1+...+u_d < |u|/d."""
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    s = np.sum(u, axis=-1)
    mag = np.sqrt(np.sum(u * u, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(mag > 0, s / np.where(mag > 0, mag, 1.0), 0.0)
    if d == 1:
        return (rho > 0).astype(float)
    # on the quadrant s >= |u|, i.e. rho >= 1; forbidden zone rho <= 1/d
    return smoothstep((rho - 1.0 / d) / (1.0 - 1.0 / d))


def laplace_type_symbol(d, phi="const", gamma=None):
    """Laplace-transform-type family n = Xi * s * int_0^inf e^{-t s} phi(t) dt."""
    if phi == "const":
        def fn(u):
            return _xi_cutoff(u).astype(complex)

        return Symbol(fn, d, 1.0, None, "laplace_type{phi=const}")
    if phi == "imag_power":
        g = float(gamma)
        C = gamma_fn(1.0 + 1j * g)

        def fn(u):
            xi = _xi_cutoff(u)
            s = np.sum(np.asarray(u, dtype=float), axis=-1)
            safe = np.where(s > 0, s, 1.0)
            return np.where(xi > 0, xi * C * safe ** (-1j * g), 0.0 + 0.0j)

        return Symbol(fn, d, float(abs(C)), None,
                      f"laplace_type{{phi=imag_power:gamma={g}}}")
    raise ValueError(f"unknown phi family: {phi}")


def bump_symbol(d):
    """The radial partition bump, a C_c^infty(A_{1/2,2}) representative."""
    psi = make_partition("plain")

    def fn(u):
        return psi(u).astype(complex)

    return Symbol(fn, d, 1.0, (0.5, 2.0), "bump")


def oscillatory_symbol(d, k):
    """eta(u) e^{i k u_1} with eta the radial bump window."""
    psi = make_partition("plain")
    k = float(k)

    def fn(u):
        u = np.asarray(u, dtype=float)
        return psi(u) * np.exp(1j * k * u[..., 0])

    return Symbol(fn, d, 1.0, (0.5, 2.0), f"oscillatory{{k={k}}}")


def divergent_symbol(d, cutoff=8.0):
    """Negative control: e^{i/s} times a smooth cutoff at infinity.

    Its localized Sobolev norms blow up as j -> -infty for beta >= 1."""
    def fn(u):
        u = np.asarray(u, dtype=float)
        s = np.sum(u, axis=-1)
        mag = np.sqrt(np.sum(u * u, axis=-1))
        env = smooth_chi(mag / cutoff)
        safe = np.where(np.abs(s) > 1e-300, s, 1.0)
        return np.where(np.abs(s) > 1e-300, env * np.exp(1j / safe), 0.0 + 0.0j)

    return Symbol(fn, d, 1.0, None, "divergent")


def heat_symbol(d, t=1.0):
    """Gaussian multiplier n(u) = e^{-t (u_1+...+u_d)_+} (m = e^{-t|lambda|^2};
    only u >= 0 is ever hit by m, the continuation is clipped to stay bounded)."""
    t = float(t)

    def fn(u):
        s = np.sum(np.asarray(u, dtype=float), axis=-1)
        return np.exp(-t * np.maximum(s, 0.0)).astype(complex)

    return Symbol(fn, d, 1.0, None, f"heat{{t={t}}}")


def constant_symbol(d, value=1.0):
    def fn(u):
        return np.full(np.asarray(u).shape[:-1], complex(value))

    return Symbol(fn, d, abs(complex(value)), None, f"const{{{value}}}")


def tabulated_symbol(path, d):
    """Symbol tabulated on a box grid, loaded from CSV (u_1..u_d, Re n, Im n);
    evaluated by multilinear interpolation, zero outside the table."""
    from scipy.interpolate import RegularGridInterpolator

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    coords = [np.unique(data[:, k]) for k in range(d)]
    shape = tuple(c.size for c in coords)
    vals = (data[:, d] + 1j * data[:, d + 1]).reshape(shape)
    interp = RegularGridInterpolator(
        coords, vals, method="linear", bounds_error=False, fill_value=0.0
    )

    def fn(u):
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1, d)
        return interp(flat).reshape(u.shape[:-1])

    return Symbol(fn, d, float(np.max(np.abs(vals))) + 1e-12, None,
                  f"tabulated{{{path}}}")


_FAMILY_RE = re.compile(r"^(\w+)(?:\{(.*)\})?$")


def parse_symbol(spec_str, d):
    """Parse the mini-language: family name plus {key=value,...} arguments."""
    m = _FAMILY_RE.match(spec_str.strip())
    if not m:
        raise ValueError(f"cannot parse symbol spec: {spec_str!r}")
    fam, argstr = m.group(1), m.group(2) or ""
    args = {}
    phi_mode, phi_args = None, {}
    for part in filter(None, (p.strip() for p in argstr.split(","))):
        if "=" not in part:
            raise ValueError(f"bad symbol argument: {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if key == "phi" and ":" in val:
            phi_mode, sub = val.split(":", 1)
            skey, sval = sub.split("=", 1)
            phi_args[skey.strip()] = sval.strip()
        else:
            args[key] = val
    if fam == "laplace_type":
        phi = phi_mode or args.get("phi", "const")
        gamma = phi_args.get("gamma", args.get("gamma"))
        return laplace_type_symbol(d, phi, gamma)
    if fam == "bump":
        return bump_symbol(d)
    if fam == "oscillatory":
        return oscillatory_symbol(d, float(args["k"]))
    if fam == "potential":
        from .sobolev import potential_symbol

        return potential_symbol(d, float(args["s"]), args["h"])
    if fam == "divergent":
        return divergent_symbol(d)
    if fam == "heat":
        return heat_symbol(d, float(args.get("t", 1.0)))
    if fam == "const":
        return constant_symbol(d, float(args.get("value", 1.0)))
    if fam == "tabulated":
        return tabulated_symbol(args["path"], d)
    raise ValueError(f"unknown symbol family: {fam!r}")
