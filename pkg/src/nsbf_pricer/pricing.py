"""Payoff decomposition, the truncated pricing series, Greeks and rebates.

The value function is v(y, t) = sum_n f_n phi_n(y) exp(-lambda_n (T-t))
with f_n the weighted Fourier coefficients of the payoff.  Greeks reuse
the same eigendata: Delta sums f_n phi_n'(y0), Theta sums f_n lambda_n
phi_n(y0), and Vega is Delta / sigma'(y0) by the chain rule.  A constant
rebate paid at the upper barrier is handled by homogenizing the boundary
condition and integrating the resulting constant-in-time source term.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import VegaUndefined
from .mesh import GridFunction, Mesh, inner_product, interpolate_values
from .model import DiffusionSpec, SLCoefficients, drift_of
from .spectrum import EigenPair

LAMBDA_DECAY_CAP = 35.0  # keep terms with lambda_n * T <= cap; exp(-35) ~ 6e-16


@dataclass(frozen=True)
class OptionContract:
    """Double-barrier knock-out contract on (L, U) with maturity T years.

    style is "call", "put" or "custom" (payoff sampled on the pricing mesh);
    rebate R >= 0 is paid on knock-out at the upper barrier.
    """

    style: str
    L: float
    U: float
    T: float
    K: Optional[float] = None
    rebate: float = 0.0
    payoff: Optional[GridFunction] = None

    def __post_init__(self):
        if self.style not in ("call", "put", "custom"):
            raise ValueError(f"unknown option style {self.style!r}")
        if self.T <= 0.0:
            raise ValueError("maturity must be positive")
        if self.rebate < 0.0:
            raise ValueError("rebate must be non-negative")
        if self.style == "custom":
            if self.payoff is None:
                raise ValueError("custom style needs a sampled payoff")
        else:
            if self.K is None or not (self.L < self.K < self.U):
                raise ValueError("strike must satisfy L < K < U")


@dataclass(frozen=True)
class ContributionReport:
    """Partial-sum contributions per eigenindex band at (y0, t)."""

    bands: tuple
    total: float


@dataclass(frozen=True)
class PricingResult:
    price: float
    delta: Optional[float] = None
    vega: Optional[float] = None
    theta: Optional[float] = None
    N_used: int = 0
    M_used: int = 0
    contributions: Optional[ContributionReport] = None
    diagnostics: dict = field(default_factory=dict)


def payoff_grid(contract: OptionContract, mesh: Mesh) -> GridFunction:
    y = mesh.points
    if contract.style == "call":
        vals = np.maximum(y - contract.K, 0.0)
    elif contract.style == "put":
        vals = np.maximum(contract.K - y, 0.0)
    else:
        if contract.payoff.mesh.M != mesh.M:
            raise ValueError("custom payoff sampled on a different mesh")
        vals = contract.payoff.values
    return GridFunction(mesh, vals)


def fourier_coefficients(
    contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients
) -> list[EigenPair]:
    """Attach f_n = <f, phi_n> / <phi_n, phi_n> to every pair."""
    f = payoff_grid(contract, c.mesh)
    return project_coefficients(f, pairs, c)


def project_coefficients(
    f: GridFunction, pairs: list[EigenPair], c: SLCoefficients
) -> list[EigenPair]:
    out = []
    for pair in pairs:
        fn = inner_product(f, pair.phi, c.w) / pair.norm_sq
        out.append(replace(pair, f_n=fn))
    return out


def select_pairs(
    pairs: list[EigenPair],
    T: float,
    decay_cap: float = LAMBDA_DECAY_CAP,
    n_max: Optional[int] = None,
) -> list[EigenPair]:
    """Truncation rule: keep lambda_n * T <= decay_cap, optionally capped at n_max."""
    kept = [p for p in pairs if p.lam * T <= decay_cap]
    if not kept:
        kept = pairs[:1]
    if n_max is not None:
        kept = kept[:n_max]
    return kept


def _phi_at(pairs: list[EigenPair], y, mesh: Mesh, prime: bool = False) -> np.ndarray:
    rows = []
    for p in pairs:
        gf = p.phi_prime if prime else p.phi
        rows.append(interpolate_values(mesh, gf.values, y))
    return np.array(rows)


def value(y, t: float, contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients):
    """Truncated series value at price(s) y and calendar time t <= T."""
    if t > contract.T:
        raise ValueError("evaluation time beyond maturity")
    if contract.rebate != 0.0:
        return rebate_value(y, t, contract, pairs, c)
    fn = np.array([p.f_n for p in pairs])
    lam = np.array([p.lam for p in pairs])
    phis = _phi_at(pairs, np.atleast_1d(np.asarray(y, dtype=float)), c.mesh)
    out = np.tensordot(fn * np.exp(-lam * (contract.T - t)), phis, axes=(0, 0))
    return out if np.ndim(y) else float(out[0])


def value_surface(
    contract: OptionContract,
    pairs: list[EigenPair],
    c: SLCoefficients,
    t_count: int = 101,
    y_count: int = 101,
):
    """Value on a (t, y) grid; rows are times from 0 to T, columns prices."""
    t_grid = np.linspace(0.0, contract.T, t_count)
    y_grid = np.linspace(contract.L, contract.U, y_count)
    lam = np.array([p.lam for p in pairs])
    phis = _phi_at(pairs, y_grid, c.mesh)  # (N, y_count)
    tau = (contract.T - t_grid)[:, None]
    if contract.rebate != 0.0:
        dn, sn, _ = _rebate_decomposition(contract, pairs, c)
        coef = dn * np.exp(-lam * tau) + sn / lam * (1.0 - np.exp(-lam * tau))
        lin_at = contract.rebate * (y_grid - contract.L) / (contract.U - contract.L)
        surface = coef @ phis + lin_at[None, :]
    else:
        fn = np.array([p.f_n for p in pairs])
        surface = (fn * np.exp(-lam * tau)) @ phis
    return t_grid, y_grid, surface


def delta(y0: float, contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients) -> float:
    """Series Delta at (y0, 0); needs eigenfunction derivatives on the pairs."""
    if any(p.phi_prime is None for p in pairs):
        raise ValueError("eigenfunction derivatives were not assembled")
    fn = np.array([p.f_n for p in pairs])
    lam = np.array([p.lam for p in pairs])
    dphis = _phi_at(pairs, np.array([y0]), c.mesh, prime=True)[:, 0]
    base = float(np.sum(fn * dphis * np.exp(-lam * contract.T)))
    if contract.rebate != 0.0:
        dn, sn, _ = _rebate_decomposition(contract, pairs, c)
        decay = np.exp(-lam * contract.T)
        coef = dn * decay + sn / lam * (1.0 - decay)
        base = float(np.sum(coef * dphis)) + contract.rebate / (contract.U - contract.L)
    return base


def vega(y0: float, delta_value: float, spec: DiffusionSpec) -> float:
    """Vega by the chain rule, Delta / sigma'(y0); undefined for flat sigma."""
    if spec.sigma_prime is not None:
        sp = float(spec.sigma_prime(np.array([y0]))[0])
    else:
        h = 1e-4 * y0
        sp = float((spec.sigma(np.array([y0 + h])) - spec.sigma(np.array([y0 - h])))[0] / (2 * h))
    scale = float(spec.sigma(np.array([y0]))[0]) / y0
    if abs(sp) < 1e-12 * scale:
        raise VegaUndefined("sigma'(y0) = 0; vega via the chain rule does not exist")
    return delta_value / sp


def theta(y0: float, contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients) -> float:
    """Series Theta (calendar-time derivative) at (y0, 0)."""
    fn = np.array([p.f_n for p in pairs])
    lam = np.array([p.lam for p in pairs])
    phis = _phi_at(pairs, np.array([y0]), c.mesh)[:, 0]
    if contract.rebate == 0.0:
        return float(np.sum(fn * lam * phis * np.exp(-lam * contract.T)))
    dn, sn, _ = _rebate_decomposition(contract, pairs, c)
    decay = np.exp(-lam * contract.T)
    return float(np.sum((dn * lam - sn) * decay * phis))


def contribution(
    n1: int,
    n2: int,
    y0: float,
    t: float,
    contract: OptionContract,
    pairs: list[EigenPair],
    c: SLCoefficients,
) -> float:
    """Partial sum of the pricing series over eigenindices n1..n2 at (y0, t)."""
    if not (1 <= n1 <= n2 <= len(pairs)):
        raise ValueError(f"band {n1}-{n2} outside the retained 1..{len(pairs)} pairs")
    sel = pairs[n1 - 1 : n2]
    fn = np.array([p.f_n for p in sel])
    lam = np.array([p.lam for p in sel])
    phis = _phi_at(sel, np.array([y0]), c.mesh)[:, 0]
    return float(np.sum(fn * phis * np.exp(-lam * (contract.T - t))))


def contribution_report(
    bands: list[tuple],
    y0: float,
    t: float,
    contract: OptionContract,
    pairs: list[EigenPair],
    c: SLCoefficients,
) -> ContributionReport:
    """Contributions for explicit (n1, n2) bands; n2 = None runs to the last pair."""
    rows = []
    total = 0.0
    for n1, n2 in bands:
        hi = len(pairs) if n2 is None else min(n2, len(pairs))
        if n1 > len(pairs):
            rows.append((n1, n2, 0.0))
            continue
        val = contribution(n1, hi, y0, t, contract, pairs, c)
        rows.append((n1, n2, val))
        total += val
    return ContributionReport(bands=tuple(rows), total=total)


def _rebate_decomposition(
    contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients
):
    """Fourier data for the homogenized problem with Dirichlet R at U.

    Subtracting the linear interpolant lin(y) = R (y-L)/(U-L) zeroes the
    boundary values; the PDE then gains the constant-in-time source
    s = A lin, handled exactly per mode.  Returns (d_n, s_n, lin values).
    """
    if c.spec is None:
        raise ValueError("rebate pricing needs the model attached to the coefficients")
    mesh = c.mesh
    y = mesh.points
    R = contract.rebate
    lin = R * (y - contract.L) / (contract.U - contract.L)
    f = payoff_grid(contract, mesh)
    d = GridFunction(mesh, f.values - lin)
    mu = drift_of(c.spec)(y)
    kill = np.asarray(c.spec.rbar(y), dtype=float) + np.asarray(c.spec.hazard(y), dtype=float)
    source = R / (contract.U - contract.L) * mu * y - kill * lin
    s = GridFunction(mesh, source)
    dn = np.array([inner_product(d, p.phi, c.w) / p.norm_sq for p in pairs])
    sn = np.array([inner_product(s, p.phi, c.w) / p.norm_sq for p in pairs])
    return dn, sn, lin


def rebate_value(y, t: float, contract: OptionContract, pairs: list[EigenPair], c: SLCoefficients):
    """Value of a contract paying R on upper knock-out (reduces to value at R=0)."""
    if contract.rebate == 0.0:
        return value(y, t, contract, pairs, c)
    dn, sn, _ = _rebate_decomposition(contract, pairs, c)
    lam = np.array([p.lam for p in pairs])
    tau = contract.T - t
    coef = dn * np.exp(-lam * tau) + sn / lam * (1.0 - np.exp(-lam * tau))
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    phis = _phi_at(pairs, y_arr, c.mesh)
    lin_at = contract.rebate * (y_arr - contract.L) / (contract.U - contract.L)
    out = np.tensordot(coef, phis, axes=(0, 0)) + lin_at
    return out if np.ndim(y) else float(out[0])
