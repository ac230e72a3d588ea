"""Coefficient functions alpha_n, beta_n of the Bessel-series representation.

The eigenfunctions are sin(omega l)/rho plus a series of spherical Bessel
terms whose y-dependent coefficients alpha_n do not depend on omega; the
derivative representation uses companions beta_n.  Both are computed in
the scaled form A_n = l^n alpha_n, B_n = l^n beta_n by a two-step integral
recurrence, then divided back with near-left-endpoint cleanup (the raw
quotient is dominated by quadrature noise where l^n is tiny).  Four
closed-form sum identities serve as a self-test and pick the truncation
order: the partial-sum residual stops improving once the retained orders
exhaust the representation's accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .mesh import GridFunction, Mesh, cumulative_integral, derivative_values
from .model import SLCoefficients
from .spps import FormalPowerTable, ParticularSolution

DEFAULT_ORDER_CAP = 60
DEFAULT_EDGE_FRACTION = 0.01  # Remark-style cleanup neighborhood, as a fraction of U-L


@dataclass(frozen=True)
class RecurrenceIntermediates:
    """Cumulative integrals feeding one recurrence step; both vanish at L."""

    theta_tilde: np.ndarray
    eta_tilde: np.ndarray


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the four coefficient-sum identities.

    residual_by_order[m, i] is the sup-norm residual of identity i when the
    sums are truncated at coefficient order m.  Identities are ordered:
    sum alpha, alternating sum alpha, sum beta, alternating sum beta (the
    beta columns are NaN when beta coefficients were not built).
    """

    residual_by_order: np.ndarray
    pointwise: tuple
    suggested_order: int


@dataclass(frozen=True)
class NSBFCoefficients:
    """alpha/beta families (rows indexed by order) with their scaled forms."""

    mesh: Mesh
    alpha: np.ndarray
    A: np.ndarray
    G1: GridFunction
    G2: GridFunction
    h_tilde: float
    M_trunc: int
    beta: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    check_residuals: Optional[tuple] = None
    residual_by_order: Optional[np.ndarray] = None
    suggested_order: Optional[int] = None

    @property
    def max_residual(self) -> float:
        if self.check_residuals is None:
            return float("nan")
        return float(max(np.max(r) for r in self.check_residuals if r is not None))


def compute_G2(c: SLCoefficients) -> GridFunction:
    """G2 in the integrated-by-parts form (no second derivative of rho)."""
    rho, rho_p, w, q = c.rho.values, c.rho_prime.values, c.w.values, c.q.values
    boundary = rho * rho_p / (2.0 * w)
    tail = 0.5 * cumulative_integral(c.mesh, q / rho**2 + rho_p**2 / w)
    return GridFunction(c.mesh, boundary - boundary[0] + tail)


def compute_G2_unintegrated(c: SLCoefficients) -> GridFunction:
    """Direct form of G2 with the nested derivative; dual route for testing."""
    rho, p = c.rho.values, c.p.values
    inner = derivative_values(c.mesh, 1.0 / rho)
    bracket = derivative_values(c.mesh, p * inner)
    integrand = (c.q.values / rho - bracket) / rho
    return GridFunction(c.mesh, 0.5 * cumulative_integral(c.mesh, integrand))


def compute_h_tilde(sol: ParticularSolution, c: SLCoefficients) -> float:
    """h-tilde = sqrt(p(L)/w(L)) (g'(L)/g(L) + rho'(L)/rho(L)).

    This is the slope at zero of the transmuted particular solution
    rho*g in the Liouville variable; the alternating coefficient-sum
    identity pins it unambiguously.
    """
    p0, w0 = c.p.values[0], c.w.values[0]
    rho0 = c.rho.values[0]
    g0, gp0 = sol.g.values[0], sol.g_prime.values[0]
    return float(np.sqrt(p0 / w0) * (gp0 / g0 + c.rho_prime.values[0] / rho0))


def recover_row(A_row: np.ndarray, l: np.ndarray, n: int, n_edge: int) -> np.ndarray:
    """alpha_n = A_n / l^n with the near-L cleanup.

    The first node (l = 0) is zero by continuity.  Within the first n_edge
    nodes the quotient is set to zero up to the argmin of its magnitude:
    values before the crescent region are numerical noise amplified by the
    division.
    """
    if n == 0:
        return A_row.copy()
    out = np.zeros_like(A_row)
    ln = l[1:] ** n
    safe = ln > 1e-300
    out[1:] = np.where(safe, A_row[1:] / np.where(safe, ln, 1.0), 0.0)
    if n_edge >= 2:
        k0 = 1 + int(np.argmin(np.abs(out[1:n_edge])))
        out[:k0] = 0.0
    return out


def recover_alpha_beta(
    A: np.ndarray, B: Optional[np.ndarray], l: np.ndarray, n_edge: int
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Divide the scaled families by l^n row-wise with the cleanup rule."""
    alpha = np.empty_like(A)
    for n in range(A.shape[0]):
        alpha[n] = recover_row(A[n], l, n, n_edge)
    beta = None
    if B is not None:
        beta = np.empty_like(B)
        for n in range(B.shape[0]):
            beta[n] = recover_row(B[n], l, n, n_edge)
    return alpha, beta


@dataclass(frozen=True)
class InitialCoefficients:
    """Orders 0 and 1 of both families, in plain and scaled form."""

    alpha0: np.ndarray
    alpha1: np.ndarray
    beta0: Optional[np.ndarray]
    beta1: Optional[np.ndarray]
    A0: np.ndarray
    A1: np.ndarray
    B0: Optional[np.ndarray]
    B1: Optional[np.ndarray]


def initial_coefficients(
    sol: ParticularSolution,
    c: SLCoefficients,
    powers: FormalPowerTable,
    G2: np.ndarray,
    h_tilde: float,
    n_edge: int,
    with_beta: bool = True,
) -> InitialCoefficients:
    """Seed values for the recurrence.

    alpha0 = (g - 1/rho)/2 and A1 = (3/2)(Phi1 - l/rho) need no division;
    alpha1 and beta1 come from the machine-safe recovery.  B1 is assembled
    in a form with the near-L cancellations done symbolically (the raw
    beta1 display divides 0/0 quantities at the left endpoint).
    """
    l, rho, rho_p = c.l.values, c.rho.values, c.rho_prime.values
    p, w = c.p.values, c.w.values
    g, g_p = sol.g.values, sol.g_prime.values
    sqrt_pw = np.sqrt(p / w)
    sqrt_wp = 1.0 / sqrt_pw

    A0 = 0.5 * (g - 1.0 / rho)
    alpha0_prime = 0.5 * (g_p + rho_p / rho**2)
    A1 = 1.5 * (powers.Phi[1] - l / rho)
    alpha1 = recover_row(A1, l, 1, n_edge)

    B0 = B1 = beta1 = None
    if with_beta:
        G1 = h_tilde + G2
        B0 = sqrt_pw * (alpha0_prime + rho_p / rho * A0) - G1 / (2.0 * rho)
        phi1_prime = g_p * powers.Y[1] + 1.0 / (g * p)
        l_alpha1_prime = (
            1.5 * (phi1_prime - sqrt_wp * (2.0 * alpha1 / 3.0 + 1.0 / rho))
            + 1.5 * rho_p * l / rho**2
        )
        B1 = alpha1 + sqrt_pw * (l_alpha1_prime + rho_p / rho * A1) - 1.5 * l * G2 / rho
        beta1 = recover_row(B1, l, 1, n_edge)

    return InitialCoefficients(
        alpha0=A0, alpha1=alpha1, beta0=B0, beta1=beta1, A0=A0, A1=A1, B0=B0, B1=B1
    )


def recurrence_step(
    n: int,
    A_prev: np.ndarray,
    B_prev: Optional[np.ndarray],
    c: SLCoefficients,
    sol: ParticularSolution,
) -> tuple[np.ndarray, Optional[np.ndarray], RecurrenceIntermediates]:
    """One step of the order-raising recurrence (n >= 2), from order n-2."""
    if n < 2:
        raise ValueError("recurrence starts at n = 2")
    mesh = c.mesh
    l, rho, rho_p = c.l.values, c.rho.values, c.rho_prime.values
    g, g_p = sol.g.values, sol.g_prime.values
    sqrt_wp = np.sqrt(c.w.values / c.p.values)
    gp_rho = g_p * rho + g * rho_p

    eta = cumulative_integral(
        mesh, (l * gp_rho + (n - 1.0) * rho * g * sqrt_wp) * rho * A_prev
    )
    theta = cumulative_integral(
        mesh, (eta / (rho**2 * g**2) - l * A_prev / g) * sqrt_wp
    )
    front = (2.0 * n + 1.0) / (2.0 * n - 3.0)
    A_n = front * (l**2 * A_prev + 2.0 * (2.0 * n - 1.0) * g * theta)
    B_n = None
    if B_prev is not None:
        sqrt_pw = 1.0 / sqrt_wp
        B_n = front * (
            l**2 * B_prev
            + 2.0 * (2.0 * n - 1.0) * (sqrt_pw * gp_rho * theta / rho + eta / (rho**2 * g))
            - (2.0 * n - 1.0) * l * A_prev
        )
    return A_n, B_n, RecurrenceIntermediates(theta_tilde=theta, eta_tilde=eta)


def check_identities(
    alpha: np.ndarray,
    beta: Optional[np.ndarray],
    c: SLCoefficients,
    h_tilde: float,
    G2: np.ndarray,
) -> IdentityReport:
    """Residuals of the four sum identities for every truncation order.

    Also suggests the truncation: the earliest order whose max residual is
    within a factor two of the best achieved (the curves plateau once the
    retained orders exhaust the attainable accuracy).
    """
    l, rho, w, q, p = (
        c.l.values,
        c.rho.values,
        c.w.values,
        c.q.values,
        c.p.values,
    )
    rho_p = c.rho_prime.values
    bracket = derivative_values(c.mesh, p * (-rho_p / rho**2))

    rhs_a_sum = (2.0 * G2 + h_tilde) * l / (2.0 * rho)
    rhs_a_alt = h_tilde * l / (2.0 * rho)
    rhs_b_sum = l * (
        q / (4.0 * rho * w) - bracket / (4.0 * w) + (h_tilde * G2 + G2**2) / (2.0 * rho)
    )
    rhs_b_alt = l * (
        (q[0] / w[0] - rho[0] / w[0] * bracket[0]) / (4.0 * rho) + h_tilde * G2 / (2.0 * rho)
    )

    n_orders = alpha.shape[0]
    signs = np.where(np.arange(n_orders) % 2 == 0, 1.0, -1.0)[:, None]
    partial_a = np.cumsum(alpha, axis=0)
    partial_a_alt = np.cumsum(alpha * signs, axis=0)
    res = np.full((n_orders, 4), np.nan)
    res[:, 0] = np.max(np.abs(partial_a - rhs_a_sum), axis=1)
    res[:, 1] = np.max(np.abs(partial_a_alt - rhs_a_alt), axis=1)
    pw_beta = (None, None)
    if beta is not None:
        partial_b = np.cumsum(beta, axis=0)
        partial_b_alt = np.cumsum(beta * signs, axis=0)
        res[:, 2] = np.max(np.abs(partial_b - rhs_b_sum), axis=1)
        res[:, 3] = np.max(np.abs(partial_b_alt - rhs_b_alt), axis=1)

    worst = np.nanmax(res, axis=1)
    best = float(np.min(worst))
    suggested = int(np.argmax(worst <= 2.0 * best))

    def _pointwise(m: int):
        out = [
            np.abs(partial_a[m] - rhs_a_sum),
            np.abs(partial_a_alt[m] - rhs_a_alt),
        ]
        if beta is not None:
            out.append(np.abs(partial_b[m] - rhs_b_sum))
            out.append(np.abs(partial_b_alt[m] - rhs_b_alt))
        else:
            out.extend(pw_beta)
        return tuple(out)

    return IdentityReport(
        residual_by_order=res,
        pointwise=_pointwise(suggested),
        suggested_order=suggested,
    )


def build_nsbf_coefficients(
    c: SLCoefficients,
    sol: ParticularSolution,
    powers: FormalPowerTable,
    order: Optional[int] = None,
    order_cap: int = DEFAULT_ORDER_CAP,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
    with_beta: bool = True,
) -> NSBFCoefficients:
    """Run the full coefficient pipeline and pick the truncation order.

    With order=None the recurrence runs to order_cap and the stored arrays
    are truncated at the identity-residual plateau; an explicit order skips
    the search.  with_beta=False runs the price-only reduced path (no beta
    family, no derivative representation).
    """
    mesh = c.mesh
    l = c.l.values

    G2 = compute_G2(c)
    h_t = compute_h_tilde(sol, c)
    G1 = GridFunction(mesh, h_t + G2.values)

    n_orders = (order if order is not None else order_cap) + 1
    n_edge = int(round(edge_fraction * (mesh.M - 1))) + 1

    A = np.zeros((n_orders, mesh.M))
    B = np.zeros((n_orders, mesh.M)) if with_beta else None

    init = initial_coefficients(sol, c, powers, G2.values, h_t, n_edge, with_beta)
    A[0] = init.A0
    if with_beta:
        B[0] = init.B0
    if n_orders > 1:
        A[1] = init.A1
        if with_beta:
            B[1] = init.B1

    for n in range(2, n_orders):
        A[n], B_n, _ = recurrence_step(n, A[n - 2], B[n - 2] if with_beta else None, c, sol)
        if with_beta:
            B[n] = B_n

    alpha, beta = recover_alpha_beta(A, B, l, n_edge)
    report = check_identities(alpha, beta, c, h_t, G2.values)
    m_trunc = order if order is not None else report.suggested_order
    m_keep = m_trunc + 1

    report_at_m = check_identities(alpha[:m_keep], None if beta is None else beta[:m_keep], c, h_t, G2.values)
    return NSBFCoefficients(
        mesh=mesh,
        alpha=alpha[:m_keep],
        A=A[:m_keep],
        beta=None if beta is None else beta[:m_keep],
        B=None if B is None else B[:m_keep],
        G1=G1,
        G2=G2,
        h_tilde=h_t,
        M_trunc=m_trunc,
        check_residuals=report_at_m.pointwise,
        residual_by_order=report.residual_by_order,
        suggested_order=report.suggested_order,
    )


def legendre_coefficient_table(n_max: int) -> np.ndarray:
    """table[k, n] = coefficient of x^k in the Legendre polynomial P_n (exact)."""
    rows = [[Fraction(1)]]
    if n_max >= 1:
        rows.append([Fraction(0), Fraction(1)])
    for n in range(1, n_max):
        pn, pm = rows[n], rows[n - 1]
        new = [Fraction(0)] * (n + 2)
        for k, coeff in enumerate(pn):
            new[k + 1] += Fraction(2 * n + 1, n + 1) * coeff
        for k, coeff in enumerate(pm):
            new[k] -= Fraction(n, n + 1) * coeff
        rows.append(new)
    table = np.zeros((n_max + 1, n_max + 1))
    for n, row in enumerate(rows):
        for k, coeff in enumerate(row):
            table[k, n] = float(coeff)
    return table


@dataclass(frozen=True)
class LegendreTable:
    """Power-basis coefficients of Legendre polynomials, l_coeffs[k, n]."""

    l_coeffs: np.ndarray

    @classmethod
    def build(cls, n_max: int) -> "LegendreTable":
        return cls(l_coeffs=legendre_coefficient_table(n_max))


DIRECT_ALPHA_MAX_ORDER = 8


def direct_alpha(
    n: int,
    table: LegendreTable,
    powers: FormalPowerTable,
    c: SLCoefficients,
) -> GridFunction:
    """alpha_n from the direct Legendre/formal-power formula.

    Only meaningful for small n (the Legendre coefficients grow fast and
    wipe out the significand); serves as an independent cross-check of the
    recurrence away from the left endpoint.
    """
    if n > DIRECT_ALPHA_MAX_ORDER:
        raise ValueError(f"direct formula is numerically meaningless for n > {DIRECT_ALPHA_MAX_ORDER}")
    if n > powers.K or n >= table.l_coeffs.shape[1]:
        raise ValueError("formal powers or Legendre table too short for requested order")
    l, rho = c.l.values, c.rho.values
    l_safe = np.where(l > 0.0, l, 1.0)
    acc = np.zeros(c.mesh.M)
    for k in range(n + 1):
        coeff = table.l_coeffs[k, n]
        if coeff == 0.0:
            continue
        acc += coeff * powers.Phi[k] / l_safe**k
    out = (2.0 * n + 1.0) / 2.0 * (acc - 1.0 / rho)
    if n >= 1:
        out[0] = 0.0  # l(L) = 0; the limit vanishes
    return GridFunction(c.mesh, out)
