"""End-to-end solver: model -> coefficients -> spectrum -> prices.

One DoubleBarrierSolver instance owns the spectral data for a (model,
barrier interval, numerics) triple and prices any number of contracts
against it.  The price-only reduced path skips the beta family and the
eigenfunction derivatives; asking for Greeks builds them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import pricing
from .coefficients import NSBFCoefficients, build_nsbf_coefficients
from .errors import VegaUndefined
from .mesh import Mesh, build_mesh
from .model import DiffusionSpec, SLCoefficients, build_sl_coefficients
from .pricing import ContributionReport, OptionContract, PricingResult
from .spectrum import EigenPair, assemble_pairs, find_eigenvalues
from .spps import ParticularSolution, build_formal_powers, solve_particular


@dataclass(frozen=True)
class NumericsConfig:
    """Discretization and truncation knobs; defaults match the reference tables."""

    mesh_points: int = 10001
    nsbf_order: Optional[int] = None  # None: choose by identity-residual plateau
    nsbf_order_cap: int = 60
    omega_max: float = 15.0
    omega_grid_count: int = 100
    refine_tol: float = 1e-12
    lambda_decay_cap: float = 35.0  # keep lambda_n * T <= cap
    lambda_cutoff: Optional[float] = None  # absolute cutoff lambda_n <= X, overrides the decay rule
    n_max: Optional[int] = None  # explicit eigenterm count override
    spps_tol: float = 1e-14
    spps_max_terms: int = 64
    edge_fraction: float = 0.01


def solve_from_sl(
    sl: SLCoefficients, config: NumericsConfig, with_derivatives: bool = True
) -> tuple[ParticularSolution, NSBFCoefficients, list[EigenPair]]:
    """Coefficient and spectral stages for pre-built Sturm-Liouville data.

    Entry point for synthetic problems and gauge-invariance checks that
    construct or rescale the coefficients directly.
    """
    particular = solve_particular(sl, tol=config.spps_tol, max_terms=config.spps_max_terms)
    powers = build_formal_powers(particular, sl, K=1)
    coeffs = build_nsbf_coefficients(
        sl,
        particular,
        powers,
        order=config.nsbf_order,
        order_cap=config.nsbf_order_cap,
        edge_fraction=config.edge_fraction,
        with_beta=with_derivatives,
    )
    skeletons = find_eigenvalues(
        coeffs, sl, config.omega_max, config.omega_grid_count, config.refine_tol
    )
    pairs = assemble_pairs(skeletons, coeffs, sl, with_derivatives)
    return particular, coeffs, pairs


class DoubleBarrierSolver:
    """Spectral pricer for one diffusion on one barrier interval."""

    def __init__(
        self,
        spec: DiffusionSpec,
        L: float,
        U: float,
        config: NumericsConfig = NumericsConfig(),
    ):
        self.spec = spec
        self.L = float(L)
        self.U = float(U)
        self.config = config
        self.mesh: Optional[Mesh] = None
        self.sl: Optional[SLCoefficients] = None
        self.particular: Optional[ParticularSolution] = None
        self.coeffs: Optional[NSBFCoefficients] = None
        self.pairs: Optional[list[EigenPair]] = None
        self._has_derivatives = False

    def solve(self, with_derivatives: bool = True) -> "DoubleBarrierSolver":
        """Build coefficients, locate the spectrum, assemble eigenfunctions."""
        self.mesh = build_mesh(self.L, self.U, self.config.mesh_points)
        self.sl = build_sl_coefficients(self.spec, self.mesh)
        self.particular, self.coeffs, self.pairs = solve_from_sl(
            self.sl, self.config, with_derivatives
        )
        self._has_derivatives = with_derivatives
        return self

    def _ensure_solved(self, with_derivatives: bool):
        if self.pairs is None or (with_derivatives and not self._has_derivatives):
            self.solve(with_derivatives=with_derivatives)

    def eigenvalues(self) -> np.ndarray:
        self._ensure_solved(False)
        return np.array([p.lam for p in self.pairs])

    def retained_pairs(self, contract: OptionContract) -> list[EigenPair]:
        cfg = self.config
        if contract.rebate != 0.0:
            # the rebate source term decays only like 1/lambda_n, so the
            # exponential-decay truncation does not apply; keep the window
            kept = self.pairs if cfg.n_max is None else self.pairs[: cfg.n_max]
        elif cfg.lambda_cutoff is not None:
            kept = [p for p in self.pairs if p.lam <= cfg.lambda_cutoff] or self.pairs[:1]
            if cfg.n_max is not None:
                kept = kept[: cfg.n_max]
        else:
            kept = pricing.select_pairs(
                self.pairs, contract.T, decay_cap=cfg.lambda_decay_cap, n_max=cfg.n_max
            )
        return pricing.fourier_coefficients(contract, kept, self.sl)

    def _check_contract(self, contract: OptionContract):
        if not (contract.L == self.L and contract.U == self.U):
            raise ValueError("contract barriers differ from the solved interval")

    def price(
        self,
        contract: OptionContract,
        y0: float,
        greeks: bool = False,
        bands: Optional[list[tuple]] = None,
        t: float = 0.0,
    ) -> PricingResult:
        """Price (and optionally Greeks / band contributions) at (y0, t)."""
        self._check_contract(contract)
        self._ensure_solved(greeks)
        pairs = self.retained_pairs(contract)
        px = pricing.value(y0, t, contract, pairs, self.sl)

        d = v = th = None
        if greeks:
            d = pricing.delta(y0, contract, pairs, self.sl)
            th = pricing.theta(y0, contract, pairs, self.sl)
            try:
                v = pricing.vega(y0, d, self.spec)
            except VegaUndefined:
                v = None
        report: Optional[ContributionReport] = None
        if bands is not None:
            report = pricing.contribution_report(bands, y0, t, contract, pairs, self.sl)

        return PricingResult(
            price=px,
            delta=d,
            vega=v,
            theta=th,
            N_used=len(pairs),
            M_used=self.coeffs.M_trunc,
            contributions=report,
            diagnostics=self.diagnostics(),
        )

    def surface(self, contract: OptionContract, t_count: int = 101, y_count: int = 101):
        self._check_contract(contract)
        self._ensure_solved(False)
        pairs = self.retained_pairs(contract)
        return pricing.value_surface(contract, pairs, self.sl, t_count, y_count)

    def diagnostics(self) -> dict:
        res = self.coeffs.check_residuals
        boundary = max(
            abs(p.phi.values[-1]) / np.max(np.abs(p.phi.values)) for p in self.pairs
        )
        out = {
            "mesh_points": self.mesh.M,
            "nsbf_order": self.coeffs.M_trunc,
            "nsbf_suggested_order": self.coeffs.suggested_order,
            "identity_residual_alpha_sum": float(np.max(res[0])),
            "identity_residual_alpha_alt": float(np.max(res[1])),
            "eigenvalues_found": len(self.pairs),
            "max_boundary_residual": float(boundary),
            "spps_terms": self.particular.series_order,
        }
        if res[2] is not None:
            out["identity_residual_beta_sum"] = float(np.max(res[2]))
            out["identity_residual_beta_alt"] = float(np.max(res[3]))
        return out
