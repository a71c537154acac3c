"""One-shot rate region for public/private transmission assisted by a secret key.

For an ensemble {p(x), p(y|x), ρ_{x,y}} and a channel dilation, the three
channel quantities

    a = I(X;B)      public bound
    b = I(Y;B|X)    private ceiling
    c = I(Y;E|X)    leakage to the eavesdropper

carve out the membership rule for a rate triple (R, P, R_S):

    R ≤ a,    P ≤ b,    P ≤ R_S + b - c.

The optimizer below searches over ensembles to push a weighted combination
of achieved rates as high as possible. It is a multi-start local search:
every output is a certified lower bound (the witness ensemble is returned
and can be re-checked), never a claim of optimality. Only the single-use
(one-shot) region is evaluated; regularized multi-letter unions are out of
scope, so every reported point is a one-shot lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .channels import IsometricExtension
from .entropics import (
    InputEnsemble,
    build_cq_state,
    cond_mutual_info_YB_given_X,
    cond_mutual_info_YE_given_X,
    mutual_info_XB,
    mutual_info_XE,
)
from .errors import DimensionError, ValidationError
from .qcore import DensityOperator

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class RateTriple:
    """(public rate R, private rate P, key consumption rate R_S), all in bits/use."""

    R: float
    P: float
    R_S: float

    def __post_init__(self):
        if min(self.R, self.P, self.R_S) < -1e-12:
            raise ValidationError(f"rates must be nonnegative, got {self}")


@dataclass(frozen=True, eq=False)
class RegionConstraints:
    """Evaluated bounds (a, b, c) together with the ensemble that produced them."""

    a: float
    b: float
    c: float
    ensemble: InputEnsemble | None = None

    def __post_init__(self):
        if min(self.a, self.b, self.c) < -1e-12:
            raise ValidationError(f"constraints must be nonnegative, got ({self.a}, {self.b}, {self.c})")


class SkpPair(NamedTuple):
    """Key-assisted private-only bounds: P ≤ i_yb and P ≤ i_yb - i_ye + R_S."""

    i_yb: float
    i_ye: float


class DevetakRates(NamedTuple):
    """Rates of the unassisted private-coding protocol.

    ``public_relative`` is usable only when the public variable is uniformly
    distributed (it doubles as the randomization that scrambles the
    eavesdropper); ``private`` is the net private rate, clamped at zero.
    """

    public_relative: float
    private: float


def one_shot_constraints(ens: InputEnsemble, iso: IsometricExtension) -> RegionConstraints:
    """Evaluate (a, b, c) = (I(X;B), I(Y;B|X), I(Y;E|X)) for one ensemble."""
    s = build_cq_state(ens, iso)
    return RegionConstraints(
        a=mutual_info_XB(s),
        b=cond_mutual_info_YB_given_X(s),
        c=cond_mutual_info_YE_given_X(s),
        ensemble=ens,
    )


def is_in_one_shot_region(t: RateTriple, rc: RegionConstraints, tol: float = MEMBERSHIP_TOL) -> bool:
    """Membership test R ≤ a, P ≤ b, P ≤ R_S + b - c (each up to tol)."""
    return (
        t.R <= rc.a + tol
        and t.P <= rc.b + tol
        and t.P <= t.R_S + rc.b - rc.c + tol
    )


def skp_constraints(ens: InputEnsemble, iso: IsometricExtension) -> SkpPair:
    """Private-only reduction: requires a trivial X register (|X| = 1).

    Computed by promoting Y to the outer classical index, so the pair
    (I(Y;B), I(Y;E)) comes from a genuinely different summation path than
    one_shot_constraints with |X| = 1 — the two must agree to ~1e-12.
    """
    if ens.size_x != 1:
        raise DimensionError(f"skp_constraints needs |X| = 1, got {ens.size_x}")
    flipped = InputEnsemble.over_x(ens.p_y_given_x[0], list(ens.rho_xy[0]))
    s = build_cq_state(flipped, iso)
    return SkpPair(i_yb=mutual_info_XB(s), i_ye=mutual_info_XE(s))


def devetak_rates(ens: InputEnsemble, iso: IsometricExtension) -> DevetakRates:
    """Public (relative) and private rates of the unassisted private protocol.

    Requires a trivial Y register (|Y| = 1): the ensemble is {p(x), σ_x}.
    Nominally the protocol emits I(X;E) bits of uniform public randomization
    and I(X;B) - I(X;E) private bits; since every emitted bit must also be
    decodable by the receiver, the public rate is capped at I(X;B) (a channel
    whose receiver sees nothing transmits nothing, however much leaks to the
    eavesdropper) and the private rate is clamped at zero.
    """
    if ens.size_y != 1:
        raise DimensionError(f"devetak_rates needs |Y| = 1, got {ens.size_y}")
    s = build_cq_state(ens, iso)
    i_xb = mutual_info_XB(s)
    i_xe = mutual_info_XE(s)
    return DevetakRates(public_relative=min(i_xb, i_xe), private=max(0.0, i_xb - i_xe))


# ---------------------------------------------------------------------------
# Ensemble optimizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the multi-start ensemble search.

    ``alphabet_x`` defaults to the sufficiency ceiling min{dim A', dim B}²+1;
    ``alphabet_y`` defaults to (dim A')² — no comparable bound is known for
    Y, so that default is simply a documented choice. States are pure by
    default; set ``pure_states_only=False`` to search mixed states too
    (whether pure states suffice at the boundary is an open question, so
    both modes exist).
    """

    restarts: int = 4
    max_iters: int = 300
    seed: int = 0
    alphabet_x: int | None = None
    alphabet_y: int | None = None
    pure_states_only: bool = True
    convergence_tol: float = 1e-7

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")

    def resolve_alphabets(self, iso: IsometricExtension) -> tuple[int, int]:
        ceiling = min(iso.dim_in, iso.dim_B) ** 2 + 1
        nx = self.alphabet_x if self.alphabet_x is not None else ceiling
        ny = self.alphabet_y if self.alphabet_y is not None else iso.dim_in ** 2
        if nx < 1 or ny < 1:
            raise ValidationError("alphabet sizes must be >= 1")
        return nx, ny


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    """Best ensemble found, its constraints, and the rate triple it certifies."""

    ensemble: InputEnsemble
    constraints: RegionConstraints
    achieved: RateTriple
    objective: float
    converged: bool
    restarts_used: int


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


class _Parametrization:
    """Flat real vector <-> InputEnsemble, split into three coordinate blocks."""

    def __init__(self, nx: int, ny: int, dim: int, pure: bool):
        self.nx, self.ny, self.dim, self.pure = nx, ny, dim, pure
        self.state_len = 2 * dim if pure else 2 * dim * dim
        n_px = nx
        n_py = nx * ny
        n_states = nx * ny * self.state_len
        self.sl_px = slice(0, n_px)
        self.sl_py = slice(n_px, n_px + n_py)
        self.sl_states = slice(n_px + n_py, n_px + n_py + n_states)
        self.total = n_px + n_py + n_states

    def blocks(self) -> list[slice]:
        return [self.sl_px, self.sl_py, self.sl_states]

    def _state(self, raw: np.ndarray) -> DensityOperator:
        d = self.dim
        if self.pure:
            v = raw[:d] + 1j * raw[d:]
            if np.linalg.norm(v) < 1e-9:
                v = np.zeros(d, dtype=complex)
                v[0] = 1.0
            return DensityOperator.pure(v)
        a = (raw[: d * d] + 1j * raw[d * d:]).reshape(d, d)
        m = a @ a.conj().T
        tr = float(np.trace(m).real)
        if tr < 1e-12:
            return DensityOperator.maximally_mixed(d)
        return DensityOperator(m / tr)

    def decode(self, theta: np.ndarray) -> InputEnsemble:
        p_x = _softmax(theta[self.sl_px])
        py = theta[self.sl_py].reshape(self.nx, self.ny)
        p_y_given_x = np.vstack([_softmax(row) for row in py])
        raw = theta[self.sl_states].reshape(self.nx, self.ny, self.state_len)
        states = tuple(
            tuple(self._state(raw[x, y]) for y in range(self.ny)) for x in range(self.nx)
        )
        return InputEnsemble(p_x=p_x, p_y_given_x=p_y_given_x, rho_xy=states)

    def structured_start(self) -> np.ndarray:
        """Uniform weights with computational-basis states |x+y mod d⟩.

        A cheap, channel-agnostic anchor: for many named channels the basis
        ensemble already sits on the region boundary, and the local search
        only has to keep or improve it.
        """
        theta = np.zeros(self.total)
        raw = np.zeros((self.nx, self.ny, self.state_len))
        for x in range(self.nx):
            for y in range(self.ny):
                k = (x + y) % self.dim
                if self.pure:
                    raw[x, y, k] = 1.0
                else:
                    raw[x, y, k * self.dim + k] = 1.0
        theta[self.sl_states] = raw.reshape(-1)
        return theta

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        theta = np.zeros(self.total)
        theta[self.sl_px] = 0.5 * rng.standard_normal(self.nx)
        theta[self.sl_py] = 0.5 * rng.standard_normal(self.nx * self.ny)
        theta[self.sl_states] = rng.standard_normal(self.nx * self.ny * self.state_len)
        return theta


def _achieved_triple(rc: RegionConstraints, r_s: float) -> RateTriple:
    p = max(0.0, min(rc.b, r_s + rc.b - rc.c))
    return RateTriple(R=rc.a, P=p, R_S=r_s)


def optimize_region(
    iso: IsometricExtension,
    r_s: float,
    weights: tuple[float, float],
    cfg: OptimizerConfig,
) -> OptimizeResult:
    """Maximize w_R·R + w_P·P over ensembles at key rate r_s.

    Multi-start coordinate-block refinement: restart 0 starts from the
    structured basis ensemble, the rest from seeded random draws; each
    restart cycles Nelder-Mead over the probability and state blocks until
    the improvement per sweep drops below ``convergence_tol`` or the
    iteration budget runs out (in which case the best point so far is
    returned with ``converged=False``). Identical seed and config give
    bit-identical output; ties between restarts resolve to the lower index.
    """
    w_r, w_p = float(weights[0]), float(weights[1])
    if w_r < 0 or w_p < 0 or (w_r == 0 and w_p == 0):
        raise ValidationError("weights must be nonnegative and not both zero")
    if r_s < 0:
        raise ValidationError("key rate must be nonnegative")
    nx, ny = cfg.resolve_alphabets(iso)
    par = _Parametrization(nx, ny, iso.dim_in, cfg.pure_states_only)

    def score(theta: np.ndarray) -> float:
        rc = one_shot_constraints(par.decode(theta), iso)
        t = _achieved_triple(rc, r_s)
        return w_r * t.R + w_p * t.P

    best_theta = None
    best_val = -np.inf
    any_converged = False
    for restart in range(cfg.restarts):
        if restart == 0:
            theta = par.structured_start()
        else:
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, restart]))
            theta = par.random_start(rng)
        val = score(theta)
        budget = cfg.max_iters
        converged = False
        while budget > 0:
            sweep_start = val
            for sl in par.blocks():
                if budget <= 0:
                    break
                x0 = theta[sl].copy()

                def neg(xb, _sl=sl):
                    t2 = theta.copy()
                    t2[_sl] = xb
                    return -score(t2)

                res = minimize(
                    neg,
                    x0,
                    method="Nelder-Mead",
                    options={
                        "maxiter": min(budget, 40 * max(1, sl.stop - sl.start)),
                        "xatol": 1e-7,
                        "fatol": cfg.convergence_tol / 10.0,
                        "adaptive": True,
                    },
                )
                budget -= max(1, int(res.nit))
                if -res.fun > val:
                    val = -res.fun
                    theta = theta.copy()
                    theta[sl] = res.x
            if val - sweep_start < cfg.convergence_tol:
                converged = True
                break
        any_converged = any_converged or converged
        if val > best_val:
            best_val = val
            best_theta = theta

    ens = par.decode(best_theta)
    rc = one_shot_constraints(ens, iso)
    return OptimizeResult(
        ensemble=ens,
        constraints=rc,
        achieved=_achieved_triple(rc, r_s),
        objective=best_val,
        converged=any_converged,
        restarts_used=cfg.restarts,
    )


@dataclass(frozen=True, eq=False)
class ParetoSample:
    """One optimizer run inside a sweep."""

    r_s: float
    w_r: float
    w_p: float
    result: OptimizeResult


PARETO_CSV_COLUMNS = ("R_S", "w_R", "w_P", "R", "P", "a", "b", "c", "seed", "restarts")


def pareto_surface(
    iso: IsometricExtension,
    r_s_list,
    weight_grid,
    cfg: OptimizerConfig,
) -> list[ParetoSample]:
    """Optimizer sweep over key rates and weight vectors; rows are CSV-emittable."""
    samples = []
    for r_s in r_s_list:
        for (w_r, w_p) in weight_grid:
            res = optimize_region(iso, float(r_s), (float(w_r), float(w_p)), cfg)
            samples.append(ParetoSample(r_s=float(r_s), w_r=float(w_r), w_p=float(w_p), result=res))
    return samples


def pareto_csv_rows(samples: list[ParetoSample], cfg: OptimizerConfig) -> list[tuple]:
    """Rows matching PARETO_CSV_COLUMNS."""
    rows = []
    for s in samples:
        r = s.result
        rows.append(
            (s.r_s, s.w_r, s.w_p, r.achieved.R, r.achieved.P,
             r.constraints.a, r.constraints.b, r.constraints.c, cfg.seed, cfg.restarts)
        )
    return rows
