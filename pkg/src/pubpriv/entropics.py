"""Classical-quantum states over two classical indices and their mutual informations.

An input ensemble {p(x), p(y|x), ρ_{x,y}} pushed through an isometric
extension yields a block structure: one joint B⊗E state per (x, y) with
weight p(x)p(y|x). The classical registers are kept implicit as block
indices — the full block-diagonal matrix is never materialized, since the
X alphabet alone may be as large as min{dim A', dim B}² + 1.

All quantities are in bits. Tiny negative values (float noise) are clamped
to zero; anything below -1e-6 raises, because that signals a real bug
rather than rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import IsometricExtension
from .errors import DimensionError, ValidationError
from .qcore import DensityOperator, partial_trace, von_neumann_entropy

PROB_TOL = 1e-12
CLAMP_TOL = 1e-6


def _clamp(v: float) -> float:
    if v < -CLAMP_TOL:
        raise ValidationError(f"entropic quantity {v:.3e} below -{CLAMP_TOL:g}; this is a bug, not noise")
    return float(max(0.0, v))


@dataclass(frozen=True, eq=False)
class InputEnsemble:
    """{p(x), p(y|x), ρ_{x,y}} with states on the channel input system."""

    p_x: np.ndarray
    p_y_given_x: np.ndarray
    rho_xy: tuple

    def __post_init__(self):
        px = np.array(self.p_x, dtype=float)
        pyx = np.array(self.p_y_given_x, dtype=float)
        px.flags.writeable = False
        pyx.flags.writeable = False
        object.__setattr__(self, "p_x", px)
        object.__setattr__(self, "p_y_given_x", pyx)
        if px.ndim != 1 or pyx.ndim != 2 or pyx.shape[0] != px.size:
            raise DimensionError(f"shape mismatch: p_x {px.shape}, p_y_given_x {pyx.shape}")
        if np.any(px < -PROB_TOL) or abs(px.sum() - 1.0) > PROB_TOL:
            raise ValidationError("p_x must be a probability vector")
        if np.any(pyx < -PROB_TOL) or np.max(np.abs(pyx.sum(axis=1) - 1.0)) > PROB_TOL:
            raise ValidationError("each row of p_y_given_x must be a probability vector")
        rows = tuple(tuple(row) for row in self.rho_xy)
        object.__setattr__(self, "rho_xy", rows)
        if len(rows) != px.size or any(len(r) != pyx.shape[1] for r in rows):
            raise DimensionError("rho_xy must be an |X| × |Y| array of states")
        dims = {st.dim for row in rows for st in row}
        if len(dims) != 1:
            raise DimensionError(f"all states must share one dimension, got {sorted(dims)}")

    @property
    def size_x(self) -> int:
        return self.p_x.size

    @property
    def size_y(self) -> int:
        return self.p_y_given_x.shape[1]

    @property
    def dim_in(self) -> int:
        return self.rho_xy[0][0].dim

    @classmethod
    def over_x(cls, p_x, states) -> "InputEnsemble":
        """Ensemble with trivial Y: {p(x), σ_x}."""
        return cls(p_x=np.asarray(p_x, float), p_y_given_x=np.ones((len(states), 1)),
                   rho_xy=tuple((s,) for s in states))

    @classmethod
    def over_y(cls, p_y, states) -> "InputEnsemble":
        """Ensemble with trivial X: {p(y), ρ_y}."""
        return cls(p_x=np.ones(1), p_y_given_x=np.asarray(p_y, float).reshape(1, -1),
                   rho_xy=(tuple(states),))


@dataclass(frozen=True, eq=False)
class CqState:
    """Joint B⊗E block per (x, y), plus the classical weights that glue them.

    ``blocks[x][y]`` is the B⊗E output for ρ_{x,y}; its weight is
    p(x)·p(y|x). Blocks with zero weight are stored as None.
    """

    p_x: np.ndarray
    p_y_given_x: np.ndarray
    blocks: tuple
    dim_B: int
    dim_E: int

    @property
    def weights(self) -> np.ndarray:
        return self.p_x[:, None] * self.p_y_given_x


def build_cq_state(ens: InputEnsemble, iso: IsometricExtension) -> CqState:
    """Push every ensemble state through the isometry, keeping the block structure."""
    if ens.dim_in != iso.dim_in:
        raise DimensionError(f"ensemble states have dim {ens.dim_in}, channel expects {iso.dim_in}")
    blocks = []
    for x in range(ens.size_x):
        row = []
        for y in range(ens.size_y):
            w = ens.p_x[x] * ens.p_y_given_x[x, y]
            row.append(iso.evolve(ens.rho_xy[x][y]) if w > 0.0 else None)
        blocks.append(tuple(row))
    total = float((ens.p_x[:, None] * ens.p_y_given_x).sum())
    if abs(total - 1.0) > 1e-10:
        raise ValidationError(f"block weights sum to {total}, expected 1")
    return CqState(p_x=ens.p_x, p_y_given_x=ens.p_y_given_x, blocks=tuple(blocks),
                   dim_B=iso.dim_B, dim_E=iso.dim_E)


def _marginal(block: DensityOperator, s: CqState, system: str) -> np.ndarray:
    keep = [0] if system == "B" else [1]
    return partial_trace(block, keep=keep, dims=[s.dim_B, s.dim_E]).matrix


def _entropy_terms(s: CqState, system: str):
    """Per-(x,y) marginals σ_{x,y}, per-x averages σ_x, and the global average σ."""
    d = s.dim_B if system == "B" else s.dim_E
    sigma_xy = [[None] * s.p_y_given_x.shape[1] for _ in range(s.p_x.size)]
    sigma_x = [None] * s.p_x.size
    sigma = np.zeros((d, d), dtype=np.complex128)
    for x in range(s.p_x.size):
        if s.p_x[x] <= 0.0:
            continue
        acc = np.zeros((d, d), dtype=np.complex128)
        for y in range(s.p_y_given_x.shape[1]):
            w = s.p_y_given_x[x, y]
            if w <= 0.0:
                continue
            m = _marginal(s.blocks[x][y], s, system)
            sigma_xy[x][y] = m
            acc += w * m
        sigma_x[x] = acc
        sigma += s.p_x[x] * acc
    return sigma_xy, sigma_x, sigma


def _S(m: np.ndarray) -> float:
    return von_neumann_entropy(DensityOperator(m, validate=False))


def _holevo(s: CqState, system: str) -> float:
    """I(X;·) = S(σ) - Σ_x p(x) S(σ_x)."""
    _, sigma_x, sigma = _entropy_terms(s, system)
    v = _S(sigma)
    for x in range(s.p_x.size):
        if s.p_x[x] > 0.0:
            v -= s.p_x[x] * _S(sigma_x[x])
    return _clamp(v)


def _cond_info(s: CqState, system: str) -> float:
    """I(Y;·|X) = Σ_x p(x) [S(σ_x) - Σ_y p(y|x) S(σ_{x,y})]."""
    sigma_xy, sigma_x, _ = _entropy_terms(s, system)
    v = 0.0
    for x in range(s.p_x.size):
        if s.p_x[x] <= 0.0:
            continue
        inner = _S(sigma_x[x])
        for y in range(s.p_y_given_x.shape[1]):
            if s.p_y_given_x[x, y] > 0.0:
                inner -= s.p_y_given_x[x, y] * _S(sigma_xy[x][y])
        v += s.p_x[x] * inner
    return _clamp(v)


def _joint_info(s: CqState, system: str) -> float:
    """I(XY;·) with (x, y) treated as a single classical index."""
    sigma_xy, _, sigma = _entropy_terms(s, system)
    v = _S(sigma)
    for x in range(s.p_x.size):
        for y in range(s.p_y_given_x.shape[1]):
            w = s.p_x[x] * s.p_y_given_x[x, y]
            if w > 0.0:
                v -= w * _S(sigma_xy[x][y])
    return _clamp(v)


def mutual_info_XB(s: CqState) -> float:
    """I(X;B) in bits."""
    return _holevo(s, "B")


def mutual_info_XE(s: CqState) -> float:
    """I(X;E) in bits (eavesdropper side)."""
    return _holevo(s, "E")


def cond_mutual_info_YB_given_X(s: CqState) -> float:
    """I(Y;B|X) in bits."""
    return _cond_info(s, "B")


def cond_mutual_info_YE_given_X(s: CqState) -> float:
    """I(Y;E|X) in bits."""
    return _cond_info(s, "E")


def mutual_info_XYB(s: CqState) -> float:
    """I(XY;B) in bits."""
    return _joint_info(s, "B")


def mutual_info_XYE(s: CqState) -> float:
    """I(XY;E) in bits."""
    return _joint_info(s, "E")
