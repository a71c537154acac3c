"""Finite-dimensional density operators and the entropic primitives built on them.

Everything here is exact dense linear algebra on small systems: density
operators are validated Hermitian PSD unit-trace matrices, entropies are
base-2 von Neumann entropies from eigendecompositions, and the distance
measure is the unnormalized trace norm (sum of singular values), which for
two states ranges over [0, 2].

All values are immutable after construction and every operation is a pure
function, so the module is safe to use from any number of threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionError, ValidationError

#: Default tolerance for the structural invariants of a density operator.
VALIDATION_TOL = 1e-10

#: Eigenvalues below this are treated as exact zeros inside entropies.
EIGENVALUE_CLIP = 1e-12

#: Largest composite dimension `tensor` will build before refusing.
MAX_COMPOSITE_DIM = 4096


def _hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M†)/2; counters numerical drift before eigensolves."""
    return (m + m.conj().T) / 2.0


@dataclass(frozen=True)
class SystemLabel:
    """A named subsystem with its dimension, e.g. SystemLabel("B", 2)."""

    name: str
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"system {self.name!r} needs dim >= 1, got {self.dim}")


def composite_dim(labels: list[SystemLabel]) -> int:
    """Dimension of a composite system; label names must be unique."""
    names = [s.name for s in labels]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate system labels in composite: {names}")
    d = 1
    for s in labels:
        d *= s.dim
    return d


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A Hermitian, positive-semidefinite, unit-trace matrix.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix. Copied, cast to complex128 and frozen.
    validate : bool
        When True (default) the three invariants are enforced at tolerance
        ``VALIDATION_TOL``. Internal callers that build intermediate
        unnormalized values may pass False; every public operation returns
        validated states.
    """

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density operator must be square, got shape {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if self.validate:
            herm = np.max(np.abs(m - m.conj().T))
            if herm > VALIDATION_TOL:
                raise ValidationError(f"not Hermitian: max |M - M†| = {herm:.3e}")
            tr = np.trace(m)
            if abs(tr - 1.0) > VALIDATION_TOL:
                raise ValidationError(f"trace is {tr:.12f}, expected 1")
            lo = float(np.linalg.eigvalsh(_hermitize(m)).min())
            if lo < -VALIDATION_TOL:
                raise ValidationError(f"not PSD: smallest eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector) -> "DensityOperator":
        """|ψ⟩⟨ψ| from a (not necessarily normalized) state vector."""
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise ValidationError("cannot normalize the zero vector")
        v = v / nrm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def basis_state(cls, k: int, dim: int) -> "DensityOperator":
        """|k⟩⟨k| on a dim-dimensional system."""
        if not 0 <= k < dim:
            raise DimensionError(f"basis index {k} out of range for dim {dim}")
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[k, k] = 1.0
        return cls(m)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        """I/dim."""
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def diagonal(cls, probs) -> "DensityOperator":
        """Classical distribution embedded as a diagonal state."""
        p = np.asarray(probs, dtype=float)
        return cls(np.diag(p.astype(np.complex128)))


def tensor(a: DensityOperator, b: DensityOperator, max_dim: int = MAX_COMPOSITE_DIM) -> DensityOperator:
    """Kronecker product a ⊗ b.

    Raises CapacityError if the composite dimension would exceed ``max_dim``.
    """
    d = a.dim * b.dim
    if d > max_dim:
        raise CapacityError(f"composite dim {d} exceeds the ceiling {max_dim}")
    return DensityOperator(np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityOperator, keep, dims) -> DensityOperator:
    """Reduced state on the subsystems listed in `keep`.

    Parameters
    ----------
    rho : DensityOperator
        State on the composite whose factor dimensions are ``dims``.
    keep : iterable of int
        Indices (into ``dims``) of the subsystems to retain, in their
        original relative order.
    dims : sequence of int
        Dimension of each tensor factor; their product must equal rho.dim.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    if int(np.prod(dims)) != rho.dim:
        raise DimensionError(f"prod(dims)={int(np.prod(dims))} does not match dim {rho.dim}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    if not keep:
        raise DimensionError("cannot trace out every subsystem")

    t = rho.matrix.reshape(dims + dims)
    # Trace out discarded factors from the right to keep axis bookkeeping simple.
    cur = list(range(n))
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        pos = cur.index(idx)
        t = np.trace(t, axis1=pos, axis2=pos + len(cur))
        cur.pop(pos)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return DensityOperator(t.reshape(d_keep, d_keep))


def _clipped_eigenvalues(rho: DensityOperator) -> np.ndarray:
    m = rho.matrix
    herm = np.max(np.abs(m - m.conj().T))
    if herm > VALIDATION_TOL:
        raise ValidationError(f"not Hermitian within {VALIDATION_TOL:g}: deviation {herm:.3e}")
    lam = np.linalg.eigvalsh(_hermitize(m))
    lam = np.where(lam < EIGENVALUE_CLIP, 0.0, lam)
    return lam


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S(ρ) = -Σ λ log2 λ in bits, with 0·log 0 := 0.

    Eigenvalues below ``EIGENVALUE_CLIP`` are clipped to zero; the result is
    clamped into [0, log2 dim] against float noise.
    """
    lam = _clipped_eigenvalues(rho)
    nz = lam[lam > 0.0]
    s = float(-(nz * np.log2(nz)).sum())
    return max(0.0, s)


def trace_norm_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Unnormalized trace norm ‖ρ - σ‖₁ = Σ |eigenvalues of ρ - σ|.

    This is the convention without the factor 1/2, so orthogonal states are
    at distance 2. Requires equal dimensions.
    """
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    diff = _hermitize(rho.matrix - sigma.matrix)
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def maximally_correlated_state(d: int) -> DensityOperator:
    """(1/d) Σ_k |k⟩⟨k| ⊗ |k⟩⟨k| on a d×d composite.

    The state obtained by measuring both halves of a maximally entangled
    pair in the computational basis; for d=2 it is ½(|00⟩⟨00| + |11⟩⟨11|).
    """
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for k in range(d):
        m[k * d + k, k * d + k] = 1.0 / d
    return DensityOperator(m)
