"""States, entropies, and the trace-norm distance.

Walks through the core value types: density operators, tensor products,
partial traces, von Neumann entropy (base 2), and the unnormalized trace
norm used as the secrecy metric throughout the library.
"""

import numpy as np

from pubpriv import (
    DensityOperator,
    maximally_correlated_state,
    partial_trace,
    tensor,
    trace_norm_distance,
    von_neumann_entropy,
)

# Pure states carry no entropy; the maximally mixed qubit carries one bit.
ket0 = DensityOperator.basis_state(0, 2)
mixed = DensityOperator.maximally_mixed(2)
print("S(|0><0|)      =", von_neumann_entropy(ket0))
print("S(I/2)         =", von_neumann_entropy(mixed))
print("S(diag(.25,.75)) =", von_neumann_entropy(DensityOperator.diagonal([0.25, 0.75])))

# The trace norm distance ranges over [0, 2]; orthogonal states sit at 2.
print("\n||rho - rho||_1          =", trace_norm_distance(mixed, mixed))
print("|| |0><0| - |1><1| ||_1  =", trace_norm_distance(ket0, DensityOperator.basis_state(1, 2)))
print("|| I/2 - |0><0| ||_1     =", trace_norm_distance(mixed, ket0))

# A shared coin that an eavesdropper knows nothing about is the static
# version of a private channel: the maximally correlated state.
key = maximally_correlated_state(2)
print("\nmaximally correlated pair, d=2:")
print(np.round(key.matrix.real, 3))
print("S of the pair    =", von_neumann_entropy(key))

# Each party alone sees a fair coin.
alice = partial_trace(key, keep=[0], dims=[2, 2])
print("Alice's marginal =", np.round(alice.matrix.real, 3).tolist())

# Entropy is additive on independent systems.
product = tensor(mixed, DensityOperator.diagonal([0.25, 0.75]))
print("\nS(I/2 ⊗ diag(.25,.75)) =", von_neumann_entropy(product))
print("sum of the parts       =",
      von_neumann_entropy(mixed) + von_neumann_entropy(DensityOperator.diagonal([0.25, 0.75])))
