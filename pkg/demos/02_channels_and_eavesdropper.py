"""Channels, their isometric extensions, and what the eavesdropper sees.

Every channel is a Kraus family; its canonical dilation V = Σ K_i ⊗ |i⟩
sends the input into Bob's system tensored with an environment E that we
hand to Eve. Tracing out E recovers the channel; tracing out Bob gives
Eve's view. The examples below show the two extremes: a channel that leaks
everything about the basis, and one that leaks nothing useful.
"""

import numpy as np

from pubpriv import (
    DensityOperator,
    dephasing_channel,
    depolarizing_channel,
    erasure_channel,
    identity_channel,
    isometric_extension,
    von_neumann_entropy,
)

plus = DensityOperator.pure([1, 1])
ket0 = DensityOperator.basis_state(0, 2)

# The completely dephasing channel copies the basis value into E.
deph = isometric_extension(dephasing_channel(1.0))
print("completely dephasing qubit: dim_E =", deph.dim_E)
print("  Bob's output for |+>    :", np.round(deph.apply(plus).matrix.real, 3).tolist())
print("  Eve's view for |0>      :", np.round(deph.complementary_apply(ket0).matrix.real, 3).tolist())
print("  Eve's view for |+>      :", np.round(deph.complementary_apply(plus).matrix.real, 3).tolist())

# The identity channel has a one-dimensional environment: Eve learns nothing.
ident = isometric_extension(identity_channel(2))
print("\nidentity qubit: dim_E =", ident.dim_E,
      " Eve's state:", ident.complementary_apply(plus).matrix.real.tolist())

# The completely depolarizing channel gives *Bob* nothing...
depol = isometric_extension(depolarizing_channel(1.0))
print("\ncompletely depolarizing: Bob sees",
      np.round(depol.apply(ket0).matrix.real, 3).tolist())
# ...but its complementary channel is far from trivial: Eve holds the
# purification, so her states for |0> and |1> are perfectly distinguishable.
e0 = depol.complementary_apply(DensityOperator.basis_state(0, 2))
e1 = depol.complementary_apply(DensityOperator.basis_state(1, 2))
overlap = np.abs(np.trace(e0.matrix @ e1.matrix))
print("Eve state overlap Tr(e0·e1) =", round(float(overlap), 6), "(0 = orthogonal)")

# Erasure interpolates: with probability p the input is replaced by a flag.
er = erasure_channel(0.25)
out = er.apply(ket0)
print("\nerasure(0.25) on |0>: diag =", np.round(np.diag(out.matrix).real, 3).tolist())
print("erasure(1.0) output entropy:",
      von_neumann_entropy(erasure_channel(1.0).apply(plus)))
