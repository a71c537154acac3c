"""The one-shot public/private rate region and its key trade-off.

For a channel dilation and an input ensemble {p(x), p(y|x), rho_{x,y}},
three numbers pin down the achievable triples (R, P, R_S):

    R <= a = I(X;B),   P <= b = I(Y;B|X),   P <= R_S + b - c,

with c = I(Y;E|X) the leakage. The multi-start optimizer searches
ensembles for the best weighted rate; every answer comes with the witness
ensemble, so it is a certified lower bound on the region.
"""

import csv
import io

import numpy as np

from pubpriv import (
    DensityOperator,
    InputEnsemble,
    OptimizerConfig,
    RateTriple,
    dephasing_channel,
    identity_channel,
    is_in_one_shot_region,
    isometric_extension,
    one_shot_constraints,
    optimize_region,
    pareto_surface,
    skp_constraints,
)
from pubpriv.region import PARETO_CSV_COLUMNS, pareto_csv_rows

ket = DensityOperator.basis_state

# Hand-picked ensemble on the completely dephasing qubit: Eve gets a copy
# of the basis value, so b = c = 1 and private bits cost key one-for-one.
iso = isometric_extension(dephasing_channel(1.0))
ens = InputEnsemble.over_y([0.5, 0.5], [ket(0, 2), ket(1, 2)])
rc = one_shot_constraints(ens, iso)
print(f"dephasing qubit, uniform basis ensemble: a={rc.a:.3f} b={rc.b:.3f} c={rc.c:.3f}")
print("  (0,1,0) in region?", is_in_one_shot_region(RateTriple(0, 1, 0), rc))
print("  (0,1,1) in region?", is_in_one_shot_region(RateTriple(0, 1, 1), rc))
print("  private-only pair:", skp_constraints(ens, iso))

# Let the optimizer find the same boundary on its own.
cfg = OptimizerConfig(restarts=2, max_iters=120, seed=11, alphabet_x=2, alphabet_y=2)
for r_s in (0.0, 0.5, 1.0):
    res = optimize_region(iso, r_s, (0.0, 1.0), cfg)
    print(f"  optimized P at R_S={r_s}: {res.achieved.P:.4f}  (converged={res.converged})")

# The identity channel needs no key at all: P is flat in R_S.
iso_id = isometric_extension(identity_channel(2))
res = optimize_region(iso_id, 0.0, (1.0, 0.0), cfg)
print(f"\nidentity qubit public rate: R = {res.achieved.R:.4f}")

# A small sweep, CSV-ready (this is what the `region` CLI subcommand emits).
samples = pareto_surface(iso, [0.0, 0.25, 0.5, 0.75, 1.0], [(0.0, 1.0)], cfg)
buf = io.StringIO()
w = csv.writer(buf, lineterminator="\n")
w.writerow(PARETO_CSV_COLUMNS)
w.writerows(pareto_csv_rows(samples, cfg))
print("\nkey-rate sweep on the dephasing qubit:")
print(buf.getvalue())
