"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.
"""

import csv
import json
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from pubpriv.channels import (
    cq_embedding_channel,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    isometric_extension,
)
from pubpriv.entropics import (
    InputEnsemble,
    build_cq_state,
    cond_mutual_info_YB_given_X,
    cond_mutual_info_YE_given_X,
    mutual_info_XB,
    mutual_info_XE,
    mutual_info_XYB,
    mutual_info_XYE,
)
from pubpriv.qcore import DensityOperator
from pubpriv.region import OptimizerConfig, one_shot_constraints, optimize_region, pareto_surface, skp_constraints
from pubpriv.resources import (
    ResourceExpr,
    ResourceKind,
    derive_ds03_child,
    derive_otp_combination,
    derive_section3,
)
import pubpriv.wiretap as wt

from conftest import rand_channel, rand_ensemble, rand_simplex

SEED = 2026


def frac(rng, hi=4):
    return Fraction(int(rng.integers(0, hi * 12 + 1)), 12)


def test_criterion_1_chain_rule():
    """Chain-rule identity on 100 random ensembles, B and E sides, 1e-9."""
    t0 = time.monotonic()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        d_in, d_out = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        nx, ny = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        iso = isometric_extension(rand_channel(rng, d_in, d_out, int(rng.integers(1, 4))))
        s = build_cq_state(rand_ensemble(rng, nx, ny, d_in), iso)
        gap_b = abs(mutual_info_XYB(s) - mutual_info_XB(s) - cond_mutual_info_YB_given_X(s))
        gap_e = abs(mutual_info_XYE(s) - mutual_info_XE(s) - cond_mutual_info_YE_given_X(s))
        worst = max(worst, gap_b, gap_e)
        assert gap_b <= 1e-9 and gap_e <= 1e-9
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    print(f"\nCRITERION 1: PASS — chain rule holds on 100 random ensembles "
          f"(worst gap {worst:.2e}, {elapsed:.1f}s)")


def test_criterion_2_degenerate_channels():
    """Identity channel reaches R = P = 1 ± 1e-3; completely depolarizing reaches nothing."""
    t0 = time.monotonic()
    cfg = OptimizerConfig(restarts=2, max_iters=120, seed=SEED, alphabet_x=2, alphabet_y=2)
    iso_id = isometric_extension(identity_channel(2))
    r_pub = optimize_region(iso_id, 0.0, (1.0, 0.0), cfg).achieved.R
    p_priv = optimize_region(iso_id, 0.0, (0.0, 1.0), cfg).achieved.P
    assert abs(r_pub - 1.0) <= 1e-3
    assert abs(p_priv - 1.0) <= 1e-3
    iso_depol = isometric_extension(depolarizing_channel(1.0))
    res = optimize_region(iso_depol, 0.0, (1.0, 1.0),
                          OptimizerConfig(restarts=2, max_iters=60, seed=SEED, alphabet_x=2, alphabet_y=2))
    assert res.achieved.R <= 1e-6 and res.achieved.P <= 1e-6
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"\nCRITERION 2: PASS — identity R={r_pub:.6f}, P={p_priv:.6f}; "
          f"depolarizing rates ≤ 1e-6 ({elapsed:.1f}s)")


def test_criterion_3_key_tradeoff():
    """On the completely dephasing qubit (b = c = 1): P(R_S) = min(1, R_S) ± 1e-2."""
    cfg = OptimizerConfig(restarts=2, max_iters=120, seed=SEED, alphabet_x=2, alphabet_y=2)
    iso = isometric_extension(dephasing_channel(1.0))
    samples = pareto_surface(iso, [0.0, 0.5, 1.0], [(0.0, 1.0)], cfg)
    got = [s.result.achieved.P for s in samples]
    assert np.allclose(got, [0.0, 0.5, 1.0], atol=1e-2)
    print(f"\nCRITERION 3: PASS — dephasing P over R_S∈{{0,0.5,1}} = "
          f"{[round(v, 4) for v in got]}")


def test_criterion_4_skp_reduction():
    """|X|=1 one-shot constraints equal the private-only pair within 1e-12, 50 ensembles."""
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for i in range(50):
        d_in, d_out = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        iso = isometric_extension(rand_channel(rng, d_in, d_out, int(rng.integers(1, 4))))
        ens = rand_ensemble(rng, 1, int(rng.integers(1, 4)), d_in)
        pair = skp_constraints(ens, iso)
        rc = one_shot_constraints(ens, iso)
        worst = max(worst, abs(pair.i_yb - rc.b), abs(pair.i_ye - rc.c))
        assert abs(pair.i_yb - rc.b) <= 1e-12
        assert abs(pair.i_ye - rc.c) <= 1e-12
    print(f"\nCRITERION 4: PASS — private-only reduction matches on 50 ensembles "
          f"(worst gap {worst:.2e})")


def _classical_oracle(p_x, p_y_x, q_a, p_b_a):
    """Direct probability-table mutual informations; Eve's variable is the (a, b) pair."""
    joint = (p_x[:, None, None, None] * p_y_x[:, :, None, None]
             * q_a[:, :, :, None] * p_b_a[None, None, :, :])  # [x, y, a, b]

    def H(table):
        t = np.asarray(table).ravel()
        nz = t[t > 1e-15]
        return float(-(nz * np.log2(nz)).sum())

    h_x = H(joint.sum(axis=(1, 2, 3)))
    h_b = H(joint.sum(axis=(0, 1, 2)))
    h_xb = H(joint.sum(axis=(1, 2)))
    h_xy = H(joint.sum(axis=(2, 3)))
    h_xyb = H(joint.sum(axis=2))
    h_e = H(joint.sum(axis=(0, 1)))        # (a, b) pair
    h_xe = H(joint.sum(axis=1))
    h_xye = H(joint)
    return {
        "I_XB": h_x + h_b - h_xb,
        "I_XE": h_x + h_e - h_xe,
        "I_YB_given_X": h_xy + h_xb - h_x - h_xyb,
        "I_YE_given_X": h_xy + h_xe - h_x - h_xye,
        "I_XYB": h_xy + h_b - h_xyb,
        "I_XYE": h_xy + h_e - h_xye,
    }


def test_criterion_5_classical_oracle_equivalence():
    """cq-embedded classical channels with diagonal inputs match direct table sums, 1e-9."""
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        n_a, n_b = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        nx, ny = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        p_b_a = np.vstack([rand_simplex(rng, n_b) for _ in range(n_a)])
        p_x = rand_simplex(rng, nx)
        p_y_x = np.vstack([rand_simplex(rng, ny) for _ in range(nx)])
        q_a = np.stack([[rand_simplex(rng, n_a) for _ in range(ny)] for _ in range(nx)])
        ens = InputEnsemble(
            p_x=p_x, p_y_given_x=p_y_x,
            rho_xy=tuple(tuple(DensityOperator.diagonal(q_a[x, y]) for y in range(ny))
                         for x in range(nx)),
        )
        s = build_cq_state(ens, isometric_extension(cq_embedding_channel(p_b_a)))
        got = {
            "I_XB": mutual_info_XB(s),
            "I_XE": mutual_info_XE(s),
            "I_YB_given_X": cond_mutual_info_YB_given_X(s),
            "I_YE_given_X": cond_mutual_info_YE_given_X(s),
            "I_XYB": mutual_info_XYB(s),
            "I_XYE": mutual_info_XYE(s),
        }
        want = _classical_oracle(p_x, p_y_x, q_a, p_b_a)
        for key in want:
            gap = abs(got[key] - want[key])
            worst = max(worst, gap)
            assert gap <= 1e-9, f"{key}: quantum {got[key]} vs classical {want[key]}"
    print(f"\nCRITERION 5: PASS — 20 cq-embedded instances match the classical oracle "
          f"(worst gap {worst:.2e})")


def test_criterion_6_resource_derivations():
    """All three derivations end exactly on their target expressions, 20 random rational sets."""
    rng = np.random.default_rng(SEED)
    K = ResourceKind
    for _ in range(20):
        ie = frac(rng)
        ib = ie + frac(rng)
        t = derive_section3(ib, ie)
        assert t.final == ResourceExpr.of((ib, K.PRIVATE_CC))

        a, c = frac(rng), frac(rng)
        b = c + frac(rng)
        t = derive_ds03_child(a, b, c)
        if a == 0 and b == 0:
            assert t.final.terms == ()
        else:
            assert t.final == ResourceExpr.of((b - c, K.PRIVATE_CC), (a, K.PUBLIC_CC),
                                              (1, K.SUBLINEAR_KEY))

        a2, b2, c2 = frac(rng), frac(rng), frac(rng)
        t = derive_otp_combination(a2, b2, c2)
        assert t.final == ResourceExpr.of((a2 + b2, K.PRIVATE_CC))
        assert t.efficiency.key_consumed == a2 + c2
    print("\nCRITERION 6: PASS — section3 / ds03 / otp_combination end expressions exact "
          "on 20 random rational parameter sets")


def test_criterion_7_security_exact_checks():
    """Exact security identities at n ≤ 8."""
    t0 = time.monotonic()
    # (a) full-rate key kills message secrecy for arbitrary codebooks
    for seed, flip_main, eve in ((1, 0.1, 0.2), (2, 0.3, 0.05), (3, 0.0, 0.4)):
        ch = wt.ClassicalWiretap.from_marginals(wt.bsc(flip_main), wt.bsc(eve))
        cfg = wt.CodeConfig(n=8, M=8, S=8, delta=0.8, seed=seed)
        cb = wt.generate_codebook(cfg, ch, [0.5, 0.5])
        rep = wt.security_distance(cb, cfg, ch, mode="exact")
        assert rep.message_secrecy <= 1e-12
    # (b) pure-noise Eve sees nothing, both metrics
    ch = wt.ClassicalWiretap.from_marginals(wt.bsc(0.05), wt.bsc(0.5))
    cfg = wt.CodeConfig(n=8, M=4, S=2, delta=0.8, seed=4)
    cb = wt.generate_codebook(cfg, ch, [0.5, 0.5])
    rep = wt.security_distance(cb, cfg, ch, mode="exact")
    assert rep.full_criterion <= 1e-12 and rep.message_secrecy <= 1e-12
    # (c) noiseless Eve, S=1, M=2, distinct codewords: message secrecy = 2(1 - 1/M) = 1
    ch = wt.ClassicalWiretap.from_marginals(wt.bsc(0.05), wt.noiseless(2))
    cfg = wt.CodeConfig(n=8, M=2, S=1, delta=0.8, seed=5)
    cb = wt.generate_codebook(cfg, ch, [0.5, 0.5])
    assert not np.array_equal(cb.word(0, 0), cb.word(0, 1))
    rep = wt.security_distance(cb, cfg, ch, mode="exact")
    assert abs(rep.message_secrecy - 1.0) <= 1e-12
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    print(f"\nCRITERION 7: PASS — exact security identities at n=8 ({elapsed:.1f}s)")


def test_criterion_8_coding_trend():
    """Below capacity the error is small and shrinks with n; above capacity it collapses."""
    t0 = time.monotonic()
    ch = wt.ClassicalWiretap.from_marginals(wt.bsc(0.05), wt.bsc(0.5))
    errs = []
    for n in (16, 24, 32, 40):
        m = max(2, round(2 ** (0.3 * n)))  # private rate 0.3 < capacity 0.714
        cfg = wt.CodeConfig(n=n, M=m, S=1, delta=0.2, seed=SEED, decoder="ML", trials=500)
        cb = wt.generate_codebook(cfg, ch, [0.5, 0.5])
        errs.append(wt.estimate_error(cfg, ch, cb).error)
    assert errs[-1] <= 0.10
    assert all(b <= a for a, b in zip(errs, errs[1:])), f"not weakly decreasing: {errs}"

    ch_hi = wt.ClassicalWiretap.from_marginals(wt.bsc(0.11), wt.bsc(0.5))
    cfg = wt.CodeConfig(n=40, M=2 ** 36, S=1, delta=0.3, seed=SEED,
                        decoder="joint_typicality", trials=120)
    cb = wt.generate_codebook(cfg, ch_hi, [0.5, 0.5])
    err_hi = wt.estimate_error(cfg, ch_hi, cb).error
    assert err_hi >= 0.50
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    print(f"\nCRITERION 8: PASS — rate 0.3 on BSC(0.05): errors {errs}; "
          f"rate 0.9 on BSC(0.11) at n=40: error {err_hi:.2f} ({elapsed:.1f}s)")


def test_criterion_9_determinism(tmp_path):
    """Identical seeds give byte-identical CSV for region and simulate, twice in a row."""
    def run(args):
        r = subprocess.run([sys.executable, "-m", "pubpriv"] + args,
                           cwd=tmp_path, capture_output=True, text=True, timeout=600)
        assert r.returncode == 0, r.stderr
        return r

    region_args = ["region", "--zoo", "dephasing", "--p", "1.0", "--rs", "0", "0.5",
                   "--weights", "0,1", "--seed", str(SEED), "--alphabet-x", "2",
                   "--alphabet-y", "2", "--restarts", "2", "--max-iters", "100",
                   "--out", "region.csv"]
    run(region_args)
    first = (tmp_path / "region.csv").read_bytes()
    run(region_args)
    assert (tmp_path / "region.csv").read_bytes() == first

    spec = {
        "channel": {"p_main": [[0.95, 0.05], [0.05, 0.95]], "p_eve": [[0.7, 0.3], [0.3, 0.7]]},
        "input_p": [0.5, 0.5],
        "code": {"n": 8, "M": 4, "S": 2, "delta": 0.5, "seed": SEED, "trials": 60},
        "security": "exact",
    }
    (tmp_path / "exp.json").write_text(json.dumps(spec))
    sim_args = ["simulate", "--config", "exp.json", "--out", "sim.csv"]
    run(sim_args)
    first = (tmp_path / "sim.csv").read_bytes()
    run(sim_args)
    assert (tmp_path / "sim.csv").read_bytes() == first
    with open(tmp_path / "sim.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and rows[0]["seed"] == str(SEED)
    print("\nCRITERION 9: PASS — region and simulate CSVs byte-identical across reruns")
