"""Finite-blocklength simulation of secret-key-assisted wiretap codes.

Everything in this module is purely classical: a wiretap triple p(b, e | a)
stands in for the quantum channel, so that random-coding machinery —
pruned (typical-set-conditioned) codeword generation, index one-time-pad
encryption, two-layer code pasting, maximum-likelihood and joint-typicality
decoding, expurgation, and the trace-norm security criterion — is exactly
computable at n ≤ ~12 and Monte-Carlo-estimable beyond. The quantum region
computation and this simulator meet only through shared rate formulas.

Typicality is the entropy-typical window: a sequence is δ-typical when its
empirical surprisal rate -(1/n)·log2 p^n deviates from the source entropy
by at most δ. (Under a uniform source every sequence is typical for any
δ > 0.)

Determinism: codewords are a pure function of (seed, layer, k, m,
rejection round, position) through a counter-based hash, so lazy, eager,
serial and parallel generation all agree bit-for-bit; Monte-Carlo trials
derive their own PRNG stream from (seed, trial index).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from itertools import product as _iproduct

import numpy as np
from scipy.stats import beta as _beta

from .errors import BudgetError, ConfigurationError, DimensionError, ValidationError

PROB_TOL = 1e-12
#: Typicality acceptance probabilities below this are rejected as unusable.
MIN_ACCEPTANCE = 1e-6
#: Largest codeword count (K_pub · M) kept as an in-memory array.
EAGER_WORD_LIMIT = 1 << 20
#: ML decoding budget on K_pub · M.
ML_BUDGET = 1 << 20
#: Exact security enumeration budget on |E|^n.
SECURITY_BUDGET = 1 << 20
#: Joint-typicality scan budget per decode on lazy codebooks.
JT_SCAN_BUDGET = 1 << 21
#: Type-class enumeration budget for exact acceptance probabilities.
TYPE_ENUM_BUDGET = 2_000_000

_TAG_OUTER, _TAG_INNER, _TAG_TRIAL, _TAG_SECURITY, _TAG_PERMSG = 3, 5, 7, 11, 13


# ---------------------------------------------------------------------------
# Channel model
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassicalWiretap:
    """Joint conditional law p(b, e | a) on finite alphabets."""

    p_joint: np.ndarray  # (|A|, |B|, |E|)

    def __post_init__(self):
        t = np.array(self.p_joint, dtype=float)
        if t.ndim != 3:
            raise DimensionError(f"p(b,e|a) needs shape (|A|,|B|,|E|), got {t.shape}")
        if np.any(t < -PROB_TOL):
            raise ValidationError("p(b,e|a) must be nonnegative")
        sums = t.sum(axis=(1, 2))
        if np.max(np.abs(sums - 1.0)) > PROB_TOL:
            raise ValidationError(f"p(b,e|a) must sum to 1 for every a; sums {sums}")
        t.flags.writeable = False
        object.__setattr__(self, "p_joint", t)

    @property
    def size_a(self) -> int:
        return self.p_joint.shape[0]

    @property
    def size_b(self) -> int:
        return self.p_joint.shape[1]

    @property
    def size_e(self) -> int:
        return self.p_joint.shape[2]

    @property
    def p_main(self) -> np.ndarray:
        """Bob's marginal p(b|a)."""
        return self.p_joint.sum(axis=2)

    @property
    def p_eve(self) -> np.ndarray:
        """Eve's marginal p(e|a)."""
        return self.p_joint.sum(axis=1)

    @classmethod
    def from_marginals(cls, p_b_given_a, p_e_given_a) -> "ClassicalWiretap":
        """Conditionally independent outputs: p(b,e|a) = p(b|a)·p(e|a)."""
        pb = np.asarray(p_b_given_a, dtype=float)
        pe = np.asarray(p_e_given_a, dtype=float)
        if pb.ndim != 2 or pe.ndim != 2 or pb.shape[0] != pe.shape[0]:
            raise DimensionError("marginals must be matrices over a common input alphabet")
        return cls(pb[:, :, None] * pe[:, None, :])

    @classmethod
    def bsc_pair(cls, flip_main: float, flip_eve: float) -> "ClassicalWiretap":
        """Binary symmetric main and eavesdropper channels with given flip rates."""
        return cls.from_marginals(bsc(flip_main), bsc(flip_eve))


def bsc(flip: float) -> np.ndarray:
    """Transition matrix of a binary symmetric channel."""
    if not 0.0 <= flip <= 1.0:
        raise ValidationError(f"flip probability must lie in [0,1], got {flip}")
    return np.array([[1.0 - flip, flip], [flip, 1.0 - flip]])


def noiseless(q: int = 2) -> np.ndarray:
    """Identity transition matrix (b = a)."""
    return np.eye(q)


# ---------------------------------------------------------------------------
# Counter-based codeword randomness
# ---------------------------------------------------------------------------
# Rejection sampling must give the same word no matter whether words are
# generated one at a time, in batches, or in parallel; numpy Generator
# streams cannot be vectorized across millions of independent streams, so
# symbols come from a splitmix64 hash of (seed, layer, k, m, round, i).

_C1 = np.uint64(0x9E3779B97F4A7C15)
_C2 = np.uint64(0xBF58476D1CE4E5B9)
_C3 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _C1
        z = (z ^ (z >> np.uint64(30))) * _C2
        z = (z ^ (z >> np.uint64(27))) * _C3
        return z ^ (z >> np.uint64(31))


def _stream_base(seed: int, tag: int, k: int) -> np.uint64:
    h = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    h = _splitmix64(h ^ np.uint64(tag))
    return _splitmix64(h ^ np.uint64(k))


def _uniforms(base: np.uint64, ids: np.ndarray, rnd: int, n: int) -> np.ndarray:
    """(len(ids), n) uniforms in [0,1), pure in (base, id, rnd, position)."""
    ids = ids.astype(np.uint64)
    # pack = id·2^27 + round·2^7 + position: injective for id < 2^37, rnd < 2^20, n <= 128
    pack = (ids[:, None] << np.uint64(27)) | (np.uint64(rnd) << np.uint64(7)) | np.arange(n, dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        h = _splitmix64(base + pack)
    return (h >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def _symbols_from_cdf(u: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    s = np.searchsorted(cdf, u.reshape(-1), side="right").reshape(u.shape)
    return np.minimum(s, cdf.size - 1)


# ---------------------------------------------------------------------------
# Typicality and pruned distributions
# ---------------------------------------------------------------------------


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _log2_multinomial(n: int, counts) -> float:
    v = math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)
    return v / math.log(2.0)


def _window_mass_log2(logs: np.ndarray, n: int, center: float, delta: float,
                      probs: np.ndarray) -> float:
    """log2 of the i.i.d. probability that the empirical surprisal rate lands in the window.

    `logs` are log2-probabilities of the support symbols, `probs` their
    probabilities. Exact by enumeration of type classes.
    """
    q = logs.size
    if math.comb(n + q - 1, q - 1) > TYPE_ENUM_BUDGET:
        raise ConfigurationError(
            f"type enumeration over {q} symbols at n={n} is too large for an exact acceptance probability"
        )
    total = -np.inf
    lp = np.log2(probs)
    for counts in _compositions(n, q):
        cvec = np.asarray(counts, dtype=float)
        surprisal = -float(cvec @ logs) / n
        if abs(surprisal - center) <= delta + 1e-12:
            w = _log2_multinomial(n, counts) + float(cvec @ lp)
            total = np.logaddexp2(total, w)
    return float(total)


@dataclass(frozen=True, eq=False)
class PrunedDistribution:
    """p^n conditioned on the entropy-typical set T_δ.

    ``sample`` rejection-samples i.i.d. sequences until typical;
    ``log2_prob`` evaluates the exact pruned log-probability
    log2[p^n(y^n) / Pr(T_δ)] and returns -inf for sequences outside the
    typical set (the out-of-support marker).
    """

    p: np.ndarray
    n: int
    delta: float
    entropy: float = field(init=False)
    log2_acceptance: float = field(init=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError("p must be a probability vector")
        if self.delta <= 0:
            raise ValidationError("delta must be positive")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "p", p)
        sup = p > 0
        logs = np.log2(p[sup])
        h = float(-(p[sup] * logs).sum())
        object.__setattr__(self, "entropy", h)
        acc = _window_mass_log2(logs, self.n, h, self.delta, p[sup])
        object.__setattr__(self, "log2_acceptance", acc)
        if acc < np.log2(MIN_ACCEPTANCE):
            raise ConfigurationError(
                f"typical-set acceptance 2^{acc:.2f} is below {MIN_ACCEPTANCE:g} at n={self.n}, "
                f"delta={self.delta}; increase delta"
            )

    @property
    def acceptance(self) -> float:
        """Pr[T_δ] under p^n."""
        return float(2.0 ** self.log2_acceptance)

    def surprisal_rates(self, seqs: np.ndarray) -> np.ndarray:
        seqs = np.asarray(seqs)
        with np.errstate(divide="ignore"):
            l = -np.log2(self.p)
        return l[seqs].sum(axis=-1) / self.n

    def is_typical(self, seqs: np.ndarray) -> np.ndarray:
        """Vectorized membership test; accepts (..., n) index arrays."""
        return np.abs(self.surprisal_rates(seqs) - self.entropy) <= self.delta + 1e-12

    def log2_prob(self, seq) -> float:
        """Pruned log2-probability; -inf marks sequences outside T_δ."""
        seq = np.asarray(seq)
        if not bool(self.is_typical(seq)):
            return -np.inf
        with np.errstate(divide="ignore"):
            l = np.log2(self.p)
        return float(l[seq].sum() - self.log2_acceptance)

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        """(size, n) typical sequences by rejection from p^n."""
        out = np.empty((size, self.n), dtype=np.intp)
        got = 0
        attempts = 0
        while got < size:
            batch = max(size - got, 16)
            cand = rng.choice(self.p.size, size=(batch, self.n), p=self.p)
            keep = cand[self.is_typical(cand)]
            take = min(keep.shape[0], size - got)
            out[got: got + take] = keep[:take]
            got += take
            attempts += batch
            if attempts > 10_000_000:
                raise ConfigurationError("rejection sampling budget exhausted; increase delta")
        return out


def pruned_distribution(p, n: int, delta: float) -> PrunedDistribution:
    """Sampler plus exact evaluator for p^n conditioned on the δ-typical set."""
    return PrunedDistribution(p=np.asarray(p, dtype=float), n=n, delta=delta)


@dataclass(frozen=True, eq=False)
class _ConditionalPruned:
    """Π_i p(·|x_i) conditioned on conditional entropy-typicality given x^n."""

    table: np.ndarray  # (|X|, |A|) row-stochastic
    x_seq: np.ndarray  # (n,)
    delta: float
    center: float = field(init=False)
    log2_acceptance: float = field(init=False)

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        x = np.array(self.x_seq, dtype=np.intp)
        t.flags.writeable = False
        x.flags.writeable = False
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "x_seq", x)
        n = x.size
        with np.errstate(divide="ignore"):
            lt = np.log2(t)
        h_rows = np.array([-(t[i][t[i] > 0] * lt[i][t[i] > 0]).sum() for i in range(t.shape[0])])
        center = float(h_rows[x].sum() / n)
        object.__setattr__(self, "center", center)
        # Acceptance: group positions by x value, enumerate per-group types,
        # combine across groups (the surprisal sum splits by group).
        groups = []
        enum_size = 1
        for xv in sorted(set(int(v) for v in x)):
            cnt = int((x == xv).sum())
            sup = t[xv] > 0
            q = int(sup.sum())
            enum_size *= math.comb(cnt + q - 1, q - 1)
            groups.append((cnt, np.log2(t[xv][sup]), t[xv][sup]))
        if enum_size > TYPE_ENUM_BUDGET:
            raise ConfigurationError("conditional type enumeration too large for exact acceptance")
        total = -np.inf
        per_group = [list(_compositions(cnt, logs.size)) for cnt, logs, _ in groups]
        for combo in _iproduct(*per_group):
            surp = 0.0
            logw = 0.0
            for (cnt, logs, probs), counts in zip(groups, combo):
                cvec = np.asarray(counts, dtype=float)
                surp += -float(cvec @ logs)
                logw += _log2_multinomial(cnt, counts) + float(cvec @ np.log2(probs))
            if abs(surp / n - center) <= self.delta + 1e-12:
                total = np.logaddexp2(total, logw)
        object.__setattr__(self, "log2_acceptance", float(total))
        if self.log2_acceptance < np.log2(MIN_ACCEPTANCE):
            raise ConfigurationError(
                f"conditional typical-set acceptance 2^{self.log2_acceptance:.2f} below {MIN_ACCEPTANCE:g}; "
                f"increase delta"
            )

    @property
    def n(self) -> int:
        return self.x_seq.size

    def is_typical(self, seqs: np.ndarray) -> np.ndarray:
        seqs = np.asarray(seqs)
        with np.errstate(divide="ignore"):
            lt = -np.log2(self.table)
        rate = lt[self.x_seq, seqs].sum(axis=-1) / self.n
        return np.abs(rate - self.center) <= self.delta + 1e-12


# ---------------------------------------------------------------------------
# Code configuration and codebooks
# ---------------------------------------------------------------------------

DECODERS = ("ML", "joint_typicality")


@dataclass(frozen=True)
class CodeConfig:
    """Block length, message-set sizes, typicality window and trial budget.

    Rates are recorded as log2(count)/n; the key count S may not exceed the
    private message count M (the index pad wraps modulo M).
    """

    n: int
    M: int
    S: int = 1
    K_pub: int = 1
    delta: float = 0.2
    seed: int = 0
    decoder: str = "ML"
    trials: int = 100

    def __post_init__(self):
        if not 1 <= self.n <= 128:
            raise ValidationError("n must lie in [1, 128] (codeword stream packing)")
        if not 1 <= self.S <= self.M:
            raise ValidationError(f"need 1 <= S <= M, got S={self.S}, M={self.M}")
        if self.K_pub < 1:
            raise ValidationError("K_pub must be >= 1")
        if self.delta <= 0:
            raise ValidationError("delta must be positive")
        if self.decoder not in DECODERS:
            raise ValidationError(f"decoder must be one of {DECODERS}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")

    @property
    def rate_private(self) -> float:
        return math.log2(self.M) / self.n

    @property
    def rate_key(self) -> float:
        return math.log2(self.S) / self.n

    @property
    def rate_public(self) -> float:
        return math.log2(self.K_pub) / self.n


def encrypt(m: int, s: int, M: int) -> int:
    """Index one-time pad p = (m + s) mod M.

    Injective in s for fixed m and in m for fixed s, which is all the
    decryption identity needs.
    """
    if not 0 <= m < M:
        raise ValidationError(f"message index {m} out of range [0, {M})")
    if not 0 <= s < M:
        raise ValidationError(f"key index {s} out of range [0, {M})")
    return (m + s) % M


def decrypt(p: int, s: int, M: int) -> int:
    """Inverse pad m = (p - s) mod M; decrypt(encrypt(m, s, M), s, M) == m."""
    if not 0 <= p < M:
        raise ValidationError(f"encrypted index {p} out of range [0, {M})")
    if not 0 <= s < M:
        raise ValidationError(f"key index {s} out of range [0, {M})")
    return (p - s) % M


@dataclass(frozen=True)
class GenerationRecord:
    """Pruning and generation bookkeeping for a codebook."""

    acceptance_inner: float
    acceptance_outer: float | None = None
    collision_count: int | None = None
    lazy: bool = False
    expurgation: dict | None = None


@dataclass(frozen=True, eq=False)
class Codebook:
    """Seeded random codebook: outer words x^n(k) and per-k inner words u_p^n.

    Single-layer codebooks (K_pub=1) have no outer words. When the total
    word count exceeds ``EAGER_WORD_LIMIT`` the inner words are not
    materialized; ``word``/``inner_block`` regenerate them on demand from
    the seed (bit-identical to eager generation).
    """

    config: CodeConfig
    input_p: np.ndarray | None  # single-layer law over A
    outer_p: np.ndarray | None  # two-layer p(x)
    cond_table: np.ndarray | None  # two-layer p(a|x)
    outer_words: np.ndarray | None  # (K, n)
    inner_words: np.ndarray | None  # (K, M, n) or None when lazy
    seed: int
    record: GenerationRecord
    _samplers: tuple = field(default=(), repr=False, compare=False)

    @property
    def is_lazy(self) -> bool:
        return self.inner_words is None

    @property
    def two_layer(self) -> bool:
        return self.outer_words is not None

    def inner_block(self, k: int, lo: int, hi: int) -> np.ndarray:
        """Inner words u_p^n(k) for p in [lo, hi)."""
        if self.inner_words is not None:
            return self.inner_words[k, lo:hi]
        sampler = self._samplers[k]
        return _generate_words(sampler, self.seed, _TAG_INNER, k, np.arange(lo, hi, dtype=np.int64))

    def word(self, k: int, p: int) -> np.ndarray:
        """The channel-input word for public message k and inner index p."""
        return self.inner_block(k, p, p + 1)[0]


def _generate_words(sampler, seed: int, tag: int, k: int, ids: np.ndarray) -> np.ndarray:
    """Rejection-sample typical words for the given stream ids (vectorized)."""
    base = _stream_base(seed, tag, k)
    n = sampler.n
    if isinstance(sampler, PrunedDistribution):
        cdfs = np.cumsum(sampler.p)
        per_position = False
    else:
        cdfs = np.cumsum(sampler.table, axis=1)
        per_position = True
    out = np.empty((ids.size, n), dtype=np.intp)
    pending = np.arange(ids.size)
    rnd = 0
    while pending.size:
        u = _uniforms(base, ids[pending], rnd, n)
        if per_position:
            cand = np.empty_like(out[pending])
            for xv in np.unique(sampler.x_seq):
                cols = np.nonzero(sampler.x_seq == xv)[0]
                cand[:, cols] = _symbols_from_cdf(u[:, cols], cdfs[xv])
        else:
            cand = _symbols_from_cdf(u, cdfs)
        ok = sampler.is_typical(cand)
        out[pending[ok]] = cand[ok]
        pending = pending[~ok]
        rnd += 1
        if rnd >= (1 << 20):
            raise ConfigurationError("codeword rejection budget exhausted; increase delta")
    return out


def generate_codebook(cfg: CodeConfig, ch: ClassicalWiretap, outer_p) -> Codebook:
    """Draw a seeded random codebook for the channel.

    Single-layer (K_pub=1): ``outer_p`` is a distribution over the input
    alphabet; M i.i.d. words from the pruned distribution. Two-layer
    (K_pub>1): ``outer_p`` is a pair (p_x, p_a_given_x); K_pub outer words
    come from the pruned p(x)^n and each carries M inner words drawn from
    the conditionally pruned law given its outer word.
    """
    if cfg.K_pub == 1:
        p = np.asarray(outer_p, dtype=float)
        if p.ndim != 1:
            raise DimensionError("single-layer codebooks need a 1-D input distribution")
        if p.size != ch.size_a:
            raise DimensionError(f"input law over {p.size} symbols, channel expects {ch.size_a}")
        pd = pruned_distribution(p, cfg.n, cfg.delta)
        lazy = cfg.M > EAGER_WORD_LIMIT
        inner = None
        collisions = None
        if not lazy:
            inner = _generate_words(pd, cfg.seed, _TAG_INNER, 0, np.arange(cfg.M, dtype=np.int64))[None]
            collisions = int(cfg.M - np.unique(inner[0], axis=0).shape[0])
        rec = GenerationRecord(acceptance_inner=pd.acceptance, collision_count=collisions, lazy=lazy)
        return Codebook(config=cfg, input_p=p, outer_p=None, cond_table=None, outer_words=None,
                        inner_words=inner, seed=cfg.seed, record=rec, _samplers=(pd,))

    try:
        p_x, cond = outer_p
    except (TypeError, ValueError) as exc:
        raise DimensionError("two-layer codebooks need (p_x, p_a_given_x)") from exc
    p_x = np.asarray(p_x, dtype=float)
    cond = np.asarray(cond, dtype=float)
    if cond.ndim != 2 or cond.shape[0] != p_x.size:
        raise DimensionError("p_a_given_x must have one row per outer symbol")
    if cond.shape[1] != ch.size_a:
        raise DimensionError(f"inner law over {cond.shape[1]} symbols, channel expects {ch.size_a}")
    if np.max(np.abs(cond.sum(axis=1) - 1.0)) > PROB_TOL or np.any(cond < -PROB_TOL):
        raise ValidationError("p_a_given_x rows must be probability vectors")
    if cfg.K_pub * cfg.M > EAGER_WORD_LIMIT:
        raise BudgetError(
            f"two-layer codebooks are materialized eagerly; K_pub*M = {cfg.K_pub * cfg.M} "
            f"exceeds {EAGER_WORD_LIMIT}"
        )
    outer_pd = pruned_distribution(p_x, cfg.n, cfg.delta)
    outer_words = _generate_words(outer_pd, cfg.seed, _TAG_OUTER, 0, np.arange(cfg.K_pub, dtype=np.int64))
    samplers = []
    inner = np.empty((cfg.K_pub, cfg.M, cfg.n), dtype=np.intp)
    acc_min = 1.0
    for k in range(cfg.K_pub):
        cp = _ConditionalPruned(table=cond, x_seq=outer_words[k], delta=cfg.delta)
        acc_min = min(acc_min, float(2.0 ** cp.log2_acceptance))
        samplers.append(cp)
        inner[k] = _generate_words(cp, cfg.seed, _TAG_INNER, k, np.arange(cfg.M, dtype=np.int64))
    collisions = int(sum(cfg.M - np.unique(inner[k], axis=0).shape[0] for k in range(cfg.K_pub)))
    rec = GenerationRecord(acceptance_inner=acc_min, acceptance_outer=outer_pd.acceptance,
                           collision_count=collisions, lazy=False)
    return Codebook(config=cfg, input_p=None, outer_p=p_x, cond_table=cond, outer_words=outer_words,
                    inner_words=inner, seed=cfg.seed, record=rec, _samplers=tuple(samplers))


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


def _loglik_table(ch: ClassicalWiretap) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(ch.p_main)


def _jt_tables(codebook: Codebook, ch: ClassicalWiretap):
    """Per-symbol surprisal of the generating tuple law and its entropy."""
    if codebook.two_layer:
        # q(x, a, b); candidate score gathers (x_i, u_i, b_i)
        q = codebook.outer_p[:, None, None] * codebook.cond_table[:, :, None] * ch.p_main[None, :, :]
    else:
        q = codebook.input_p[:, None] * ch.p_main
    with np.errstate(divide="ignore"):
        v = -np.log2(q)
    sup = q > 0
    h = float(-(q[sup] * np.log2(q[sup])).sum())
    return v, h


def decode(b_seq, codebook: Codebook, cfg: CodeConfig, ch: ClassicalWiretap):
    """Estimate (k, p) from a received word.

    ML: argmax of the main-channel likelihood over every (k, p), ties broken
    by the smallest (k, p) lexicographically. joint_typicality: the unique
    candidate whose pair (or triple, two-layer) surprisal rate falls within
    the δ-window; zero or several candidates is a decode failure, returned
    as None and counted as an error by the callers.
    """
    b = np.asarray(b_seq, dtype=np.intp)
    K, M = cfg.K_pub, cfg.M
    if cfg.decoder == "ML":
        if K * M > ML_BUDGET:
            raise BudgetError(f"ML decoding budget exceeded: K_pub*M = {K * M} > {ML_BUDGET}")
        llt = _loglik_table(ch)
        best_val = -np.inf
        best = (0, 0)
        for k in range(K):
            words = codebook.inner_block(k, 0, M)
            with np.errstate(invalid="ignore"):
                ll = llt[words, b[None, :]].sum(axis=1)
            ll = np.where(np.isnan(ll), -np.inf, ll)
            p = int(np.argmax(ll))  # first maximum = lexicographically smallest
            if ll[p] > best_val:
                best_val = ll[p]
                best = (k, p)
        return best

    v, h = _jt_tables(codebook, ch)
    hits = []
    scanned = 0
    chunk = 65536
    for k in range(K):
        x = codebook.outer_words[k] if codebook.two_layer else None
        lo = 0
        while lo < M:
            hi = min(M, lo + chunk)
            words = codebook.inner_block(k, lo, hi)
            if codebook.two_layer:
                score = v[x[None, :], words, b[None, :]].sum(axis=1)
            else:
                score = v[words, b[None, :]].sum(axis=1)
            ok = np.nonzero(np.abs(score / cfg.n - h) <= cfg.delta + 1e-12)[0]
            for idx in ok[:2]:
                hits.append((k, lo + int(idx)))
            if len(hits) >= 2:
                return None
            scanned += hi - lo
            if codebook.is_lazy and scanned >= JT_SCAN_BUDGET and len(hits) <= 1:
                raise BudgetError(
                    "joint-typicality scan budget exhausted on a lazy codebook without resolving "
                    "uniqueness; use ML on a smaller codebook or a larger delta"
                )
            lo = hi
    if len(hits) == 1:
        return hits[0]
    return None


# ---------------------------------------------------------------------------
# Error estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorEstimate:
    """Empirical decode-error rate with an exact (Clopper-Pearson) 95% interval."""

    error: float
    ci_low: float
    ci_high: float
    trials: int
    failures: int


def _binomial_ci(x: int, n: int, conf: float = 0.95):
    alpha = 1.0 - conf
    lo = 0.0 if x == 0 else float(_beta.ppf(alpha / 2.0, x, n - x + 1))
    hi = 1.0 if x == n else float(_beta.ppf(1.0 - alpha / 2.0, x + 1, n - x))
    return lo, hi


def _sample_channel_outputs(rng: np.random.Generator, table: np.ndarray, a_seq: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(table, axis=1)[a_seq]
    u = rng.random(a_seq.size)
    return np.minimum((cdf < u[:, None]).sum(axis=1), table.shape[1] - 1)


def _run_trial(codebook: Codebook, cfg: CodeConfig, ch: ClassicalWiretap, rng: np.random.Generator,
               k: int | None = None):
    """One transmit/decode round; returns (k, p, decoded)."""
    if k is None:
        k = int(rng.integers(cfg.K_pub))
    m = int(rng.integers(cfg.M))
    s = int(rng.integers(cfg.S))
    p = encrypt(m, s, cfg.M)
    a_seq = codebook.word(k, p)
    b_seq = _sample_channel_outputs(rng, ch.p_main, a_seq)
    return k, p, decode(b_seq, codebook, cfg, ch)


def estimate_error(cfg: CodeConfig, ch: ClassicalWiretap, codebook: Codebook) -> ErrorEstimate:
    """Fraction of seeded trials where the decoder misses (k, f(m,s))."""
    failures = 0
    for t in range(cfg.trials):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_TRIAL, t]))
        k, p, got = _run_trial(codebook, cfg, ch, rng)
        if got is None or got != (k, p):
            failures += 1
    lo, hi = _binomial_ci(failures, cfg.trials)
    return ErrorEstimate(error=failures / cfg.trials, ci_low=lo, ci_high=hi,
                         trials=cfg.trials, failures=failures)


def per_message_errors(cfg: CodeConfig, ch: ClassicalWiretap, codebook: Codebook,
                       trials_per_message: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(p_e_pub[k], p_e_priv[k]) estimated with dedicated trials per public message.

    Public error: decoded public index differs (or outright failure).
    Private error: public index right but the inner index wrong.
    """
    t_per = trials_per_message if trials_per_message is not None else cfg.trials
    pub = np.zeros(cfg.K_pub)
    priv = np.zeros(cfg.K_pub)
    for k in range(cfg.K_pub):
        for t in range(t_per):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_PERMSG, k, t]))
            _, p, got = _run_trial(codebook, cfg, ch, rng, k=k)
            if got is None or got[0] != k:
                pub[k] += 1
            elif got[1] != p:
                priv[k] += 1
    return pub / t_per, priv / t_per


# ---------------------------------------------------------------------------
# Security criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecurityReport:
    """Worst-case (over public message and private message) secrecy distances.

    ``full_criterion`` keeps Eve's view joint with the key register;
    ``message_secrecy`` marginalizes the key. Both are unnormalized L1
    distances in [0, 2]. Monte-Carlo mode carries standard errors.
    """

    full_criterion: float
    message_secrecy: float
    mode: str
    std_err_full: float | None = None
    std_err_message: float | None = None


def _eve_product_rows(p_eve: np.ndarray, words: np.ndarray) -> np.ndarray:
    """(M, |E|^n) product distributions of Eve's word-conditioned outputs."""
    m, n = words.shape
    out = np.ones((m, 1))
    for i in range(n):
        out = (out[:, :, None] * p_eve[words[:, i]][:, None, :]).reshape(m, -1)
    return out


def security_distance(codebook: Codebook, cfg: CodeConfig, ch: ClassicalWiretap,
                      mode: str = "exact", messages=None) -> SecurityReport:
    """Exact (enumerated) or importance-sampled secrecy distances.

    Exact mode enumerates Eve's |E|^n outcomes (budget 2^20, with a
    secondary M·|E|^n memory guard). Monte-Carlo mode samples Eve outcomes
    from the reference mixture P̄ and averages |likelihood ratio - 1|, an
    unbiased L1 estimate whose standard error is reported. ``messages``
    restricts the (k, m) pairs probed; by default all pairs are probed,
    which requires an eagerly materialized codebook.
    """
    if mode not in ("exact", "monte_carlo"):
        raise ValidationError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")
    p_eve = ch.p_eve
    n, M, S, K = cfg.n, cfg.M, cfg.S, cfg.K_pub
    if messages is None:
        if codebook.is_lazy:
            raise BudgetError("probing all (k, m) pairs needs an eager codebook; pass `messages`")
        messages = [(k, m) for k in range(K) for m in range(M)]

    if mode == "exact":
        size = ch.size_e ** n
        if size > SECURITY_BUDGET:
            raise BudgetError(f"exact security needs |E|^n <= {SECURITY_BUDGET}, got {size}")
        if M * size > (1 << 24):
            raise BudgetError(f"exact security table M*|E|^n = {M * size} exceeds memory guard {1 << 24}")
        best_full = 0.0
        best_msg = 0.0
        by_k: dict[int, tuple] = {}
        for k, m in messages:
            if k not in by_k:
                w = _eve_product_rows(p_eve, codebook.inner_block(k, 0, M))
                pbar = w.mean(axis=0)
                d_p = np.abs(w - pbar[None, :]).sum(axis=1)
                by_k[k] = (w, pbar, d_p)
            w, pbar, d_p = by_k[k]
            idx = (m + np.arange(S)) % M
            best_full = max(best_full, float(d_p[idx].mean()))
            best_msg = max(best_msg, float(np.abs(w[idx].mean(axis=0) - pbar).sum()))
        return SecurityReport(full_criterion=best_full, message_secrecy=best_msg, mode="exact")

    if codebook.is_lazy:
        raise BudgetError("Monte-Carlo security needs every inner word for the reference mixture; "
                          "lazy codebooks are not supported")
    with np.errstate(divide="ignore"):
        log_eve = np.log(p_eve)
    best_full = (-np.inf, 0.0)
    best_msg = (-np.inf, 0.0)
    for k, m in messages:
        words = codebook.inner_block(k, 0, M)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_SECURITY, k, m]))
        pad_words = words[(m + np.arange(S)) % M]  # row s ↦ word f(m, s)
        r_full = np.empty(cfg.trials)
        r_msg = np.empty(cfg.trials)
        for t in range(cfg.trials):
            s = int(rng.integers(S))
            ref_p = int(rng.integers(M))
            e_seq = _sample_channel_outputs(rng, p_eve, words[ref_p])
            ll_all = log_eve[words, e_seq[None, :]].sum(axis=1)
            log_pbar = float(np.logaddexp.reduce(ll_all)) - math.log(M)
            ll_pad = log_eve[pad_words, e_seq[None, :]].sum(axis=1)
            r_full[t] = abs(math.exp(ll_pad[s] - log_pbar) - 1.0)
            log_q = float(np.logaddexp.reduce(ll_pad)) - math.log(S)
            r_msg[t] = abs(math.exp(log_q - log_pbar) - 1.0)
        for est, holder in ((r_full, "full"), (r_msg, "msg")):
            mean = float(est.mean())
            se = float(est.std(ddof=1) / math.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
            if holder == "full" and mean > best_full[0]:
                best_full = (mean, se)
            if holder == "msg" and mean > best_msg[0]:
                best_msg = (mean, se)
    return SecurityReport(full_criterion=best_full[0], message_secrecy=best_msg[0], mode="monte_carlo",
                          std_err_full=best_full[1], std_err_message=best_msg[1])


# ---------------------------------------------------------------------------
# Expurgation
# ---------------------------------------------------------------------------


def expurgate(codebook: Codebook, per_message_error) -> Codebook:
    """Keep the ceil(K/2) public messages with the smallest summed error.

    ``per_message_error`` is a length-K array of p_e,pub + p_e,priv scores.
    Ties keep the lowest indices. The public-rate loss
    log2(K/ceil(K/2))/n lands in the generation record. K_pub = 1 is a
    no-op with a warning.
    """
    errs = np.asarray(per_message_error, dtype=float)
    K = codebook.config.K_pub
    if errs.shape != (K,):
        raise DimensionError(f"need one error score per public message, got shape {errs.shape}")
    if K == 1:
        warnings.warn("expurgation of a single-public-message codebook is a no-op")
        return codebook
    if codebook.is_lazy:
        raise BudgetError("expurgation needs an eagerly materialized codebook")
    keep_count = math.ceil(K / 2)
    order = np.argsort(errs, kind="stable")  # stable: ties keep lowest index
    kept = np.sort(order[:keep_count])
    rate_loss = math.log2(K / keep_count) / codebook.config.n
    new_cfg = replace(codebook.config, K_pub=keep_count)
    rec = replace(codebook.record,
                  expurgation={"kept": [int(i) for i in kept], "rate_loss_public": rate_loss})
    return Codebook(
        config=new_cfg,
        input_p=codebook.input_p,
        outer_p=codebook.outer_p,
        cond_table=codebook.cond_table,
        outer_words=None if codebook.outer_words is None else codebook.outer_words[kept],
        inner_words=codebook.inner_words[kept],
        seed=codebook.seed,
        record=rec,
        _samplers=tuple(codebook._samplers[i] for i in kept) if codebook.two_layer else codebook._samplers,
    )
