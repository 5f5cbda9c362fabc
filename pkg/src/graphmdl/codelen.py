"""Code-length primitives for MDL scoring of block-model summaries.

Every public function returns bits (log base 2) and treats 0*log(0) as 0.
Complexity sums are accumulated in log-space so that sequence lengths up to
~10**6 stay finite in double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

LN2 = math.log(2.0)

# Constant term of the universal integer code; the remaining terms are the
# iterated binary logarithm summed while positive.
_INT_CODE_CONST = 2.865


def integer_codelen(k: int) -> float:
    """Universal code-length for a positive integer k.

    L(k) = 2.865 + log2(k) + log2(log2(k)) + ..., keeping only the
    strictly positive terms of the iterated logarithm.
    """
    if k < 1:
        raise ValueError(f"integer_codelen requires k >= 1, got {k}")
    total = _INT_CODE_CONST
    term = math.log2(k)
    while term > 0.0:
        total += term
        term = math.log2(term)
    return total


def _log_binom(n, m):
    """log of binomial(n, m) via log-gamma; supports arrays."""
    return gammaln(n + 1.0) - gammaln(m + 1.0) - gammaln(n - m + 1.0)


@lru_cache(maxsize=None)
def _log_multinomial_complexity(n: int, k: int) -> float:
    """Natural log of the multinomial NML normalizer for n trials, k cells.

    Uses the exact O(n) binomial-sum base case for k = 2 and the linear
    recurrence C(n, k) = C(n, k-1) + n/(k-2) * C(n, k-2) for k >= 3,
    carried out entirely in log-space.
    """
    if n < 0:
        raise ValueError(f"sequence length must be >= 0, got {n}")
    if k < 1:
        raise ValueError(f"cell count must be >= 1, got {k}")
    if n == 0 or k == 1:
        return 0.0
    h = np.arange(n + 1, dtype=np.float64)
    log_c2 = logsumexp(_log_binom(float(n), h) + xlogy(h, h / n) + xlogy(n - h, 1.0 - h / n))
    if k == 2:
        return float(log_c2)
    prev2, prev1 = 0.0, float(log_c2)  # C(n, 1), C(n, 2)
    for j in range(3, k + 1):
        prev2, prev1 = prev1, np.logaddexp(prev1, math.log(n) - math.log(j - 2) + prev2)
    return float(prev1)


def multinomial_complexity(n: int, k: int) -> float:
    """Raw multinomial NML normalizer (the sum itself, not its log)."""
    return math.exp(_log_multinomial_complexity(n, k))


def categorical_nml_codelen(counts, k: int) -> float:
    """NML code-length in bits for a categorical sequence given its counts.

    Parameters
    ----------
    counts : sequence of int
        Occupancy of each of the k cells; length must equal k.
    k : int
        Number of cells of the model.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.shape != (k,):
        raise ValueError(f"expected {k} counts, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    n = counts.sum()
    if n == 0:
        return 0.0
    fit = -float(np.sum(xlogy(counts, counts / n))) / LN2
    return fit + _log_multinomial_complexity(int(round(n)), k) / LN2


@lru_cache(maxsize=None)
def bernoulli_nml_complexity(n: int) -> float:
    """log2 of the Bernoulli NML normalizer for n trials (0 for n = 0).

    Evaluated through the falling-factorial expansion
    sum_{i>=0} n!/(n-i)!/n^i, whose terms decay fast enough that the sum
    converges after O(sqrt(n)) terms.
    """
    if n < 0:
        raise ValueError(f"sequence length must be >= 0, got {n}")
    if n == 0:
        return 0.0
    total, term = 1.0, 1.0
    for i in range(1, n + 1):
        term *= (n - i + 1) / n
        total += term
        if term < total * 1e-18:
            break
    return math.log2(total)


def bernoulli_nml_codelen(m: int, n: int) -> float:
    """NML code-length in bits for m ones out of n Bernoulli trials."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if n == 0:
        return 0.0
    fit = -(xlogy(m, m / n) + xlogy(n - m, 1.0 - m / n)) / LN2
    return float(fit) + bernoulli_nml_complexity(n)


def counting_codelen(m: int, n: int) -> float:
    """Two-part counting code: transmit m, then the subset of size m."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    return math.log2(n + 1) + (math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)) / LN2


# ---------------------------------------------------------------------------
# Luckiness NML for Bernoulli data.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaLuckiness:
    """Sparsity-tilted beta weight on the Bernoulli parameter.

    The weight is the Beta(a, b) density multiplied by (1 - rho)**lam, so
    lam = 0 recovers the plain beta prior and larger lam favours smaller
    rho.  The lam-tilt is left unnormalized on purpose: the normalizer
    cancels inside lnml_codelen, while keeping it out of the weight makes
    lnml_complexity strictly decreasing in lam.
    """

    a: float = 0.5
    b: float = 0.5
    lam: float = 1.0

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"beta parameters must be positive, got a={self.a}, b={self.b}")
        if self.lam <= 0:
            raise ValueError(f"luckiness weight must be positive, got lam={self.lam}")


def _log_weight(rho, prior: BetaLuckiness):
    """Natural log of the tilted beta weight; exponent 0 kills log(0)."""
    const = gammaln(prior.a + prior.b) - gammaln(prior.a) - gammaln(prior.b)
    rho = np.asarray(rho, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(prior.a == 1.0, 0.0, (prior.a - 1.0) * np.log(rho))
        e1 = prior.b + prior.lam - 1.0
        right = np.where(e1 == 0.0, 0.0, e1 * np.log1p(-rho))
    return const + left + right


def _penalized_estimates(n: int, prior: BetaLuckiness, m):
    """Maximizer of rho^m (1-rho)^(n-m) * weight(rho) for each m.

    The stationary point (m + a - 1) / (n + a + b + lam - 2) is used
    whenever it is a genuine interior maximizer.  When the rho exponent
    m + a - 1 is negative the penalized likelihood blows up at 0 and we
    clamp to 1/(2n); when the (1-rho) exponent is zero or negative the
    maximum sits at 1 and we clamp to 1 - 1/(2n).  The m = 0, a = 1
    corner is left at the stationary value 0 so that the uniform
    luckiness weight recovers the plain MLE m/n exactly.
    """
    m = np.asarray(m, dtype=np.float64)
    rho_min = 1.0 / (2.0 * n)
    c0 = m + prior.a - 1.0
    c1 = (n - m) + prior.b + prior.lam - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = c0 / (c0 + c1)
    return np.where(c0 < 0.0, rho_min, np.where(c1 <= 0.0, 1.0 - rho_min, interior))


def lnml_estimator(m: int, n: int, prior: BetaLuckiness) -> float:
    """Penalized maximum-likelihood point for m ones in n trials."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    return float(_penalized_estimates(n, prior, m))


def _log_terms(n: int, prior: BetaLuckiness):
    """Natural-log LNML sum terms binom(n,m) * max_rho p(m|rho) w(rho)."""
    m = np.arange(n + 1, dtype=np.float64)
    rho = _penalized_estimates(n, prior, m)
    return _log_binom(float(n), m) + xlogy(m, rho) + xlogy(n - m, 1.0 - rho) + _log_weight(rho, prior)


@lru_cache(maxsize=None)
def lnml_complexity(n: int, prior: BetaLuckiness) -> float:
    """log2 of the luckiness-NML normalizer over n Bernoulli trials.

    May be negative: the tilt shrinks the weighted sum below 1 for large
    lam.  Returns 0 for n = 0.
    """
    if n < 0:
        raise ValueError(f"sequence length must be >= 0, got {n}")
    if n == 0:
        return 0.0
    return float(logsumexp(_log_terms(n, prior))) / LN2


def lnml_codelen(m: int, n: int, prior: BetaLuckiness) -> float:
    """Luckiness-NML code-length in bits for m ones out of n trials.

    With a = b = 1 and lam -> 0 the weight is flat and the value converges
    to bernoulli_nml_codelen(m, n).
    """
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if n == 0:
        return 0.0
    rho = lnml_estimator(m, n, prior)
    fit = xlogy(m, rho) + xlogy(n - m, 1.0 - rho) + _log_weight(rho, prior)
    return -float(fit) / LN2 + lnml_complexity(n, prior)
