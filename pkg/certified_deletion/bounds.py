"""
Closed-form security quantities.

Entropies are in bits; the sampling-lemma exponentials use the natural exp. The certified-deletion bound is
    eta = 2 * (1/2 * sqrt(2^(-g(nu))) + 2 * eps(nu)),  g(nu) = s * (1 - h(delta + nu)) - n,
    eps(nu) = exp(-s k^2 nu^2 / (m (k + 1))),
for any nu in (0, 1/2 - delta].
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from certified_deletion.errors import InfeasibleTargetError, ParameterError
from certified_deletion.hashcode import CODES, DEFAULT_CODE_NAME
from certified_deletion.scheme import SchemeParams

NU_STEP = 1e-3
DEFAULT_CONFIDENCE = 0.99
MAX_PLAN_S = 1 << 20
MAX_PLAN_K = 1 << 20


@dataclass(frozen=True)
class BoundInputs:
    s: int
    k: int
    m: int
    n: int
    delta: float
    nu: float

    def __post_init__(self):
        _check_sizes(self.s, self.k, self.m)
        if not 0.0 <= self.delta < 0.5:
            raise ParameterError("delta must lie in [0, 1/2), got {}".format(self.delta))
        if not 0.0 < self.nu <= 0.5 - self.delta + 1e-12:
            raise ParameterError("nu must lie in (0, 1/2 - delta] = (0, {}], got {}".format(0.5 - self.delta, self.nu))


@dataclass(frozen=True)
class EtaResult:
    eta: float
    g: float
    epsilon: float
    nu: float

    def to_dict(self):
        return {'eta': self.eta, 'g': self.g, 'epsilon': self.epsilon, 'nu_star': self.nu}


@dataclass(frozen=True)
class PlanResult:
    params: SchemeParams
    bound: EtaResult

    def to_dict(self):
        doc = self.bound.to_dict()
        doc['params'] = self.params.to_dict()
        return doc


def binary_entropy(x):
    if not 0.0 <= x <= 1.0:
        raise ParameterError("binary entropy is defined on [0, 1], got {}".format(x))
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def epsilon_nu(s, k, m, nu):
    _check_sizes(s, k, m)
    return math.exp(-s * k * k * nu * nu / (m * (k + 1)))


def serfling_bound(s, k, m, nu):
    _check_sizes(s, k, m)
    return math.exp(-2.0 * nu * nu * s * k * k / (m * (k + 1)))


def eta(s, k, m, n, delta, nu):
    inputs = BoundInputs(s, k, m, n, delta, nu)
    g = inputs.s * (1.0 - binary_entropy(min(inputs.delta + inputs.nu, 0.5))) - inputs.n
    epsilon = epsilon_nu(s, k, m, nu)
    return EtaResult(eta=2.0 * (0.5 * _sqrt_pow2(-g) + 2.0 * epsilon), g=g, epsilon=epsilon, nu=nu)


def optimal_nu(s, k, m, n, delta, step=NU_STEP):
    """Minimizes eta over the grid nu = step, 2*step, ... <= 1/2 - delta."""
    _check_sizes(s, k, m)
    if not 0.0 <= delta < 0.5:
        raise ParameterError("delta must lie in [0, 1/2), got {}".format(delta))
    count = int(math.floor((0.5 - delta) / step + 1e-9))
    if count < 1:
        raise ParameterError("no grid point nu in (0, {}] with step {}".format(0.5 - delta, step))
    nus = step * np.arange(1, count + 1)
    x = np.minimum(delta + nus, 0.5)
    entropy = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    g = s * (1.0 - entropy) - n
    eps = np.exp(-s * k * k * nus * nus / (m * (k + 1)))
    with np.errstate(over='ignore'):
        values = np.sqrt(np.exp2(-g)) + 4.0 * eps
    best = int(np.argmin(values))
    return eta(s, k, m, n, delta, float(nus[best]))


def robustness_bound(tau):
    if tau < 0:
        raise ParameterError("tau must be non-negative, got {}".format(tau))
    return 2.0 ** -tau


def hoeffding_width(trials, confidence=DEFAULT_CONFIDENCE):
    """Half-width of the two-sided Hoeffding interval for a mean of trials Bernoulli samples."""
    if trials < 1:
        raise ParameterError("need at least one trial, got {}".format(trials))
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * trials))


def verification_pass_probability(k, delta, error_rate):
    """Pr[Binom(k, error_rate) < k * delta]: the chance that k independently wrong-with-error_rate bits pass."""
    threshold = k * delta
    max_errors = math.ceil(threshold) - 1
    if max_errors < 0:
        return 0.0
    return float(binom.cdf(max_errors, k, error_rate))


def plan_params(n, delta, target_eta, code=None, logger=None, max_s=MAX_PLAN_S, max_k=MAX_PLAN_K):
    """
    Smallest s (a multiple of the code block) admitting some k with min_nu eta <= target_eta, then the smallest
    such k; tau is the smallest integer with 2^-tau <= target_eta.
    """
    logger = (logger or logging.getLogger(__name__)).getChild("plan_params")
    if not 0.0 < target_eta < 1.0:
        raise ParameterError("target eta must lie in (0, 1), got {}".format(target_eta))
    if not 0.0 <= delta < 0.5:
        raise ParameterError("delta must lie in [0, 1/2), got {}".format(delta))
    code = code if code is not None else CODES[DEFAULT_CODE_NAME]()
    block = code.block_in

    def feasible(s, k):
        return optimal_nu(s, k, s + k, n, delta).eta <= target_eta

    max_blocks = max_s // block
    if not feasible(max_blocks * block, max_k):
        raise InfeasibleTargetError(
            "no parameters with s <= {} and k <= {} reach eta <= {}".format(max_s, max_k, target_eta)
        )

    # eta decreases in both s and k, so feasibility is monotone and binary search finds the minima
    lo, hi = 1, max_blocks
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid * block, max_k):
            hi = mid
        else:
            lo = mid + 1
    s = lo * block
    logger.debug("Smallest feasible s=%d", s)

    lo, hi = 1, max_k
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(s, mid):
            hi = mid
        else:
            lo = mid + 1
    k = lo
    logger.debug("Smallest feasible k=%d for s=%d", k, s)

    tau = max(1, math.ceil(-math.log2(target_eta)))
    params = SchemeParams.build(n=n, s=s, k=k, tau=tau, delta=delta, code=code, security=tau)
    return PlanResult(params, optimal_nu(s, k, s + k, n, delta))


def _sqrt_pow2(exponent):
    """sqrt(2^exponent), saturating to inf instead of overflowing."""
    if exponent / 2.0 > 1023:
        return math.inf
    return 2.0 ** (exponent / 2.0)


def _check_sizes(s, k, m):
    if s < 0 or k < 1 or m != s + k:
        raise ParameterError("need m = s + k with k >= 1 (s={}, k={}, m={})".format(s, k, m))
