"""
Monte-Carlo security games.

Every trial draws its randomness from numpy.random.default_rng([seed, trial, b]) (or [seed, trial] when there is
no challenge bit), so results do not depend on how trials are split between worker processes.
"""
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from certified_deletion.bitvec import BitString, restrict
from certified_deletion.bounds import (DEFAULT_CONFIDENCE, hoeffding_width, optimal_nu, robustness_bound,
                                       verification_pass_probability)
from certified_deletion.errors import LengthMismatchError, ParameterError
from certified_deletion.hashcode import ToeplitzHash
from certified_deletion.qsim import NoiseModel
from certified_deletion.scheme import AuxKey, CertifiedDeletionScheme, DecKey
from certified_deletion.strategies import CiphertextView

MAX_ENUMERATION = 1 << 20
SERFLING_BATCH = 10000


def run_game1(params, strategy, b, rng, noise=None, scheme=None):
    """
    One run of the prepare-and-measure certified-deletion game. Returns (ok, b'); b' is 0 whenever the
    certificate is rejected, and the strategy then never sees the key.
    """
    if b not in (0, 1):
        raise ParameterError("challenge bit must be 0 or 1, got {}".format(b))
    scheme = scheme or CertifiedDeletionScheme(params)
    challenger_rng, adversary_rng = rng.spawn(2)

    msg0, state = strategy.phase0(params, adversary_rng)
    if len(msg0) != params.n:
        raise LengthMismatchError("strategy chose a {}-bit message, expected {}".format(len(msg0), params.n))
    aux, key = scheme.keygen(challenger_rng)
    ct = scheme.encrypt(msg0 if b else BitString.zeros(params.n), aux, key)
    if noise is not None:
        noise.apply(ct.quantum, challenger_rng)

    cert, state = strategy.phase1(CiphertextView(ct.quantum), state, adversary_rng)
    ok = scheme.verify(aux, key, cert)
    if not ok:
        return 0, 0
    return ok, int(strategy.phase2(key, ct.classical, state, adversary_rng))


@dataclass(frozen=True)
class GameReport:
    """
    Counts of (ok = 1 and b' = 1) per challenge bit. The gap passes when |p0 - p1| minus the width of the difference
    interval (twice the per-arm Hoeffding width) stays within eta.
    """
    strategy: str
    trials: int
    accepted: tuple
    wins: tuple
    eta: float
    nu_star: float
    confidence: float = DEFAULT_CONFIDENCE
    seed: int = None

    @property
    def width(self):
        return hoeffding_width(self.trials, self.confidence)

    @property
    def p_hat(self):
        return tuple(w / self.trials for w in self.wins)

    @property
    def intervals(self):
        return tuple((max(0.0, p - self.width), min(1.0, p + self.width)) for p in self.p_hat)

    @property
    def gap(self):
        return abs(self.p_hat[0] - self.p_hat[1])

    @property
    def gap_width(self):
        return 2.0 * self.width

    @property
    def violation(self):
        return self.gap - self.gap_width > self.eta

    def to_dict(self):
        return {
            'strategy': self.strategy,
            'trials': self.trials,
            'seed': self.seed,
            'counts': {
                str(b): {'accepted': self.accepted[b], 'wins': self.wins[b]} for b in (0, 1)
            },
            'p_hat': list(self.p_hat),
            'intervals': [list(interval) for interval in self.intervals],
            'confidence': self.confidence,
            'width': self.width,
            'gap': self.gap,
            'gap_width': self.gap_width,
            'eta': self.eta,
            'nu_star': self.nu_star,
            'violation': self.violation,
        }


@dataclass(frozen=True)
class RobustnessReport:
    trials: int
    correct: int
    false_accepts: int
    rejections: int
    correctable_trials: int
    correctable_failures: int
    tau: int
    flip_probability: float

    @property
    def rate(self):
        return self.false_accepts / self.trials

    @property
    def bound(self):
        return robustness_bound(self.tau)

    @property
    def tolerance(self):
        """bound plus three binomial standard deviations at the bound."""
        return self.bound + 3.0 * math.sqrt(self.bound / self.trials)

    @property
    def exceeded(self):
        return self.rate > self.tolerance

    def to_dict(self):
        return {
            'trials': self.trials,
            'flip_probability': self.flip_probability,
            'correct': self.correct,
            'false_accepts': self.false_accepts,
            'rejections': self.rejections,
            'correctable_trials': self.correctable_trials,
            'correctable_failures': self.correctable_failures,
            'rate': self.rate,
            'bound': self.bound,
            'tolerance': self.tolerance,
            'exceeded': self.exceeded,
        }


@dataclass(frozen=True)
class VerificationReport:
    trials: int
    passes: int
    inconsistent: int
    k: int
    delta: float
    flip_probability: float
    confidence: float = DEFAULT_CONFIDENCE

    @property
    def rate(self):
        return self.passes / self.trials

    @property
    def expected(self):
        return verification_pass_probability(self.k, self.delta, self.flip_probability)

    @property
    def width(self):
        return hoeffding_width(self.trials, self.confidence)

    def to_dict(self):
        return {
            'trials': self.trials,
            'flip_probability': self.flip_probability,
            'passes': self.passes,
            'rate': self.rate,
            'expected': self.expected,
            'width': self.width,
            'inconsistent': self.inconsistent,
        }


class GameHarness:
    def __init__(self, params, logger=None, workers=1, noise=None):
        self.params = params
        self.workers = max(1, int(workers))
        self.noise = noise
        self._logger = (logger or logging.getLogger(__name__)).getChild("GameHarness")

    def estimate_gap(self, strategy, trials, seed, confidence=DEFAULT_CONFIDENCE):
        if trials < 1:
            raise ParameterError("need at least one trial per challenge bit, got {}".format(trials))
        accepted, wins = [0, 0], [0, 0]
        for b in (0, 1):
            tasks = [(self.params, strategy, self.noise, seed, b, start, stop) for start, stop in self._chunks(trials)]
            for chunk_accepted, chunk_wins in self._map(_game_chunk, tasks):
                accepted[b] += chunk_accepted
                wins[b] += chunk_wins

        p = self.params
        bound = optimal_nu(p.s, p.k, p.m, p.n, p.delta)
        report = GameReport(strategy.describe(), trials, tuple(accepted), tuple(wins), bound.eta, bound.nu,
                            confidence, seed)
        self._logger.info("Strategy %s over %d trials per arm: p_hat=%s gap=%.6f eta=%.6g violation=%s",
                          report.strategy, trials, report.p_hat, report.gap, report.eta, report.violation)
        return report

    def estimate_robustness(self, trials, seed):
        """Sends each fresh ciphertext through the noise model and decrypts it; counts wrong plaintexts with flag 1."""
        if trials < 1:
            raise ParameterError("need at least one trial, got {}".format(trials))
        noise = self.noise or NoiseModel()
        tasks = [(self.params, noise, seed, start, stop) for start, stop in self._chunks(trials)]
        totals = np.sum(self._map(_robustness_chunk, tasks), axis=0)
        report = RobustnessReport(trials, *(int(t) for t in totals), tau=self.params.tau,
                                  flip_probability=noise.flip_probability)
        self._logger.info("Robustness over %d trials: %d false accepts (rate %.3g, tolerance %.3g)",
                          trials, report.false_accepts, report.rate, report.tolerance)
        if report.correctable_failures:
            self._logger.warning("%d trials with correctable errors did not decrypt", report.correctable_failures)
        return report

    def estimate_verification(self, trials, seed):
        """Honest deletion after the noise model; compares the acceptance rate with the exact binomial value."""
        if trials < 1:
            raise ParameterError("need at least one trial, got {}".format(trials))
        noise = self.noise or NoiseModel()
        tasks = [(self.params, noise, seed, start, stop) for start, stop in self._chunks(trials)]
        passes, inconsistent = np.sum(self._map(_verification_chunk, tasks), axis=0)
        report = VerificationReport(trials, int(passes), int(inconsistent), self.params.k, self.params.delta,
                                    noise.flip_probability)
        self._logger.info("Honest verification passed %d/%d (expected rate %.6f)", report.passes, trials,
                          report.expected)
        return report

    def _chunks(self, trials):
        size = -(-trials // self.workers)
        return [(start, min(start + size, trials)) for start in range(0, trials, size)]

    def _map(self, fn, tasks):
        if self.workers == 1 or len(tasks) == 1:
            return [fn(*task) for task in tasks]
        self._logger.debug("Running %d chunks on %d worker processes", len(tasks), self.workers)
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(fn, *zip(*tasks)))


def estimate_gap(params, strategy, trials, rng, workers=1, noise=None, logger=None):
    """Runs the game trials times per challenge bit; the master seed for the substreams is drawn from rng."""
    seed = int(rng.integers(0, 1 << 63))
    return GameHarness(params, logger, workers, noise).estimate_gap(strategy, trials, seed)


def _game_chunk(params, strategy, noise, seed, b, start, stop):
    scheme = CertifiedDeletionScheme(params)
    accepted = wins = 0
    for trial in range(start, stop):
        ok, b_prime = run_game1(params, strategy, b, np.random.default_rng([seed, trial, b]), noise, scheme)
        accepted += ok
        wins += ok and b_prime
    return accepted, wins


def _robustness_chunk(params, noise, seed, start, stop):
    scheme = CertifiedDeletionScheme(params)
    code = params.code
    no_errors = BitString.zeros(params.s)
    correct = false_accepts = rejections = correctable_trials = correctable_failures = 0
    for trial in range(start, stop):
        rng = np.random.default_rng([seed, trial])
        aux, key = scheme.keygen(rng)
        msg = BitString.random(params.n, rng)
        ct = scheme.encrypt(msg, aux, key)
        flips = noise.apply(ct.quantum, rng)
        result = scheme.decrypt(key, ct, rng)

        success = result.flag == 1 and result.plaintext == msg
        if result.flag == 0:
            rejections += 1
        elif success:
            correct += 1
        else:
            false_accepts += 1

        index_set, _ = key.index_sets
        block_errors = code.block_errors(no_errors, restrict(flips, index_set))
        if block_errors.size == 0 or block_errors.max() <= code.correctable_errors:
            correctable_trials += 1
            correctable_failures += not success
    return correct, false_accepts, rejections, correctable_trials, correctable_failures


def _verification_chunk(params, noise, seed, start, stop):
    scheme = CertifiedDeletionScheme(params)
    passes = inconsistent = 0
    for trial in range(start, stop):
        rng = np.random.default_rng([seed, trial])
        aux, key = scheme.keygen(rng)
        ct = scheme.encrypt(BitString.random(params.n, rng), aux, key)
        flips = noise.apply(ct.quantum, rng)
        cert = scheme.delete(ct, rng)

        mismatches = scheme.count_mismatches(aux, key, cert)
        _, complement = key.index_sets
        passes += mismatches < params.threshold
        inconsistent += mismatches != restrict(flips, complement).weight()
    return passes, inconsistent


def exact_ciphertext_distribution(params, msg, bases):
    """
    Exact distribution of what an observer sees of an encryption of msg: the outcomes y of measuring the qubits in
    the given bases together with (c, p, q), averaged over every key and hash seed. Returns a Counter keyed by
    (y, c, p, q) bitstrings whose integer weights are probabilities scaled by 2^m times the number of keys.
    """
    p = params
    if len(msg) != p.n:
        raise LengthMismatchError("message must have {} bits, got {}".format(p.n, len(msg)))
    if len(bases) != p.m:
        raise LengthMismatchError("{} observer bases for {} qubits".format(len(bases), p.m))
    key_bits = p.m + p.n + p.tau + p.mu + (p.s + p.n - 1) + (p.s + p.tau - 1)
    key_count = math.comb(p.m, p.k) << key_bits
    if key_count > MAX_ENUMERATION:
        raise ParameterError("{} keys exceed the enumeration cap of {}".format(key_count, MAX_ENUMERATION))
    thetas = list(combinations(range(p.m), p.k))

    scheme = CertifiedDeletionScheme(p)
    observer = bases.bits
    distribution = Counter()
    for r_value, positions in product(range(1 << p.m), thetas):
        r = BitString.from_int(r_value, p.m)
        theta_bits = np.zeros(p.m, dtype=np.uint8)
        theta_bits[list(positions)] = 1
        theta = BitString.from_bits(theta_bits)
        outcomes = _observer_outcomes(r, theta_bits, observer)

        for u, d, e, pa_seed, ec_seed in product(
                range(1 << p.n), range(1 << p.tau), range(1 << p.mu),
                range(1 << (p.s + p.n - 1)), range(1 << (p.s + p.tau - 1))):
            key = DecKey(
                theta=theta,
                u=BitString.from_int(u, p.n),
                d=BitString.from_int(d, p.tau),
                e=BitString.from_int(e, p.mu),
                h_pa=ToeplitzHash(p.s, p.n, BitString.from_int(pa_seed, p.s + p.n - 1)),
                h_ec=ToeplitzHash(p.s, p.tau, BitString.from_int(ec_seed, p.s + p.tau - 1)),
            )
            ct = scheme.encrypt(msg, AuxKey(r), key)
            classical = (ct.c.to_bitstr(), ct.p.to_bitstr(), ct.q.to_bitstr())
            for y, weight in outcomes:
                distribution[(y,) + classical] += weight
    return distribution


def _observer_outcomes(r, theta_bits, observer):
    """[(y, weight)]: qubits measured in their preparation basis return r, the others a fair coin."""
    matched = observer == theta_bits
    free = np.flatnonzero(~matched)
    weight = 1 << (len(theta_bits) - len(free))
    outcomes = []
    for assignment in product((0, 1), repeat=len(free)):
        y = r.bits.copy()
        y[free] = assignment
        outcomes.append((''.join(str(int(bit)) for bit in y), weight))
    return outcomes


def serfling_pattern(m, s, delta, nu):
    """
    A fixed 0/1 pattern of length m whose weight, floor(k delta) + ceil(s (delta + nu)), makes the sampling event
    as likely as a single weight can.
    """
    k = m - s
    ones = min(m, math.floor(k * delta) + math.ceil(s * (delta + nu)))
    return BitString.from_bits(np.arange(m) < ones)


def serfling_frequency(z, s, delta, nu, samples, rng):
    """
    Empirical probability, over a uniform s-subset S of the positions of z, that the weight of z on S is at most
    k delta while the weight on the rest is at least s (delta + nu).
    """
    m = len(z)
    k = m - s
    if not 0 <= s <= m:
        raise ParameterError("subset size {} out of range for {} positions".format(s, m))
    hits = 0
    for start in range(0, samples, SERFLING_BATCH):
        size = min(SERFLING_BATCH, samples - start)
        shuffled = rng.permuted(np.tile(z.bits, (size, 1)), axis=1).astype(np.int64)
        chosen = shuffled[:, :s].sum(axis=1)
        rest = shuffled[:, s:].sum(axis=1)
        hits += int(np.count_nonzero((chosen <= k * delta) & (rest >= s * (delta + nu))))
    return hits / samples
