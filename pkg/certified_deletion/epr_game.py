"""
Exact oracle for the entanglement-based certified-deletion game on a handful of qubits.

Bob prepares a pure state on A (m qubits, sent to Alice), B (m qubits, measured by Bob in the Hadamard basis to
give the certificate y) and an optional held register B'. Alice draws theta from the weight-k strings, measures A
in basis theta to get r, and accepts iff the weight of y xor r on the Hadamard positions is below k delta. On
acceptance Bob measures B' and a deterministic rule maps everything he has learnt to b'. Probabilities are summed
exactly over theta, every Born-rule outcome, the pads and every hash seed.
"""
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Sequence, Union

import numpy as np

from certified_deletion.bitvec import BitString, index_sets_from_basis, restrict
from certified_deletion.errors import ParameterError, QuantumSimulationError
from certified_deletion.hashcode import ToeplitzHash
from certified_deletion.qsim import COMPUTATIONAL, HADAMARD, make_epr_pairs, StateVector
from certified_deletion.scheme import AuxKey, CertifiedDeletionScheme, ClassicalPart, DecKey

MAX_ORACLE_QUBITS = 4
PROBABILITY_FLOOR = 1e-15


@dataclass(frozen=True)
class OracleTranscript:
    """Everything Bob holds when he decides: the message he chose, Alice's disclosed data, y and his B' outcomes."""
    msg0: BitString
    key: DecKey
    c: BitString
    p: BitString
    q: BitString
    y: BitString
    held: BitString


@dataclass(frozen=True)
class OracleAdversary:
    msg0: BitString
    state: StateVector
    held_bases: Union[Sequence[int], Callable]
    decide: Callable

    def bases_for(self, theta):
        """Measurement bases of B'; a callable may choose them from the disclosed theta."""
        return list(self.held_bases(theta)) if callable(self.held_bases) else list(self.held_bases)


@dataclass(frozen=True)
class OracleResult:
    """tables[b][(ok, b')] is the exact probability of that outcome in the game with challenge bit b."""
    tables: dict

    def probability(self, b, ok, b_prime):
        return self.tables[b].get((ok, b_prime), 0.0)

    def total(self, b):
        return sum(self.tables[b].values())

    def accept_probability(self, b):
        return self.probability(b, 1, 0) + self.probability(b, 1, 1)

    @property
    def gap(self):
        return abs(self.probability(0, 1, 1) - self.probability(1, 1, 1))

    def to_dict(self):
        return {
            'tables': {
                str(b): [{'ok': ok, 'b_prime': b_prime, 'probability': self.probability(b, ok, b_prime)}
                         for ok, b_prime in ((0, 0), (1, 0), (1, 1))]
                for b in (0, 1)
            },
            'gap': self.gap,
        }

    def to_rows(self):
        """Flat (b, ok, b_prime, probability) rows for CSV output."""
        return [(b, ok, b_prime, self.probability(b, ok, b_prime))
                for b in (0, 1) for ok, b_prime in ((0, 0), (1, 0), (1, 1))]


class AlwaysOne:
    def __call__(self, transcript):
        return 1


class DecodeHeld:
    """Decrypts with the held outcomes standing in for Alice's r and answers whether the plaintext is msg0."""

    def __init__(self, params):
        self._scheme = CertifiedDeletionScheme(params)

    def __call__(self, transcript):
        result = self._scheme.decode(transcript.key, ClassicalPart(transcript.c, transcript.p, transcript.q),
                                     transcript.held)
        return int(result.flag == 1 and result.plaintext == transcript.msg0)


def run_epr_game_oracle(params, adversary):
    m = params.m
    if m > MAX_ORACLE_QUBITS:
        raise ParameterError("the oracle handles at most {} qubits per register, got m={}".format(MAX_ORACLE_QUBITS, m))
    if params.n != 1:
        raise ParameterError("the oracle handles one-bit messages, got n={}".format(params.n))
    if len(adversary.msg0) != params.n:
        raise ParameterError("msg0 must have {} bits, got {}".format(params.n, len(adversary.msg0)))
    held = adversary.state.num_qubits - 2 * m
    if held < 0:
        raise QuantumSimulationError(
            "the adversary state has {} qubits, fewer than the 2m = {} of A and B".format(adversary.state.num_qubits,
                                                                                       2 * m)
        )

    scheme = CertifiedDeletionScheme(params)
    keys = list(_all_pads_and_seeds(params))
    thetas = list(combinations(range(m), params.k))
    tables = {0: {}, 1: {}}
    for positions in thetas:
        theta_bits = np.zeros(m, dtype=np.uint8)
        theta_bits[list(positions)] = 1
        theta = BitString.from_bits(theta_bits)
        _, complement = index_sets_from_basis(theta)
        held_bases = adversary.bases_for(theta)
        if len(held_bases) != held:
            raise QuantumSimulationError("{} bases given for {} held qubits".format(len(held_bases), held))

        probs = adversary.state.probabilities(list(theta_bits) + [HADAMARD] * m + held_bases)
        weight_theta = 1.0 / len(thetas)
        for outcome in np.argwhere(probs > PROBABILITY_FLOOR):
            p_outcome = weight_theta * float(probs[tuple(outcome)])
            r = BitString.from_bits(outcome[:m])
            y = BitString.from_bits(outcome[m:2 * m])
            w = BitString.from_bits(outcome[2 * m:])
            ok = int((restrict(y, complement) ^ restrict(r, complement)).weight() < params.threshold)
            for b in (0, 1):
                if not ok:
                    _accumulate(tables[b], (0, 0), p_outcome)
                    continue
                msg = adversary.msg0 if b else BitString.zeros(params.n)
                p_key = p_outcome / len(keys)
                for u, d, e, h_pa, h_ec in keys:
                    key = DecKey(theta, u, d, e, h_pa, h_ec)
                    ct = scheme.encrypt(msg, AuxKey(r), key)
                    transcript = OracleTranscript(adversary.msg0, key, ct.c, ct.p, ct.q, y, w)
                    _accumulate(tables[b], (1, int(adversary.decide(transcript))), p_key)
    return OracleResult(tables)


def _accumulate(table, cell, probability):
    table[cell] = table.get(cell, 0.0) + probability


def _all_pads_and_seeds(params):
    p = params
    for u, d, e, pa_seed, ec_seed in product(
            range(1 << p.n), range(1 << p.tau), range(1 << p.mu),
            range(1 << (p.s + p.n - 1)), range(1 << (p.s + p.tau - 1))):
        yield (BitString.from_int(u, p.n), BitString.from_int(d, p.tau), BitString.from_int(e, p.mu),
               ToeplitzHash(p.s, p.n, BitString.from_int(pa_seed, p.s + p.n - 1)),
               ToeplitzHash(p.s, p.tau, BitString.from_int(ec_seed, p.s + p.tau - 1)))


def honest_epr_adversary(params, msg0=None):
    """A and B are the two halves of m EPR pairs; Bob always answers 1."""
    msg0 = msg0 if msg0 is not None else BitString.ones(params.n)
    return OracleAdversary(msg0, make_epr_pairs(params.m), (), AlwaysOne())


def product_state_adversary(params, msg0=None):
    """A is |0...0>, B is |+...+> so the Hadamard read-out fabricates y = 0...0; Bob always answers 1."""
    m = params.m
    msg0 = msg0 if msg0 is not None else BitString.ones(params.n)
    plus = np.full(1 << m, 1.0 / np.sqrt(1 << m))
    state = StateVector.basis_state([0] * m).tensor(StateVector(plus))
    return OracleAdversary(msg0, state, (), AlwaysOne())


def computational_copy_adversary(params, msg0=None):
    """
    A is entangled with the held register B', B is |0...0> (so y is uniform). Bob reads B' in the computational
    basis, which copies r on the computational positions, and decrypts with it.
    """
    m = params.m
    msg0 = msg0 if msg0 is not None else BitString.ones(params.n)
    state = make_epr_pairs(m).tensor(StateVector.basis_state([0] * m))
    # pairs occupy (A, partner) = (0..m-1, m..2m-1); move the zeros into B and the partners into B'
    order = list(range(m)) + list(range(2 * m, 3 * m)) + list(range(m, 2 * m))
    return OracleAdversary(msg0, state.permute(order), [COMPUTATIONAL] * m, DecodeHeld(params))


SCENARIOS = {
    'honest_epr': honest_epr_adversary,
    'product_state': product_state_adversary,
    'computational_copy': computational_copy_adversary,
}
