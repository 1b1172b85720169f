"""
Min- and max-entropy of classical variables given classical side information, for exact checks at micro scale.
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.errors import ParameterError, QuantumSimulationError
from certified_deletion.hashcode import ToeplitzHash
from certified_deletion.qsim import (COMPUTATIONAL, COMPUTATIONAL_POVM, HADAMARD, HADAMARD_POVM, povm_overlap,
                                     StateVector)

SUM_TOLERANCE = 1e-12
MAX_HASH_INPUT = 8
MAX_HASH_OUTPUT = 3


class ClassicalJoint:
    """A joint distribution over named finite variables; probs has one axis per name."""

    def __init__(self, names, probs):
        probs = np.array(probs, dtype=float)
        names = tuple(names)
        if probs.ndim != len(names) or len(set(names)) != len(names):
            raise ParameterError("{} distinct names needed for a {}-dimensional table".format(probs.ndim, probs.ndim))
        if np.any(probs < 0):
            raise ParameterError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
            raise ParameterError("probabilities sum to {}, not 1".format(probs.sum()))
        probs.setflags(write=False)
        self.names = names
        self.probs = probs

    def marginal(self, names):
        """The joint of the listed variables, axes in the listed order."""
        missing = [name for name in names if name not in self.names]
        if missing:
            raise ParameterError("unknown variable(s) {}".format(', '.join(missing)))
        dropped = tuple(i for i, name in enumerate(self.names) if name not in names)
        summed = self.probs.sum(axis=dropped) if dropped else self.probs
        kept = [name for name in self.names if name in names]
        return ClassicalJoint(names, np.transpose(summed, [kept.index(name) for name in names]))

    def _pair(self, target, side):
        """P(target, side) as a 2-d array; a missing side is a single trivial outcome."""
        if side is None:
            return self.marginal([target]).probs[:, None]
        return self.marginal([target, side]).probs


def hmin_classical(joint, target, side=None):
    """-log2 of sum_e max_x P(x, e)."""
    pair = joint._pair(target, side)
    return -math.log2(pair.max(axis=0).sum())


def hmax_classical(joint, target, side=None):
    """
    Returns (value, support_bound): value = log2 sum_y (sum_z sqrt P(z, y))^2, the Renyi-1/2 entropy averaged over
    the side information, and support_bound = log2 of the largest support of Z given one value of Y.
    """
    pair = joint._pair(target, side)
    value = math.log2(np.sum(np.sqrt(pair).sum(axis=0) ** 2))
    support = int(np.count_nonzero(pair > 0, axis=0).max())
    return value, math.log2(support)


def measured_joint(state, groups, bases):
    """
    Measures every qubit of state in bases[i] and returns the joint distribution of the named groups, each group a
    single variable whose value is the group's outcome bits read most significant first. Qubits in no group are
    traced out.
    """
    probs = state.probabilities(list(bases))
    names = list(groups)
    order = [q for name in names for q in groups[name]]
    if len(set(order)) != len(order):
        raise QuantumSimulationError("qubit groups overlap: {}".format(groups))
    traced = tuple(q for q in range(state.num_qubits) if q not in order)
    summed = probs.sum(axis=traced) if traced else probs
    remaining = [q for q in range(state.num_qubits) if q in order]
    table = np.transpose(summed, [remaining.index(q) for q in order])
    shape = [1 << len(groups[name]) for name in names]
    return ClassicalJoint(names, table.reshape(shape))


@dataclass(frozen=True)
class UncertaintyInstance:
    """
    A pure state on A (the measured register), E (measured in e_bases, giving the side information for the
    computational read-out of A) and B (measured in b_bases, the side information for the Hadamard read-out).
    """
    state: StateVector
    a_qubits: Sequence[int]
    e_qubits: Sequence[int] = ()
    e_bases: Sequence[int] = ()
    b_qubits: Sequence[int] = ()
    b_bases: Sequence[int] = ()


def check_uncertainty_relation(instance):
    """
    Returns (lhs_min, lhs_max, rhs): H_min(X|E) for the computational read-out X of A, H_max(Z|Z') for its
    Hadamard read-out Z against B's outcomes Z', and rhs = |A| log2(1/c) with c the computational/Hadamard overlap.
    """
    st = instance.state
    if len(instance.e_bases) != len(instance.e_qubits) or len(instance.b_bases) != len(instance.b_qubits):
        raise QuantumSimulationError("every side-information qubit needs exactly one basis")

    x_bases = [COMPUTATIONAL] * st.num_qubits
    for q, basis in zip(instance.e_qubits, instance.e_bases):
        x_bases[q] = basis
    groups = {'x': list(instance.a_qubits), 'e': list(instance.e_qubits)}
    lhs_min = hmin_classical(measured_joint(st, groups, x_bases), 'x', 'e')

    z_bases = [COMPUTATIONAL] * st.num_qubits
    for q in instance.a_qubits:
        z_bases[q] = HADAMARD
    for q, basis in zip(instance.b_qubits, instance.b_bases):
        z_bases[q] = basis
    groups = {'z': list(instance.a_qubits), 'zp': list(instance.b_qubits)}
    lhs_max, _ = hmax_classical(measured_joint(st, groups, z_bases), 'z', 'zp')

    overlap = povm_overlap(COMPUTATIONAL_POVM, HADAMARD_POVM)
    return lhs_min, lhs_max, len(instance.a_qubits) * math.log2(1.0 / overlap)


def check_leftover_hash(joint, s, n):
    """
    Returns (distance, bound): the exact total-variation distance between (H(X), H, E) and (U, H, E) with H uniform
    over all s -> n Toeplitz matrices, and 1/2 * 2^(-(H_min(X|E) - n) / 2). X's values index s-bit strings.
    """
    if not 1 <= s <= MAX_HASH_INPUT or not 1 <= n <= MAX_HASH_OUTPUT:
        raise ParameterError("leftover-hash check supports 1 <= s <= {} and 1 <= n <= {} (got s={}, n={})".format(
            MAX_HASH_INPUT, MAX_HASH_OUTPUT, s, n))
    pair = joint._pair('x', 'e' if 'e' in joint.names else None)
    if pair.shape[0] != 1 << s:
        raise ParameterError("X takes {} values, expected 2^s = {}".format(pair.shape[0], 1 << s))

    inputs = (np.arange(1 << s)[:, None] >> np.arange(s)) & 1
    output_weights = 1 << np.arange(n)
    p_side = pair.sum(axis=0)
    seeds = 1 << (s + n - 1)
    total = 0.0
    for seed in range(seeds):
        matrix = ToeplitzHash(s, n, BitString.from_int(seed, s + n - 1)).matrix
        outputs = ((inputs @ matrix.T) & 1) @ output_weights
        hashed = np.zeros((1 << n, pair.shape[1]))
        np.add.at(hashed, outputs, pair)
        total += 0.5 * np.abs(hashed - p_side[None, :] / (1 << n)).sum()
    distance = total / seeds
    bound = 0.5 * 2.0 ** (-0.5 * (hmin_classical(joint, 'x', 'e' if 'e' in joint.names else None) - n))
    return distance, bound
