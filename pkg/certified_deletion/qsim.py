"""
Simulated quantum layer.

Honest BB84/Wiesner qubits are tracked symbolically as (value, basis, disturbed). Measuring in the preparation
basis of an undisturbed qubit returns its value; any other measurement returns a fair coin. A measured qubit
collapses to (outcome, measured basis, undisturbed), so repeating the measurement gives the same result.

A small dense state-vector engine (at most MAX_QUBITS qubits) serves as the exact oracle for entangled
scenarios. Qubit 0 is the most significant axis of the amplitude vector.
"""
from dataclasses import dataclass

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.errors import LengthMismatchError, QuantumSimulationError

COMPUTATIONAL = 0
HADAMARD = 1

MAX_QUBITS = 12
NORM_TOLERANCE = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)

COMPUTATIONAL_POVM = (
    np.array([[1, 0], [0, 0]], dtype=complex),
    np.array([[0, 0], [0, 1]], dtype=complex),
)
HADAMARD_POVM = (
    np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex),
)


@dataclass
class PreparedQubit:
    value: int
    basis: int
    disturbed: int = 0


def measure(qubit, basis, rng):
    """Measures a single PreparedQubit in the given basis, collapsing it to the outcome."""
    if qubit.basis == basis and not qubit.disturbed:
        outcome = qubit.value
    else:
        outcome = int(rng.integers(0, 2))
    qubit.value = outcome
    qubit.basis = basis
    qubit.disturbed = 0
    return outcome


class QuantumRegister:
    """
    An ordered register of prepared qubits with vectorized measurement. Indexing returns PreparedQubit snapshots;
    all state changes go through the register's own methods.
    """

    def __init__(self, values, bases, disturbed=None):
        self._values = np.array(values, dtype=np.uint8).reshape(-1)
        self._bases = np.array(bases, dtype=np.uint8).reshape(-1)
        if disturbed is None:
            disturbed = np.zeros_like(self._values)
        self._disturbed = np.array(disturbed, dtype=np.uint8).reshape(-1)
        if not (len(self._values) == len(self._bases) == len(self._disturbed)):
            raise LengthMismatchError("register values, bases and disturbed flags must have equal lengths")

    def __len__(self):
        return len(self._values)

    def __getitem__(self, index):
        return PreparedQubit(int(self._values[index]), int(self._bases[index]), int(self._disturbed[index]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def copy(self):
        return QuantumRegister(self._values.copy(), self._bases.copy(), self._disturbed.copy())

    def describe(self):
        """Classical description (values, bases) of the register, as written to ciphertext files."""
        return BitString.from_bits(self._values), BitString.from_bits(self._bases)

    def measure(self, index, basis, rng):
        qubit = self[index]
        outcome = measure(qubit, basis, rng)
        self._values[index] = qubit.value
        self._bases[index] = qubit.basis
        self._disturbed[index] = 0
        return outcome

    def measure_all(self, bases, rng):
        """Measures qubit i in bases[i] for every i; returns the outcomes as a BitString."""
        if len(bases) != len(self):
            raise LengthMismatchError(
                "{} measurement bases given for a register of {} qubits".format(len(bases), len(self))
            )
        bases = bases.bits
        coins = rng.integers(0, 2, size=len(self), dtype=np.uint8)
        randomized = (bases != self._bases) | (self._disturbed == 1)
        outcomes = np.where(randomized, coins, self._values).astype(np.uint8)
        self._values = outcomes
        self._bases = bases.copy()
        self._disturbed = np.zeros_like(outcomes)
        return BitString.from_bits(outcomes)

    def flip(self, mask):
        """Flips the encoded value of every qubit selected by the mask, in its preparation basis."""
        if len(mask) != len(self):
            raise LengthMismatchError("flip mask of length {} for {} qubits".format(len(mask), len(self)))
        self._values ^= mask.bits

    def scramble(self, index):
        """Replaces a qubit by the maximally mixed state."""
        self._disturbed[index] = 1


@dataclass(frozen=True)
class NoiseModel:
    flip_probability: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.flip_probability <= 1.0:
            raise ValueError("flip probability must lie in [0, 1], got {}".format(self.flip_probability))

    def apply(self, register, rng):
        """Applies independent bit flips to the register and returns the flip mask."""
        mask = BitString.from_bits(rng.random(len(register)) < self.flip_probability)
        register.flip(mask)
        return mask


def prepare_wiesner(r, theta):
    """Prepares |r^theta> = H^theta |r> as a register of symbolic qubits."""
    if len(r) != len(theta):
        raise LengthMismatchError("values and bases must have equal lengths ({} != {})".format(len(r), len(theta)))
    return QuantumRegister(r.bits, theta.bits)


def apply_noise(qubits, model, rng):
    model.apply(qubits, rng)
    return qubits


class StateVector:
    """Dense pure state on up to MAX_QUBITS qubits."""

    def __init__(self, amplitudes):
        amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
        num_qubits = int(amplitudes.size).bit_length() - 1
        if amplitudes.size == 0 or 1 << num_qubits != amplitudes.size:
            raise QuantumSimulationError("state vector length {} is not a power of two".format(amplitudes.size))
        if num_qubits > MAX_QUBITS:
            raise QuantumSimulationError(
                "{} qubits exceeds the state-vector cap of {}".format(num_qubits, MAX_QUBITS)
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOLERANCE * max(1, amplitudes.size):
            raise QuantumSimulationError("state vector is not normalized (squared norm {})".format(norm))
        amplitudes.setflags(write=False)
        self._amplitudes = amplitudes
        self.num_qubits = num_qubits

    @classmethod
    def basis_state(cls, bits):
        bits = list(bits)
        amplitudes = np.zeros(1 << len(bits), dtype=complex)
        amplitudes[int(''.join(str(b) for b in bits) or '0', 2)] = 1.0
        return cls(amplitudes)

    @property
    def amplitudes(self):
        return self._amplitudes

    def norm_squared(self):
        return float(np.vdot(self._amplitudes, self._amplitudes).real)

    def tensor(self, other):
        return StateVector(np.kron(self._amplitudes, other.amplitudes))

    def permute(self, order):
        """Returns the state whose qubit j is qubit order[j] of this state."""
        if sorted(order) != list(range(self.num_qubits)):
            raise QuantumSimulationError("{} is not a permutation of {} qubits".format(order, self.num_qubits))
        tensor = self._amplitudes.reshape([2] * self.num_qubits)
        return StateVector(np.transpose(tensor, order).reshape(-1))

    def apply_single(self, matrix, index):
        self._check_index(index)
        tensor = self._amplitudes.reshape([2] * self.num_qubits)
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [index])), 0, index)
        return StateVector(tensor.reshape(-1))

    def rotate_to(self, bases):
        """Applies H to every qubit whose basis is 1 so a computational read-out realizes those measurements."""
        if len(bases) != self.num_qubits:
            raise LengthMismatchError("{} bases given for {} qubits".format(len(bases), self.num_qubits))
        tensor = self._amplitudes.reshape([2] * self.num_qubits)
        for index, basis in enumerate(bases):
            if basis:
                tensor = np.moveaxis(np.tensordot(_H, tensor, axes=([1], [index])), 0, index)
        return tensor.reshape(-1)

    def probabilities(self, bases):
        """
        Exact joint outcome distribution when qubit i is measured in bases[i]; returned as an array of shape
        [2] * num_qubits indexed by the outcome bits.
        """
        rotated = self.rotate_to(list(bases))
        return (np.abs(rotated) ** 2).reshape([2] * self.num_qubits)

    def qubit_probabilities(self, index, basis):
        self._check_index(index)
        bases = [0] * self.num_qubits
        bases[index] = basis
        probs = self.probabilities(bases)
        other_axes = tuple(i for i in range(self.num_qubits) if i != index)
        return np.sum(probs, axis=other_axes)

    def _check_index(self, index):
        if not 0 <= index < self.num_qubits:
            raise QuantumSimulationError("qubit index {} out of range for {} qubits".format(index, self.num_qubits))


def sv_measure(state, qubit_index, basis, rng):
    """Born-rule measurement of one qubit; returns (outcome, renormalized post-measurement state)."""
    probs = state.qubit_probabilities(qubit_index, basis)
    outcome = 1 if rng.random() < probs[1] else 0

    working = state.apply_single(_H, qubit_index) if basis == HADAMARD else state
    tensor = working.amplitudes.reshape([2] * state.num_qubits).copy()
    index = [slice(None)] * state.num_qubits
    index[qubit_index] = 1 - outcome
    tensor[tuple(index)] = 0.0
    tensor /= np.sqrt(probs[outcome])
    collapsed = StateVector(tensor.reshape(-1))
    if basis == HADAMARD:
        collapsed = collapsed.apply_single(_H, qubit_index)
    return outcome, collapsed


def make_epr_pairs(count):
    """
    count EPR pairs (|00> + |11>)/sqrt(2). Qubits 0..count-1 are the first halves, qubit count+i is the partner
    of qubit i.
    """
    if 2 * count > MAX_QUBITS:
        raise QuantumSimulationError(
            "{} EPR pairs need {} qubits, more than the cap of {}".format(count, 2 * count, MAX_QUBITS)
        )
    pair = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    state = np.array([1.0], dtype=complex)
    for _ in range(count):
        state = np.kron(state, pair)
    # kron interleaves pairs as (a0 b0 a1 b1 ...); regroup to (a0 a1 ... b0 b1 ...)
    order = [2 * i for i in range(count)] + [2 * i + 1 for i in range(count)]
    return StateVector(state).permute(order)


def wiesner_state(r, theta):
    """H^theta |r> as a dense state vector."""
    state = StateVector.basis_state(r.bits if isinstance(r, BitString) else r)
    for index, basis in enumerate(theta):
        if basis:
            state = state.apply_single(_H, index)
    return state


def povm_overlap(first, second):
    """max over outcome pairs of ||sqrt(M_x) sqrt(N_y)||_inf^2 for two single-qubit measurements."""
    roots_first = [_psd_sqrt(op) for op in _check_povm(first)]
    roots_second = [_psd_sqrt(op) for op in _check_povm(second)]
    return max(
        float(np.linalg.norm(a @ b, ord=2) ** 2)
        for a in roots_first
        for b in roots_second
    )


def _check_povm(operators):
    operators = [np.asarray(op, dtype=complex) for op in operators]
    total = np.zeros((2, 2), dtype=complex)
    for op in operators:
        if op.shape != (2, 2):
            raise QuantumSimulationError("POVM elements must be 2x2, got shape {}".format(op.shape))
        if not np.allclose(op, op.conj().T, atol=1e-12):
            raise QuantumSimulationError("POVM element is not Hermitian")
        if np.linalg.eigvalsh(op).min() < -1e-12:
            raise QuantumSimulationError("POVM element is not positive semidefinite")
        total += op
    if not np.allclose(total, np.eye(2), atol=1e-12):
        raise QuantumSimulationError("POVM elements do not sum to the identity")
    return operators


def _psd_sqrt(op):
    eigenvalues, eigenvectors = np.linalg.eigh(op)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.conj().T
