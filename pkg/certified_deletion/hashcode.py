"""
Universal_2 hashing and syndrome coding over GF(2).

ToeplitzHash: an out_len x in_len Toeplitz matrix T with T[i, j] = seed[i + in_len - 1 - j], so the seed holds
the first row reversed followed by the rest of the first column. LinearCode: a blockwise code given by its
parity-check matrix, with a syndrome table of minimum-weight coset leaders.
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from certified_deletion.bitvec import BitString
from certified_deletion.errors import LengthMismatchError, ParameterError


@dataclass(frozen=True)
class ToeplitzHash:
    in_len: int
    out_len: int
    seed: BitString

    def __post_init__(self):
        if self.out_len < 1:
            raise ParameterError("hash output length must be at least 1, got {}".format(self.out_len))
        if len(self.seed) != self.in_len + self.out_len - 1:
            raise LengthMismatchError(
                "Toeplitz seed for {}->{} bits must have {} bits, got {}".format(
                    self.in_len, self.out_len, self.in_len + self.out_len - 1, len(self.seed))
            )

    @cached_property
    def matrix(self):
        if self.in_len == 0:
            return np.zeros((self.out_len, 0), dtype=np.int64)
        windows = sliding_window_view(self.seed.bits, self.in_len)
        matrix = windows[:, ::-1].astype(np.int64)
        matrix.setflags(write=False)
        return matrix

    def __call__(self, x):
        return hash_eval(self, x)


def sample_hash(in_len, out_len, rng):
    return ToeplitzHash(in_len, out_len, BitString.random(in_len + out_len - 1, rng))


def hash_eval(h, x):
    if len(x) != h.in_len:
        raise LengthMismatchError("hash expects {} input bits, got {}".format(h.in_len, len(x)))
    return BitString.from_bits(np.dot(h.matrix, x.bits.astype(np.int64)) & 1)


@dataclass(frozen=True, eq=False)
class LinearCode:
    """
    Blockwise linear code: every block of block_in bits is checked by the same (block_syn x block_in)
    parity-check matrix. decode_table[s] is the minimum-weight error pattern with syndrome s, ties broken by the
    lexicographically smallest tuple of set positions. Syndromes index the table LSB-first.
    """
    name: str
    parity_check: np.ndarray
    decode_table: np.ndarray = field(repr=False)
    distance: int

    @classmethod
    def from_parity_check(cls, parity_check, name=None):
        parity_check = np.array(parity_check, dtype=np.int64).reshape(-1, np.shape(parity_check)[-1])
        block_syn, block_in = parity_check.shape
        if block_in < 1 or block_in > 16:
            raise ParameterError("code block length must lie in [1, 16], got {}".format(block_in))
        if np.any((parity_check != 0) & (parity_check != 1)):
            raise ParameterError("parity-check entries must be 0 or 1")
        parity_check.setflags(write=False)

        weights = 1 << np.arange(block_syn, dtype=np.int64)
        table = np.zeros((1 << block_syn, block_in), dtype=np.uint8)
        filled = np.zeros(1 << block_syn, dtype=bool)
        for w in range(block_in + 1):
            for positions in combinations(range(block_in), w):
                pattern = np.zeros(block_in, dtype=np.int64)
                pattern[list(positions)] = 1
                syndrome = int(((parity_check @ pattern) & 1) @ weights) if block_syn else 0
                if not filled[syndrome]:
                    filled[syndrome] = True
                    table[syndrome] = pattern
        if not filled.all():
            raise ParameterError("parity-check matrix does not have full row rank; some syndromes are unreachable")
        table.setflags(write=False)

        distance = _minimum_distance(parity_check)
        return cls(name or "custom{}_{}".format(block_in, block_in - block_syn), parity_check, table, distance)

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.parity_check, other.parity_check)

    def __hash__(self):
        return hash((self.name, self.parity_check.tobytes()))

    @property
    def block_in(self):
        return self.parity_check.shape[1]

    @property
    def block_syn(self):
        return self.parity_check.shape[0]

    @property
    def correctable_errors(self):
        return (self.distance - 1) // 2

    def syndrome_length(self, length):
        return (length // self.block_in) * self.block_syn

    def synd(self, x):
        blocks = self._blocks(x)
        return BitString.from_bits((blocks @ self.parity_check.T) & 1)

    def corr(self, y, target_syndrome):
        """Returns the string with syndrome target_syndrome obtained by flipping the likeliest error pattern of y."""
        blocks = self._blocks(y)
        if len(target_syndrome) != len(blocks) * self.block_syn:
            raise LengthMismatchError(
                "target syndrome must have {} bits, got {}".format(len(blocks) * self.block_syn, len(target_syndrome))
            )
        target = target_syndrome.bits.astype(np.int64).reshape(len(blocks), self.block_syn)
        offsets = ((blocks @ self.parity_check.T) & 1) ^ target
        indices = offsets @ (1 << np.arange(self.block_syn, dtype=np.int64))
        corrected = blocks ^ self.decode_table[indices]
        return BitString.from_bits(corrected.reshape(-1))

    def block_errors(self, x, y):
        """Number of positions where x and y differ, per code block."""
        if len(x) != len(y):
            raise LengthMismatchError("cannot compare strings of lengths {} and {}".format(len(x), len(y)))
        return np.sum(self._blocks(x) ^ self._blocks(y), axis=1)

    def _blocks(self, x):
        if len(x) % self.block_in:
            raise LengthMismatchError(
                "input length {} is not a multiple of the code block length {}".format(len(x), self.block_in)
            )
        return x.bits.astype(np.int64).reshape(-1, self.block_in)


def synd(code, x):
    return code.synd(x)


def corr(code, y, target_syndrome):
    return code.corr(y, target_syndrome)


def _minimum_distance(parity_check):
    block_syn, block_in = parity_check.shape
    codewords = (np.arange(1, 1 << block_in)[:, None] >> np.arange(block_in)) & 1
    if block_syn:
        in_kernel = ~np.any((codewords @ parity_check.T) & 1, axis=1)
        codewords = codewords[in_kernel]
    if len(codewords) == 0:
        return block_in + 1
    return int(codewords.sum(axis=1).min())


def extended_hamming_8_4():
    """[8,4,4] extended Hamming code: columns 0-6 are 1..7 in binary over the first three rows, row 3 is parity."""
    columns = [[(j + 1) >> b & 1 for b in range(3)] + [1] for j in range(7)] + [[0, 0, 0, 1]]
    return LinearCode.from_parity_check(np.array(columns).T, name='hamming8_4')


def repetition_2_1():
    return LinearCode.from_parity_check([[1, 1]], name='repetition2_1')


def identity_code():
    """Length-1 blocks with no syndrome bits: corr never changes its input."""
    return LinearCode.from_parity_check(np.zeros((0, 1), dtype=np.int64), name='identity1')


CODES = {
    'hamming8_4': extended_hamming_8_4,
    'repetition2_1': repetition_2_1,
    'identity1': identity_code,
}
DEFAULT_CODE_NAME = 'hamming8_4'
