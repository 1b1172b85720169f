"""
Packed GF(2) bitstrings.

Bits are stored LSB-first in little-endian 64-bit words: bit i of a string lives in word i // 64 at bit
position i % 64. Serialized bytes use the same order (bit i is bit i % 8 of byte i // 8), and any padding
bits past the declared length are always zero.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from certified_deletion.errors import LengthMismatchError

WORD_BITS = 64
_WORD_DTYPE = np.dtype('<u8')
# numpy < 2.0 has no popcount ufunc
_HAS_BITWISE_COUNT = hasattr(np, 'bitwise_count')


class BitString:
    """
    Immutable bitstring over GF(2). Index i here is bit i+1 of the 1-based strings x = (x_1, ..., x_n).
    """

    def __init__(self, words, length):
        words = np.ascontiguousarray(words, dtype=_WORD_DTYPE)
        if length < 0:
            raise LengthMismatchError("BitString length must be non-negative, got {}".format(length))
        if len(words) != _word_count(length):
            raise LengthMismatchError(
                "{} words cannot hold exactly {} bits".format(len(words), length)
            )
        words.setflags(write=False)
        self._words = words
        self._length = length

    @classmethod
    def zeros(cls, length):
        return cls(np.zeros(_word_count(length), dtype=_WORD_DTYPE), length)

    @classmethod
    def ones(cls, length):
        return cls.from_bits(np.ones(length, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits):
        """Builds a BitString from any sequence of 0/1 values (list, str of '0'/'1', numpy array)."""
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        return cls.from_bytes(np.packbits(arr, bitorder='little').tobytes(), arr.size)

    @classmethod
    def from_bytes(cls, data, length):
        needed = _byte_count(length)
        if len(data) != needed:
            raise LengthMismatchError("{} bits need {} bytes, got {}".format(length, needed, len(data)))
        raw = np.frombuffer(bytes(data), dtype=np.uint8)
        if length % 8 and raw[-1] >> (length % 8):
            raise LengthMismatchError("padding bits past length {} are not zero".format(length))
        padded = np.zeros(_word_count(length) * 8, dtype=np.uint8)
        padded[:needed] = raw
        return cls(padded.view(_WORD_DTYPE), length)

    @classmethod
    def from_hex(cls, hex_str, length):
        try:
            data = bytes.fromhex(hex_str)
        except ValueError as e:
            raise LengthMismatchError("invalid hex string: {}".format(e))
        return cls.from_bytes(data, length)

    @classmethod
    def from_int(cls, value, length):
        """Bit i of the result is bit i of the integer value."""
        if value < 0 or value >> length:
            raise LengthMismatchError("{} does not fit in {} bits".format(value, length))
        return cls.from_bytes(value.to_bytes(_byte_count(length), 'little'), length)

    @classmethod
    def random(cls, length, rng):
        return cls.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8))

    def __len__(self):
        return self._length

    @property
    def words(self):
        return self._words

    @cached_property
    def bits(self):
        """Read-only uint8 array of the bits, index-aligned with the string."""
        arr = np.unpackbits(self._words.view(np.uint8), bitorder='little')[:self._length]
        arr.setflags(write=False)
        return arr

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitString.from_bits(self.bits[index])
        if index < 0:
            index += self._length
        if not 0 <= index < self._length:
            raise IndexError("bit index {} out of range for length {}".format(index, self._length))
        return int((int(self._words[index // WORD_BITS]) >> (index % WORD_BITS)) & 1)

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return self._length == other._length and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self._length, self._words.tobytes()))

    def __xor__(self, other):
        return xor(self, other)

    def __add__(self, other):
        return concat(self, other)

    def __repr__(self):
        return "BitString('{}')".format(self.to_bitstr())

    def weight(self):
        return weight(self)

    def restrict(self, index_set):
        return restrict(self, index_set)

    def any(self):
        return bool(self._words.any())

    def to_bitstr(self):
        return ''.join('1' if b else '0' for b in self.bits)

    def to_bytes(self):
        return self._words.view(np.uint8)[:_byte_count(self._length)].tobytes()

    def to_hex(self):
        return self.to_bytes().hex()

    def to_int(self):
        return int.from_bytes(self.to_bytes(), 'little')


@dataclass(frozen=True)
class IndexSet:
    """Sorted, distinct zero-based positions inside a universe [0, universe)."""
    positions: tuple
    universe: int

    def __post_init__(self):
        positions = tuple(int(p) for p in self.positions)
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise ValueError("index set positions must be strictly increasing: {}".format(positions))
        if positions and (positions[0] < 0 or positions[-1] >= self.universe):
            raise LengthMismatchError(
                "index set positions {} out of range for universe {}".format(positions, self.universe)
            )
        object.__setattr__(self, 'positions', positions)

    @classmethod
    def full(cls, universe):
        return cls(tuple(range(universe)), universe)

    @classmethod
    def from_mask(cls, mask):
        return cls(tuple(int(i) for i in np.flatnonzero(mask.bits)), len(mask))

    def __len__(self):
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def __contains__(self, position):
        return position in self.positions

    @cached_property
    def array(self):
        arr = np.array(self.positions, dtype=np.intp)
        arr.setflags(write=False)
        return arr

    def complement(self):
        members = set(self.positions)
        return IndexSet(tuple(i for i in range(self.universe) if i not in members), self.universe)

    def to_mask(self):
        mask = np.zeros(self.universe, dtype=np.uint8)
        mask[self.array] = 1
        return BitString.from_bits(mask)


def weight(x):
    """Hamming weight."""
    if _HAS_BITWISE_COUNT:
        return int(np.bitwise_count(x.words).sum())
    return int(np.unpackbits(x.words.view(np.uint8)).sum())


def xor(x, y):
    if len(x) != len(y):
        raise LengthMismatchError("cannot xor bitstrings of lengths {} and {}".format(len(x), len(y)))
    return BitString(np.bitwise_xor(x.words, y.words), len(x))


def concat(x, y):
    return BitString.from_bits(np.concatenate([x.bits, y.bits]))


def restrict(x, index_set):
    """x|_I: the bits of x at the positions of I, in increasing position order."""
    if index_set.universe != len(x):
        raise LengthMismatchError(
            "index set over [{}] cannot restrict a string of length {}".format(index_set.universe, len(x))
        )
    return BitString.from_bits(x.bits[index_set.array])


def scatter(values, index_set, fill=None):
    """Inverse of restrict: places values at the positions of I inside a string of length I.universe."""
    if len(values) != len(index_set):
        raise LengthMismatchError(
            "{} values cannot fill an index set of size {}".format(len(values), len(index_set))
        )
    out = np.zeros(index_set.universe, dtype=np.uint8) if fill is None else fill.bits.copy()
    out[index_set.array] = values.bits
    return BitString.from_bits(out)


def index_sets_from_basis(theta):
    """Returns (I, Ī): the positions where theta is 0 and where it is 1."""
    bits = theta.bits
    universe = len(theta)
    zeros = IndexSet(tuple(int(i) for i in np.flatnonzero(bits == 0)), universe)
    ones = IndexSet(tuple(int(i) for i in np.flatnonzero(bits)), universe)
    return zeros, ones


def _word_count(length):
    return (length + WORD_BITS - 1) // WORD_BITS


def _byte_count(length):
    return (length + 7) // 8
