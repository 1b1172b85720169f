import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from certified_deletion.bitvec import BitString, index_sets_from_basis, restrict
from certified_deletion.errors import LengthMismatchError, ParameterError
from certified_deletion.hashcode import CODES, DEFAULT_CODE_NAME, LinearCode, sample_hash, ToeplitzHash
from certified_deletion.qsim import prepare_wiesner, QuantumRegister


@dataclass(frozen=True)
class SchemeParams:
    """
    Parameters of the prepare-and-measure scheme: n plaintext bits, m = s + k qubits of which k (the weight of
    theta) are used to verify deletion and s to extract the pad, tau error-check hash bits, mu syndrome bits and
    the verification threshold rate delta.
    """
    n: int
    m: int
    s: int
    k: int
    tau: int
    mu: int
    delta: float
    code: LinearCode = field(default_factory=CODES[DEFAULT_CODE_NAME], repr=False)
    security: int = None

    def __post_init__(self):
        for name in ('n', 'm', 's', 'k', 'tau', 'mu'):
            if getattr(self, name) < 0:
                raise ParameterError("{} must be non-negative, got {}".format(name, getattr(self, name)))
        if self.m != self.s + self.k:
            raise ParameterError("m must equal s + k ({} != {} + {})".format(self.m, self.s, self.k))
        if self.k < 1:
            raise ParameterError("k must be at least 1, got {}".format(self.k))
        if self.n < 1 or self.tau < 1:
            raise ParameterError("n and tau must be at least 1 (n={}, tau={})".format(self.n, self.tau))
        if self.s % self.code.block_in:
            raise ParameterError(
                "s={} is not a multiple of the code block length {}".format(self.s, self.code.block_in)
            )
        if self.mu != self.code.syndrome_length(self.s):
            raise ParameterError(
                "mu must be {} for s={} with code {}, got {}".format(
                    self.code.syndrome_length(self.s), self.s, self.code.name, self.mu)
            )
        if not 0.0 <= self.delta < 0.5:
            raise ParameterError("delta must lie in [0, 1/2), got {}".format(self.delta))

    @classmethod
    def build(cls, n, s, k, tau, delta, code=None, security=None):
        """Derives m and mu from the other parameters."""
        code = code if code is not None else CODES[DEFAULT_CODE_NAME]()
        return cls(n=n, m=s + k, s=s, k=k, tau=tau, mu=code.syndrome_length(s), delta=delta, code=code,
                   security=security)

    @property
    def threshold(self):
        """k * delta, compared without rounding."""
        return self.k * self.delta

    def to_dict(self):
        doc = {
            'n': self.n,
            'm': self.m,
            's': self.s,
            'k': self.k,
            'tau': self.tau,
            'mu': self.mu,
            'delta': self.delta,
            'code': self.code.name,
        }
        if self.security is not None:
            doc['security'] = self.security
        return doc


@dataclass(frozen=True)
class AuxKey:
    r: BitString


@dataclass(frozen=True)
class DecKey:
    theta: BitString
    u: BitString
    d: BitString
    e: BitString
    h_pa: ToeplitzHash
    h_ec: ToeplitzHash

    @cached_property
    def index_sets(self):
        """(I, Ī): the computational-basis and Hadamard-basis positions."""
        return index_sets_from_basis(self.theta)


@dataclass(frozen=True)
class ClassicalPart:
    c: BitString
    p: BitString
    q: BitString


@dataclass
class Ciphertext:
    quantum: QuantumRegister
    c: BitString
    p: BitString
    q: BitString

    @property
    def classical(self):
        return ClassicalPart(self.c, self.p, self.q)


@dataclass(frozen=True)
class DeletionCertificate:
    y: BitString


@dataclass(frozen=True)
class DecryptOutput:
    plaintext: BitString
    flag: int


class CertifiedDeletionScheme:
    """Key generation, encryption, decryption, deletion and verification for one parameter set."""

    def __init__(self, params, logger=None):
        self.params = params
        self._logger = (logger or logging.getLogger(__name__)).getChild("CertifiedDeletionScheme")

    def keygen(self, rng):
        p = self.params
        r = BitString.random(p.m, rng)
        theta_bits = np.zeros(p.m, dtype=np.uint8)
        theta_bits[rng.choice(p.m, size=p.k, replace=False)] = 1
        key = DecKey(
            theta=BitString.from_bits(theta_bits),
            u=BitString.random(p.n, rng),
            d=BitString.random(p.tau, rng),
            e=BitString.random(p.mu, rng),
            h_pa=sample_hash(p.s, p.n, rng),
            h_ec=sample_hash(p.s, p.tau, rng),
        )
        self._logger.debug("Generated keys for m=%d qubits (k=%d Hadamard positions)", p.m, p.k)
        return AuxKey(r), key

    def encrypt(self, msg, aux, key):
        p = self.params
        if len(msg) != p.n:
            raise LengthMismatchError("message must have {} bits, got {}".format(p.n, len(msg)))
        self._check_keys(aux, key)
        index_set, _ = key.index_sets
        r_i = restrict(aux.r, index_set)
        x = key.h_pa(r_i)
        return Ciphertext(
            quantum=prepare_wiesner(aux.r, key.theta),
            c=msg ^ x ^ key.u,
            p=key.h_ec(r_i) ^ key.d,
            q=p.code.synd(r_i) ^ key.e,
        )

    def decrypt(self, key, ct, rng):
        """Measures the quantum part in basis theta (destroying it) and decodes; failure is signalled by flag 0."""
        self._check_ciphertext(ct)
        return self.decode(key, ct.classical, ct.quantum.measure_all(key.theta, rng))

    def decode(self, key, classical, r):
        """Classical post-processing of decryption, given the measured string r (all m positions)."""
        if len(r) != self.params.m:
            raise LengthMismatchError("measured string must have {} bits, got {}".format(self.params.m, len(r)))
        index_set, _ = key.index_sets
        r_corrected = self.params.code.corr(restrict(r, index_set), classical.q ^ key.e)
        flag = int(key.h_ec(r_corrected) ^ key.d == classical.p)
        if not flag:
            self._logger.debug("Error-check hash mismatch; decryption flag is 0")
        return DecryptOutput(classical.c ^ key.h_pa(r_corrected) ^ key.u, flag)

    def delete(self, ct, rng):
        self._check_ciphertext(ct)
        return delete_ciphertext(ct, rng)

    def count_mismatches(self, aux, key, cert):
        """omega(y|_Ī xor r|_Ī)."""
        if len(cert.y) != self.params.m:
            raise LengthMismatchError("certificate must have {} bits, got {}".format(self.params.m, len(cert.y)))
        _, complement = key.index_sets
        return (restrict(cert.y, complement) ^ restrict(aux.r, complement)).weight()

    def verify(self, aux, key, cert):
        mismatches = self.count_mismatches(aux, key, cert)
        ok = int(mismatches < self.params.threshold)
        self._logger.debug("Certificate has %d mismatches against threshold %s: ok=%d",
                           mismatches, self.params.threshold, ok)
        return ok

    def _check_keys(self, aux, key):
        p = self.params
        expected = (('r', aux.r, p.m), ('theta', key.theta, p.m), ('u', key.u, p.n), ('d', key.d, p.tau),
                    ('e', key.e, p.mu))
        for name, value, length in expected:
            if len(value) != length:
                raise LengthMismatchError("key component {} must have {} bits, got {}".format(name, length, len(value)))
        if key.theta.weight() != p.k:
            raise ParameterError("theta must have weight k={}, got {}".format(p.k, key.theta.weight()))

    def _check_ciphertext(self, ct):
        p = self.params
        expected = (('quantum', ct.quantum, p.m), ('c', ct.c, p.n), ('p', ct.p, p.tau), ('q', ct.q, p.mu))
        for name, value, length in expected:
            if len(value) != length:
                raise LengthMismatchError(
                    "ciphertext component {} must have {} bits, got {}".format(name, length, len(value))
                )


def delete_ciphertext(ct, rng):
    """Measures every qubit in the Hadamard basis; needs no key and no parameters beyond the register itself."""
    return DeletionCertificate(ct.quantum.measure_all(BitString.ones(len(ct.quantum)), rng))
