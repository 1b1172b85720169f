"""
Adversaries for the certified-deletion game.

A strategy is three callbacks sharing an opaque per-trial state: phase0 picks the challenge message, phase1 sees
only the quantum part of the ciphertext (through CiphertextView) and returns a deletion certificate, and phase2
runs only after an accepted certificate, with the decryption key and the classical part of the ciphertext.
"""
from abc import ABC, abstractmethod

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.errors import ConfigurationError
from certified_deletion.scheme import CertifiedDeletionScheme, DeletionCertificate


class CiphertextView:
    """The quantum part of a ciphertext as an adversary holds it: the qubits can be measured, never read."""

    def __init__(self, register):
        self._register = register

    def __len__(self):
        return len(self._register)

    @property
    def num_qubits(self):
        return len(self._register)

    def measure(self, index, basis, rng):
        return self._register.measure(index, basis, rng)

    def measure_all(self, bases, rng):
        return self._register.measure_all(bases, rng)


class AdversaryStrategy(ABC):
    name = None

    def phase0(self, params, rng):
        """Returns (msg0, state). The default challenge message is all ones."""
        msg0 = BitString.ones(params.n)
        return msg0, {'params': params, 'msg0': msg0}

    @abstractmethod
    def phase1(self, view, state, rng):
        """Returns (DeletionCertificate, state)."""

    @abstractmethod
    def phase2(self, key, classical, state, rng):
        """Returns the guess b'."""

    def describe(self):
        return self.name


class HonestDeleter(AdversaryStrategy):
    name = 'honest'
    OUTPUT_RULES = ('always_one', 'always_zero', 'coin')

    def __init__(self, output_rule='always_one'):
        if output_rule not in self.OUTPUT_RULES:
            raise ConfigurationError(
                "unknown output rule '{}'; must be one of {}".format(output_rule, ', '.join(self.OUTPUT_RULES))
            )
        self.output_rule = output_rule

    def phase1(self, view, state, rng):
        y = view.measure_all(BitString.ones(view.num_qubits), rng)
        return DeletionCertificate(y), state

    def phase2(self, key, classical, state, rng):
        if self.output_rule == 'always_one':
            return 1
        if self.output_rule == 'always_zero':
            return 0
        return int(rng.integers(0, 2))

    def describe(self):
        return "{}:rule={}".format(self.name, self.output_rule)


class FullComputationalMeasurer(AdversaryStrategy):
    """
    Measures every qubit in the computational basis, which reveals r on I, and fabricates a uniform certificate.
    After an accepted certificate it decrypts from its own outcomes and answers whether it found msg0.
    """
    name = 'full-computational'

    def phase1(self, view, state, rng):
        state['outcomes'] = view.measure_all(BitString.zeros(view.num_qubits), rng)
        return DeletionCertificate(BitString.random(view.num_qubits, rng)), state

    def phase2(self, key, classical, state, rng):
        return _guess_from_outcomes(key, classical, state)


class PartialMeasurer(AdversaryStrategy):
    """
    Measures a random fraction f of the qubits in the computational basis and the rest in the Hadamard basis.
    The Hadamard outcomes go into the certificate; the other certificate bits are fabricated.
    """
    name = 'partial'

    def __init__(self, fraction):
        if not 0.0 <= fraction <= 1.0:
            raise ConfigurationError("measured fraction must lie in [0, 1], got {}".format(fraction))
        self.fraction = fraction

    def phase1(self, view, state, rng):
        m = view.num_qubits
        bases = np.ones(m, dtype=np.uint8)
        bases[rng.choice(m, size=int(round(self.fraction * m)), replace=False)] = 0
        bases = BitString.from_bits(bases)
        outcomes = view.measure_all(bases, rng)
        fabricated = BitString.random(m, rng)
        y = np.where(bases.bits == 1, outcomes.bits, fabricated.bits)
        # unknown computational-basis positions are guessed with the fabricated bits
        state['outcomes'] = BitString.from_bits(np.where(bases.bits == 0, outcomes.bits, fabricated.bits))
        return DeletionCertificate(BitString.from_bits(y)), state

    def phase2(self, key, classical, state, rng):
        return _guess_from_outcomes(key, classical, state)

    def describe(self):
        return "{}:f={}".format(self.name, self.fraction)


class ForgingNonMeasurer(AdversaryStrategy):
    """
    Keeps the qubits untouched and forges a uniform certificate. Whenever the forgery is accepted it measures the
    qubits in the disclosed basis theta and decrypts perfectly, so its gap conditioned on acceptance is 1 while the
    unconditioned gap stays at the forgery acceptance rate.
    """
    name = 'forging'

    def phase1(self, view, state, rng):
        state['view'] = view
        return DeletionCertificate(BitString.random(view.num_qubits, rng)), state

    def phase2(self, key, classical, state, rng):
        state['outcomes'] = state['view'].measure_all(key.theta, rng)
        return _guess_from_outcomes(key, classical, state)


STRATEGIES = {
    HonestDeleter.name: HonestDeleter,
    FullComputationalMeasurer.name: FullComputationalMeasurer,
    PartialMeasurer.name: PartialMeasurer,
    ForgingNonMeasurer.name: ForgingNonMeasurer,
}


def parse_strategy(text):
    """
    Builds a strategy from 'name' or 'name:key=value,...', e.g. 'honest', 'honest:rule=coin', 'partial:f=0.3'.
    """
    name, _, options = text.partition(':')
    if name not in STRATEGIES:
        raise ConfigurationError(
            "unknown strategy '{}'; must be one of {}".format(name, ', '.join(sorted(STRATEGIES)))
        )
    kwargs = {}
    for option in filter(None, options.split(',')):
        key, sep, value = option.partition('=')
        if not sep:
            raise ConfigurationError("strategy option '{}' is not of the form key=value".format(option))
        kwargs[key.strip()] = value.strip()

    if name == HonestDeleter.name:
        _unexpected(name, kwargs, ('rule',))
        return HonestDeleter(kwargs.get('rule', 'always_one'))
    if name == PartialMeasurer.name:
        _unexpected(name, kwargs, ('f',))
        if 'f' not in kwargs:
            raise ConfigurationError("strategy 'partial' needs the measured fraction, e.g. partial:f=0.3")
        try:
            fraction = float(kwargs['f'])
        except ValueError:
            raise ConfigurationError("invalid measured fraction '{}'".format(kwargs['f']))
        return PartialMeasurer(fraction)
    _unexpected(name, kwargs, ())
    return STRATEGIES[name]()


def _unexpected(name, kwargs, allowed):
    extra = sorted(set(kwargs) - set(allowed))
    if extra:
        raise ConfigurationError("strategy '{}' does not take option(s) {}".format(name, ', '.join(extra)))


def _guess_from_outcomes(key, classical, state):
    params = state['params']
    result = CertifiedDeletionScheme(params).decode(key, classical, state['outcomes'])
    if not result.flag:
        return 0
    return int(result.plaintext == state['msg0'])
