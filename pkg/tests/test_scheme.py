import unittest

import numpy as np
from scipy.stats import binom

from certified_deletion.bitvec import BitString, restrict
from certified_deletion.errors import LengthMismatchError, ParameterError
from certified_deletion.hashcode import extended_hamming_8_4, repetition_2_1, ToeplitzHash
from certified_deletion.scheme import (Ciphertext, CertifiedDeletionScheme, DecKey, delete_ciphertext,
                                       DeletionCertificate, SchemeParams)
from tests.test_certified_deletion import TestCertifiedDeletion


class TestSchemeParams(TestCertifiedDeletion):
    def test_build_derives_m_and_mu(self):
        params = self.acceptance_params()
        self.assertEqual((params.m, params.mu), (512, 192),
                         msg="s=384, k=128 with [8,4] blocks gives m=512, mu=192")

    def test_threshold_is_not_rounded(self):
        self.assertAlmostEqual(self.acceptance_params().threshold, 6.4, places=12, msg="k * delta should be 6.4")

    def test_rejects_inconsistent_m(self):
        code = extended_hamming_8_4()
        with self.assertRaises(ParameterError, msg="m must equal s + k"):
            SchemeParams(n=8, m=20, s=16, k=5, tau=4, mu=8, delta=0.05, code=code)

    def test_rejects_partial_code_block(self):
        with self.assertRaises(ParameterError, msg="s must be a multiple of the code block length"):
            SchemeParams.build(n=8, s=12, k=4, tau=4, delta=0.05)

    def test_rejects_delta_at_half(self):
        with self.assertRaises(ParameterError, msg="delta must stay below 1/2"):
            SchemeParams.build(n=8, s=16, k=4, tau=4, delta=0.5)

    def test_rejects_zero_k(self):
        with self.assertRaises(ParameterError, msg="k must be at least 1"):
            SchemeParams.build(n=8, s=16, k=0, tau=4, delta=0.05)


class TestCertifiedDeletionScheme(TestCertifiedDeletion):
    def setUp(self):
        super().setUp()
        self.params = self.acceptance_params()
        self.scheme = CertifiedDeletionScheme(self.params, self.logger)

    def test_keygen_theta_has_weight_k(self):
        for _ in range(20):
            _, key = self.scheme.keygen(self.rng)
            self.assertEqual(key.theta.weight(), self.params.k, msg="theta should always have weight k")

    def test_keygen_is_deterministic(self):
        first = self.scheme.keygen(np.random.default_rng(99))
        second = self.scheme.keygen(np.random.default_rng(99))
        self.assertEqual(first, second, msg="the same seed should give the same keys")

    def test_keygen_theta_marginals(self):
        params = SchemeParams.build(n=4, s=16, k=8, tau=4, delta=0.1)
        scheme = CertifiedDeletionScheme(params, self.logger)
        draws = 20000
        counts = np.zeros(params.m)
        for _ in range(draws):
            counts += scheme.keygen(self.rng)[1].theta.bits
        expected = params.k / params.m
        sigma = np.sqrt(expected * (1 - expected) / draws)
        np.testing.assert_array_less(np.abs(counts / draws - expected), 5 * sigma,
                                     err_msg="each position should be in the Hadamard set with probability k/m")

    def test_decrypt_of_encrypt_is_correct(self):
        for _ in range(200):
            aux, key = self.scheme.keygen(self.rng)
            msg = BitString.random(self.params.n, self.rng)
            result = self.scheme.decrypt(key, self.scheme.encrypt(msg, aux, key), self.rng)
            self.assertEqual((result.plaintext, result.flag), (msg, 1),
                             msg="noiseless decryption should return the message with flag 1")

    def test_zero_message_ciphertext_is_pad(self):
        aux, key = self.scheme.keygen(self.rng)
        ct = self.scheme.encrypt(BitString.zeros(self.params.n), aux, key)
        index_set, _ = key.index_sets
        self.assertEqual(ct.c, key.h_pa(restrict(aux.r, index_set)) ^ key.u, msg="c should be x xor u for msg 0")

    def test_ciphertexts_under_one_key_differ_by_messages(self):
        aux, key = self.scheme.keygen(self.rng)
        msg, other = BitString.random(self.params.n, self.rng), BitString.random(self.params.n, self.rng)
        ct, other_ct = self.scheme.encrypt(msg, aux, key), self.scheme.encrypt(other, aux, key)
        self.assertEqual(ct.c ^ other_ct.c, msg ^ other, msg="c xor c' should equal msg xor msg'")

    def test_degenerate_key(self):
        params = self.params
        aux, key = self.scheme.keygen(self.rng)
        zero_key = DecKey(
            theta=key.theta,
            u=BitString.zeros(params.n),
            d=BitString.zeros(params.tau),
            e=BitString.zeros(params.mu),
            h_pa=ToeplitzHash(params.s, params.n, BitString.zeros(params.s + params.n - 1)),
            h_ec=ToeplitzHash(params.s, params.tau, BitString.zeros(params.s + params.tau - 1)),
        )
        msg = BitString.random(params.n, self.rng)
        ct = self.scheme.encrypt(msg, aux, zero_key)
        index_set, _ = key.index_sets
        self.assertEqual(ct.c, msg, msg="zero hash and pad should leave the message in the clear")
        self.assertEqual(ct.p, BitString.zeros(params.tau), msg="zero hash and pad should give p = 0")
        self.assertEqual(ct.q, params.code.synd(restrict(aux.r, index_set)),
                         msg="zero pad should give q = synd(r|I)")

    def test_decrypt_corrects_one_flip_per_block(self):
        for _ in range(50):
            aux, key = self.scheme.keygen(self.rng)
            msg = BitString.random(self.params.n, self.rng)
            ct = self.scheme.encrypt(msg, aux, key)
            index_set, _ = key.index_sets
            blocks = self.params.s // 8
            chosen = np.arange(blocks) * 8 + self.rng.integers(0, 8, size=blocks)
            flips = np.zeros(self.params.m, dtype=np.uint8)
            flips[np.asarray(index_set.positions)[chosen]] = 1
            ct.quantum.flip(BitString.from_bits(flips))
            result = self.scheme.decrypt(key, ct, self.rng)
            self.assertEqual((result.plaintext, result.flag), (msg, 1),
                             msg="one flip per code block on I should be corrected")

    def test_classical_part_is_malleable(self):
        aux, key = self.scheme.keygen(self.rng)
        msg, offset = BitString.random(self.params.n, self.rng), BitString.random(self.params.n, self.rng)
        ct = self.scheme.encrypt(msg, aux, key)
        tampered = Ciphertext(ct.quantum, ct.c ^ offset, ct.p, ct.q)
        result = self.scheme.decrypt(key, tampered, self.rng)
        self.assertEqual((result.plaintext, result.flag), (msg ^ offset, 1),
                         msg="the flag only checks the measured string, so c offsets pass through")

    def test_decrypt_with_wrong_key_flags_zero(self):
        failures = 0
        for _ in range(200):
            aux, key = self.scheme.keygen(self.rng)
            _, wrong_key = self.scheme.keygen(self.rng)
            ct = self.scheme.encrypt(BitString.random(self.params.n, self.rng), aux, key)
            failures += self.scheme.decrypt(wrong_key, ct, self.rng).flag
        self.assertEqual(failures, 0, msg="a wrong key should fail the error-check hash")

    def test_honest_delete_verifies(self):
        for _ in range(200):
            aux, key = self.scheme.keygen(self.rng)
            ct = self.scheme.encrypt(BitString.random(self.params.n, self.rng), aux, key)
            cert = self.scheme.delete(ct, self.rng)
            self.assertEqual(self.scheme.count_mismatches(aux, key, cert), 0,
                             msg="Hadamard positions should be read back exactly")
            self.assertEqual(self.scheme.verify(aux, key, cert), 1, msg="honest deletion should verify")

    def test_delete_is_deterministic_per_seed(self):
        aux, key = self.scheme.keygen(self.rng)
        ct = self.scheme.encrypt(BitString.random(self.params.n, self.rng), aux, key)
        copy = Ciphertext(ct.quantum.copy(), ct.c, ct.p, ct.q)
        first = delete_ciphertext(ct, np.random.default_rng(5))
        self.assertEqual(first, delete_ciphertext(copy, np.random.default_rng(5)),
                         msg="deleting identical ciphertexts with the same seed should give the same certificate")

    def test_delete_randomizes_computational_positions(self):
        aux, key = self.scheme.keygen(self.rng)
        index_set, _ = key.index_sets
        ones = 0
        for _ in range(100):
            ct = self.scheme.encrypt(BitString.random(self.params.n, self.rng), aux, key)
            ones += (restrict(delete_ciphertext(ct, self.rng).y, index_set) ^ restrict(aux.r, index_set)).weight()
        self.assertAlmostEqual(ones / (100 * self.params.s), 0.5, delta=0.02,
                               msg="positions in I should disagree with r half the time after deletion")

    def test_verify_threshold_is_strict(self):
        aux, key = self.scheme.keygen(self.rng)
        _, complement = key.index_sets
        for mismatches, expected in ((6, 1), (7, 0)):
            flips = np.zeros(self.params.m, dtype=np.uint8)
            flips[list(complement.positions[:mismatches])] = 1
            cert = DeletionCertificate(aux.r ^ BitString.from_bits(flips))
            self.assertEqual(self.scheme.verify(aux, key, cert), expected,
                             msg="{} mismatches against threshold 6.4".format(mismatches))

    def test_verify_rejects_complemented_certificate(self):
        aux, key = self.scheme.keygen(self.rng)
        cert = DeletionCertificate(aux.r ^ BitString.ones(self.params.m))
        self.assertEqual(self.scheme.verify(aux, key, cert), 0, msg="every Hadamard bit wrong should fail")

    def test_random_certificates_never_verify(self):
        aux, key = self.scheme.keygen(self.rng)
        passes = sum(self.scheme.verify(aux, key, DeletionCertificate(BitString.random(self.params.m, self.rng)))
                     for _ in range(2000))
        self.assertEqual(passes, 0, msg="a uniform certificate passes with probability below 1e-25")
        self.assertLess(binom.cdf(6, 128, 0.5), 1e-25, msg="Pr[Binom(128, 1/2) < 6.4] should be below 1e-25")

    def test_encrypt_rejects_wrong_message_length(self):
        aux, key = self.scheme.keygen(self.rng)
        with self.assertRaises(LengthMismatchError, msg="messages must have n bits"):
            self.scheme.encrypt(BitString.zeros(self.params.n - 1), aux, key)

    def test_decode_rejects_wrong_measurement_length(self):
        aux, key = self.scheme.keygen(self.rng)
        ct = self.scheme.encrypt(BitString.zeros(self.params.n), aux, key)
        with self.assertRaises(LengthMismatchError, msg="the measured string must have m bits"):
            self.scheme.decode(key, ct.classical, BitString.zeros(self.params.m - 1))

    def test_micro_params_round_trip(self):
        params = self.micro_params()
        scheme = CertifiedDeletionScheme(params, self.logger)
        self.assertEqual(params.code, repetition_2_1(), msg="micro params should use the repetition code")
        for _ in range(100):
            aux, key = scheme.keygen(self.rng)
            msg = BitString.random(1, self.rng)
            ct = scheme.encrypt(msg, aux, key)
            self.assertEqual(scheme.decrypt(key, ct, self.rng).plaintext, msg, msg="micro round trip should hold")


if __name__ == '__main__':
    unittest.main()
