import unittest

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.entropy import (check_leftover_hash, check_uncertainty_relation, ClassicalJoint,
                                        hmax_classical, hmin_classical, measured_joint, UncertaintyInstance)
from certified_deletion.errors import ParameterError
from certified_deletion.hashcode import hash_eval, ToeplitzHash
from certified_deletion.qsim import COMPUTATIONAL, HADAMARD, make_epr_pairs, StateVector
from tests.test_certified_deletion import TestCertifiedDeletion


class TestClassicalEntropies(TestCertifiedDeletion):
    def random_joint(self, shape):
        probs = self.rng.random(shape) * (self.rng.random(shape) > 0.3)
        probs[0, 0] += 0.1
        return ClassicalJoint(('x', 'e'), probs / probs.sum())

    def test_hmin_independent_uniform(self):
        joint = ClassicalJoint(('x', 'e'), np.full((2, 2), 0.25))
        self.assertAlmostEqual(hmin_classical(joint, 'x', 'e'), 1.0, delta=1e-12, msg="independent E leaves one bit")

    def test_hmin_perfect_side_information(self):
        joint = ClassicalJoint(('x', 'e'), np.diag([0.5, 0.5]))
        self.assertAlmostEqual(hmin_classical(joint, 'x', 'e'), 0.0, delta=1e-12, msg="E = X leaves nothing")

    def test_hmin_first_bit_known(self):
        probs = np.zeros((4, 2))
        for x in range(4):
            probs[x, x >> 1] = 0.25
        joint = ClassicalJoint(('x', 'e'), probs)
        self.assertAlmostEqual(hmin_classical(joint, 'x', 'e'), 1.0, delta=1e-12,
                               msg="knowing one of two uniform bits should leave one bit")

    def test_hmin_without_side_information(self):
        joint = ClassicalJoint(('x',), [0.5, 0.25, 0.25])
        self.assertAlmostEqual(hmin_classical(joint, 'x'), 1.0, delta=1e-12, msg="-log2 of the largest probability")

    def test_hmax_uniform_full_support(self):
        joint = ClassicalJoint(('z',), np.full(8, 1 / 8))
        value, support = hmax_classical(joint, 'z')
        self.assertAlmostEqual(value, 3.0, delta=1e-12, msg="uniform on 8 values should have max-entropy 3")
        self.assertAlmostEqual(support, 3.0, delta=1e-12, msg="the support bound should be log2 8")

    def test_hmax_perfect_side_information(self):
        joint = ClassicalJoint(('z', 'y'), np.diag([0.25, 0.25, 0.5]))
        value, support = hmax_classical(joint, 'z', 'y')
        self.assertAlmostEqual(value, 0.0, delta=1e-12, msg="Z = Y should have max-entropy 0")
        self.assertEqual(support, 0.0, msg="a singleton support gives log2 1 = 0")

    def test_hmax_support_bound_dominates(self):
        for _ in range(100):
            joint = self.random_joint((4, 3))
            value, support = hmax_classical(joint, 'x', 'e')
            self.assertLessEqual(value, support + 1e-12, msg="the support bound should dominate the Renyi value")

    def test_hmin_at_most_hmax(self):
        for _ in range(100):
            joint = self.random_joint((5, 2))
            self.assertLessEqual(hmin_classical(joint, 'x', 'e'), hmax_classical(joint, 'x', 'e')[0] + 1e-12,
                                 msg="min-entropy should not exceed max-entropy")

    def test_marginal_reorders_axes(self):
        probs = self.rng.random((2, 3, 4))
        joint = ClassicalJoint(('a', 'b', 'c'), probs / probs.sum())
        np.testing.assert_allclose(joint.marginal(['c', 'a']).probs, (probs / probs.sum()).sum(axis=1).T,
                                   atol=1e-15, err_msg="marginal should sum out b and order axes as requested")

    def test_joint_validation(self):
        with self.assertRaises(ParameterError, msg="tables must sum to 1"):
            ClassicalJoint(('x',), [0.5, 0.4])
        with self.assertRaises(ParameterError, msg="probabilities must be non-negative"):
            ClassicalJoint(('x',), [1.5, -0.5])
        with self.assertRaises(ParameterError, msg="one name per axis"):
            ClassicalJoint(('x', 'y'), [0.5, 0.5])
        with self.assertRaises(ParameterError, msg="unknown variables should be rejected"):
            ClassicalJoint(('x',), [0.5, 0.5]).marginal(['y'])


class TestMeasuredJoint(TestCertifiedDeletion):
    def test_epr_pairs_are_perfectly_correlated(self):
        joint = measured_joint(make_epr_pairs(2), {'a': [0, 1], 'b': [2, 3]}, [HADAMARD] * 4)
        np.testing.assert_allclose(joint.probs, np.eye(4) / 4, atol=1e-12,
                                   err_msg="Hadamard read-outs of EPR halves should agree")

    def test_groups_read_most_significant_first(self):
        joint = measured_joint(StateVector.basis_state([1, 0, 0]), {'x': [0, 1]}, [COMPUTATIONAL] * 3)
        self.assertAlmostEqual(joint.probs[2], 1.0, delta=1e-12, msg="outcome 10 should be value 2")


class TestUncertaintyRelation(TestCertifiedDeletion):
    def random_state(self, qubits):
        amplitudes = self.rng.normal(size=1 << qubits) + 1j * self.rng.normal(size=1 << qubits)
        return StateVector(amplitudes / np.linalg.norm(amplitudes))

    def test_relation_holds_on_random_states(self):
        for _ in range(50):
            instance = UncertaintyInstance(
                state=self.random_state(4),
                a_qubits=(0, 1),
                e_qubits=(2,),
                e_bases=(int(self.rng.integers(0, 2)),),
                b_qubits=(3,),
                b_bases=(int(self.rng.integers(0, 2)),),
            )
            lhs_min, lhs_max, rhs = check_uncertainty_relation(instance)
            self.assertAlmostEqual(rhs, 2.0, delta=1e-9, msg="two qubits at overlap 1/2 give rhs 2")
            self.assertGreaterEqual(lhs_min + lhs_max, rhs - 1e-9, msg="the entropies should sum to at least rhs")

    def test_plus_states_are_tight(self):
        plus = StateVector(np.full(4, 0.5))
        lhs_min, lhs_max, rhs = check_uncertainty_relation(UncertaintyInstance(plus, a_qubits=(0, 1)))
        self.assertAlmostEqual(lhs_min, 2.0, delta=1e-9, msg="|++> read in the computational basis is uniform")
        self.assertAlmostEqual(lhs_max, 0.0, delta=1e-9, msg="|++> read in the Hadamard basis is certain")
        self.assertAlmostEqual(rhs, 2.0, delta=1e-9, msg="rhs should be the number of A qubits")

    def test_epr_copy_forces_min_entropy(self):
        instance = UncertaintyInstance(make_epr_pairs(3), a_qubits=(0, 1, 2), b_qubits=(3, 4, 5),
                                       b_bases=(HADAMARD,) * 3)
        lhs_min, lhs_max, rhs = check_uncertainty_relation(instance)
        self.assertAlmostEqual(lhs_max, 0.0, delta=1e-9, msg="B's Hadamard outcomes copy Z")
        self.assertAlmostEqual(lhs_min, 3.0, delta=1e-9, msg="with no E the computational read-out is uniform")
        self.assertAlmostEqual(rhs, 3.0, delta=1e-9, msg="three qubits give rhs 3")


class TestLeftoverHash(TestCertifiedDeletion):
    def test_uniform_input_only_fails_on_zero_seed(self):
        joint = ClassicalJoint(('x',), np.full(16, 1 / 16))
        distance, bound = check_leftover_hash(joint, 4, 1)
        self.assertAlmostEqual(distance, 1 / 32, delta=1e-12, msg="only the all-zero seed of 16 leaves bias 1/2")
        self.assertAlmostEqual(bound, 0.5 * 2 ** -1.5, delta=1e-12, msg="bound should be 1/2 * 2^(-(4 - 1) / 2)")
        self.assertLessEqual(distance, bound, msg="uniform input should meet the bound")

    def test_known_input_is_trivially_bounded(self):
        joint = ClassicalJoint(('x', 'e'), np.diag(np.full(4, 0.25)))
        distance, bound = check_leftover_hash(joint, 2, 1)
        self.assertLessEqual(distance, 1.0, msg="distances never exceed 1")
        self.assertGreaterEqual(bound, 0.5 * 2 ** 0.5 - 1e-12, msg="H_min = 0 gives bound 1/2 * 2^(n/2)")

    def test_random_instances_meet_bound(self):
        for _ in range(30):
            probs = self.rng.random((16, 3)) ** 4
            joint = ClassicalJoint(('x', 'e'), probs / probs.sum())
            for n in (1, 2):
                distance, bound = check_leftover_hash(joint, 4, n)
                self.assertLessEqual(distance, bound + 1e-12, msg="hashing should meet the leftover hash bound")

    def test_distance_uses_the_scheme_hash(self):
        s, n = 3, 2
        probs = self.rng.random((1 << s, 2))
        joint = ClassicalJoint(('x', 'e'), probs / probs.sum())
        pair = joint.probs
        seeds = 1 << (s + n - 1)
        expected = 0.0
        for seed in range(seeds):
            h = ToeplitzHash(s, n, BitString.from_int(seed, s + n - 1))
            hashed = np.zeros((1 << n, 2))
            for x in range(1 << s):
                hashed[hash_eval(h, BitString.from_int(x, s)).to_int()] += pair[x]
            expected += 0.5 * np.abs(hashed - pair.sum(axis=0) / (1 << n)).sum()
        distance, _ = check_leftover_hash(joint, s, n)
        self.assertAlmostEqual(distance, expected / seeds, delta=1e-12,
                               msg="the distance should average hash_eval over every Toeplitz seed")

    def test_size_caps(self):
        joint = ClassicalJoint(('x',), np.full(512, 1 / 512))
        with self.assertRaises(ParameterError, msg="s above 8 should be rejected"):
            check_leftover_hash(joint, 9, 1)
        with self.assertRaises(ParameterError, msg="X must have 2^s values"):
            check_leftover_hash(ClassicalJoint(('x',), np.full(8, 1 / 8)), 4, 1)


if __name__ == '__main__':
    unittest.main()
