import unittest
from collections import Counter

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.epr_game import (AlwaysOne, computational_copy_adversary, honest_epr_adversary,
                                         OracleAdversary, product_state_adversary, run_epr_game_oracle, SCENARIOS)
from certified_deletion.errors import ParameterError, QuantumSimulationError
from certified_deletion.games import run_game1
from certified_deletion.hashcode import identity_code
from certified_deletion.qsim import COMPUTATIONAL, HADAMARD, make_epr_pairs
from certified_deletion.scheme import SchemeParams
from certified_deletion.strategies import FullComputationalMeasurer, HonestDeleter
from tests.test_certified_deletion import TestCertifiedDeletion

CELLS = ((0, 0), (1, 0), (1, 1))


class TestEprGameOracle(TestCertifiedDeletion):
    def assert_table(self, result, b, expected):
        for cell in CELLS:
            self.assertAlmostEqual(result.probability(b, *cell), expected.get(cell, 0.0), delta=1e-10,
                                   msg="b={}, (ok, b')={}".format(b, cell))

    def test_honest_epr_always_accepts(self):
        params = self.oracle_params()
        result = run_epr_game_oracle(params, honest_epr_adversary(params))
        for b in (0, 1):
            self.assert_table(result, b, {(1, 1): 1.0})
        self.assertAlmostEqual(result.gap, 0.0, delta=1e-10, msg="answering 1 regardless of b gives no gap")

    def test_honest_epr_three_qubits(self):
        params = SchemeParams.build(n=1, s=2, k=1, tau=1, delta=0.25, code=identity_code())
        result = run_epr_game_oracle(params, honest_epr_adversary(params))
        for b in (0, 1):
            self.assertAlmostEqual(result.accept_probability(b), 1.0, delta=1e-10,
                                   msg="Hadamard halves of EPR pairs should always match r on the Hadamard positions")

    def test_product_state_accepts_half_the_time(self):
        params = self.oracle_params()
        result = run_epr_game_oracle(params, product_state_adversary(params))
        for b in (0, 1):
            self.assert_table(result, b, {(0, 0): 0.5, (1, 1): 0.5})

    def test_computational_copy_learns_the_message(self):
        params = self.oracle_params()
        result = run_epr_game_oracle(params, computational_copy_adversary(params))
        self.assert_table(result, 0, {(0, 0): 0.5, (1, 0): 0.5})
        self.assert_table(result, 1, {(0, 0): 0.5, (1, 1): 0.5})
        self.assertAlmostEqual(result.gap, 0.5, delta=1e-10, msg="copying r on I wins whenever the forgery passes")

    def test_probabilities_are_complete(self):
        params = self.oracle_params()
        for name, build in SCENARIOS.items():
            result = run_epr_game_oracle(params, build(params))
            for b in (0, 1):
                self.assertAlmostEqual(result.total(b), 1.0, delta=1e-10,
                                       msg="{}: probabilities should sum to 1 for b={}".format(name, b))

    def test_held_bases_may_depend_on_theta(self):
        params = self.oracle_params()
        base = computational_copy_adversary(params)
        seen = []

        def bases(theta):
            seen.append(theta)
            return [HADAMARD if bit else COMPUTATIONAL for bit in theta]

        result = run_epr_game_oracle(params, OracleAdversary(base.msg0, base.state, bases, base.decide))
        self.assertEqual(len(seen), 2, msg="the bases callable should be asked once per theta")
        self.assertAlmostEqual(result.total(1), 1.0, delta=1e-10, msg="probabilities should still sum to 1")

    def test_to_rows_and_dict(self):
        params = self.oracle_params()
        result = run_epr_game_oracle(params, honest_epr_adversary(params))
        rows = result.to_rows()
        self.assertEqual(len(rows), 6, msg="three cells per challenge bit")
        self.assertEqual([row[:3] for row in rows[:3]], [(0, 0, 0), (0, 1, 0), (0, 1, 1)], msg="row order")
        self.assertEqual(len(result.to_dict()['tables']['1']), 3, msg="the JSON table should list every cell")

    def test_rejects_too_many_qubits(self):
        params = SchemeParams.build(n=1, s=4, k=1, tau=1, delta=0.25, code=identity_code())
        with self.assertRaises(ParameterError, msg="m above 4 should be rejected"):
            run_epr_game_oracle(params, honest_epr_adversary(self.oracle_params()))

    def test_rejects_longer_messages(self):
        params = SchemeParams.build(n=2, s=1, k=1, tau=1, delta=0.25, code=identity_code())
        with self.assertRaises(ParameterError, msg="the oracle handles one-bit messages"):
            run_epr_game_oracle(params, honest_epr_adversary(params))

    def test_rejects_small_state(self):
        params = self.oracle_params()
        adversary = OracleAdversary(BitString.ones(1), make_epr_pairs(1), (), AlwaysOne())
        with self.assertRaises(QuantumSimulationError, msg="the state must cover A and B"):
            run_epr_game_oracle(params, adversary)


class TestMonteCarloMatchesOracle(TestCertifiedDeletion):
    TRIALS = 10000

    def frequencies(self, params, strategy, b):
        counts = Counter(run_game1(params, strategy, b, np.random.default_rng([self.SEED, trial, b]))
                         for trial in range(self.TRIALS))
        return {cell: counts[cell] / self.TRIALS for cell in CELLS}

    def assert_close(self, params, strategy, adversary):
        result = run_epr_game_oracle(params, adversary)
        for b in (0, 1):
            empirical = self.frequencies(params, strategy, b)
            distance = 0.5 * sum(abs(empirical[cell] - result.probability(b, *cell)) for cell in CELLS)
            self.assertLess(distance, 0.02, msg="{} b={}: total variation {}".format(strategy.describe(), b, distance))

    def test_full_computational_matches_computational_copy(self):
        params = self.oracle_params()
        self.assert_close(params, FullComputationalMeasurer(), computational_copy_adversary(params))

    def test_honest_deleter_matches_honest_epr(self):
        params = self.oracle_params()
        self.assert_close(params, HonestDeleter(), honest_epr_adversary(params))


if __name__ == '__main__':
    unittest.main()
