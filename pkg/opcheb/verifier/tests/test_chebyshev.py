"""
Tests for the Chebyshev gap assemblers, the Q-chain, the mean inequality,
cell replay and the falsifier.
"""
import unittest
from pathlib import Path
from unittest import mock
import sys

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[3]))

from opcheb.verifier.src.core import chebyshev
from opcheb.verifier.src.core.chebyshev import (
    INEQUALITIES,
    Verdict,
    example_gap_raw,
    example_sides,
    falsify,
    gap_discrete,
    gap_mean,
    gap_mean_two_weight,
    gap_single_weight,
    gap_two_weight,
    get_inequality,
    pointwise_mean_gap,
    q_chain,
    q_chain_single,
    q_increment,
    replay,
    run_cell,
    scalar_chebyshev,
    scalar_two_weight_chebyshev,
)
from opcheb.verifier.src.core.digest import Cell
from opcheb.verifier.src.core.errors import (
    HypothesisViolation,
    IndexOutOfRange,
    LengthMismatch,
    ShapeMismatch,
    UnknownGenerator,
    UnknownInequality,
)
from opcheb.verifier.src.core.fields import (
    OperatorField,
    WeightVector,
    gen_increasing_pair,
    gen_nonsynchronous_pair,
    gen_scaled_pair,
    gen_triangular_pair,
    random_weights,
)
from opcheb.verifier.src.core.hermat import HermitianMatrix, min_eigenvalue
from opcheb.verifier.src.core.products import hadamard
from opcheb.verifier.src.core.render import make_record
from opcheb.verifier.src.core.sampling import (
    increasing_sequence,
    make_rng,
    nonnegative_weights,
    random_gram,
    random_strictly_positive,
)


def scalar_field(values) -> OperatorField:
    return OperatorField(
        tuple(float(k) for k in range(len(values))),
        tuple(HermitianMatrix.diagonal([v]) for v in values),
    )


def constant_field(matrix: HermitianMatrix, n: int) -> OperatorField:
    return OperatorField(tuple(float(k) for k in range(n)), (matrix,) * n)


class TestScalarChebyshev(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(scalar_chebyshev([1, 1], [1, 2], [1, 2]), 1.0)
        self.assertEqual(scalar_chebyshev([1, 1], [1, 2], [2, 1]), -1.0)
        self.assertEqual(scalar_chebyshev([1, 2, 3], [4, 4, 4], [1, 5, 2]), 0.0)

    def test_two_weight_reduces_to_twice_single(self):
        w, a, b = [0.5, 1.0, 2.0], [1, 2, 4], [0, 3, 3]
        self.assertAlmostEqual(scalar_two_weight_chebyshev(w, w, a, b), 2 * scalar_chebyshev(w, a, b), places=12)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch):
            scalar_chebyshev([1, 1], [1, 2, 3], [1, 2])
        with self.assertRaises(LengthMismatch):
            scalar_two_weight_chebyshev([1], [1, 1], [1, 2], [1, 2])


class TestGapTwoWeight(unittest.TestCase):

    def test_constant_fields_give_zero_gap(self):
        rng = make_rng(1)
        X, Y = random_gram(rng, 3), random_gram(rng, 3)
        alpha, beta = random_weights(4, 1, 1), random_weights(4, 1, 2)
        report = gap_two_weight(constant_field(X, 4), constant_field(Y, 4), alpha, beta)
        self.assertLessEqual(report.gap.frobenius, 1e-12 * max(1.0, report.scale))
        self.assertTrue(report.passed)

    def test_single_point_gives_zero_gap(self):
        F, G = gen_scaled_pair(3, 1, 5)
        report = gap_two_weight(F, G, WeightVector((0.7,)), WeightVector((1.3,)))
        self.assertLessEqual(report.gap.frobenius, 1e-12 * max(1.0, report.scale))

    def test_scalar_bridge(self):
        rng = make_rng(77)
        for trial in range(100):
            n = 2 + trial % 5
            a = increasing_sequence(rng, n)
            b = increasing_sequence(rng, n)
            w = WeightVector(tuple(nonnegative_weights(rng, n)))
            T = scalar_chebyshev(w.values, a, b)
            report = gap_discrete(scalar_field(a), scalar_field(b), w, w)
            self.assertGreaterEqual(T, -1e-12)
            self.assertAlmostEqual(report.min_eig, 2 * T, delta=1e-11, msg=f"trial {trial}")

    def test_discrete_matches_two_weight(self):
        F, G = gen_scaled_pair(3, 5, 8)
        alpha, beta = random_weights(5, 8, 1), random_weights(5, 8, 2)
        continuous = gap_two_weight(F, G, alpha, beta)
        discrete = gap_discrete(F, G, alpha, beta)
        np.testing.assert_array_equal(continuous.gap.entries, discrete.gap.entries)
        self.assertEqual((continuous.name, discrete.name), ("thm21", "cor22"))

    def test_synchronous_campaign_passes(self):
        failures = []
        for seed in range(9):
            for dim in range(1, 6):
                for n in range(2, 9):
                    report = run_cell(Cell("thm21", "scaled_pair", seed, dim, n))
                    if not report.passed:
                        failures.append(report.inputs_digest)
        self.assertEqual(failures, [])

    def test_nonsynchronous_fails(self):
        F, G = gen_nonsynchronous_pair(2, 4, 0)
        report = gap_two_weight(F, G, random_weights(4, 0, 1), random_weights(4, 0, 2))
        self.assertIs(report.verdict, Verdict.FAIL)
        self.assertLess(report.min_eig, 0.0)

    def test_single_weight(self):
        for seed in range(10):
            F, G = gen_scaled_pair(3, 4, seed)
            report = gap_single_weight(F, G, random_weights(4, seed))
            self.assertTrue(report.passed)
            self.assertEqual(report.name, "ineq15")

    def test_shape_checks(self):
        F, G = gen_scaled_pair(2, 3, 0)
        with self.assertRaises(ShapeMismatch):
            gap_two_weight(F, G, WeightVector((1, 1)), WeightVector((1, 1, 1)))
        _, H = gen_scaled_pair(3, 3, 0)
        with self.assertRaises(ShapeMismatch):
            gap_two_weight(F, H, WeightVector((1, 1, 1)), WeightVector((1, 1, 1)))


class TestQChain(unittest.TestCase):

    def test_scalar_increment(self):
        F, G = scalar_field([0, 1]), scalar_field([0, 1])
        unit = WeightVector((1.0, 1.0))
        increment = q_increment(2, F, G, unit, unit)
        self.assertAlmostEqual(increment.entries[0, 0].real, 2.0)

    def test_increment_index_range(self):
        F, G = gen_scaled_pair(2, 3, 0)
        w = WeightVector((1, 1, 1))
        for k in (1, 4):
            with self.assertRaises(IndexOutOfRange):
                q_increment(k, F, G, w, w)

    def test_constant_fields_have_zero_increments(self):
        X = HermitianMatrix.identity(2)
        w = WeightVector((1, 2, 3))
        for k in (2, 3):
            increment = q_increment(k, constant_field(X, 3), constant_field(X, 3), w, w)
            self.assertEqual(increment.frobenius, 0.0)

    def test_chain_identities(self):
        for seed in range(60):
            dim = 1 + seed % 4
            n = 2 + seed % 6
            F, G = gen_scaled_pair(dim, n, seed)
            omega, nu = random_weights(n, seed, 1), random_weights(n, seed, 2)
            chain = q_chain(F, G, omega, nu)
            bound = 1e-10 * max(1.0, chain.scale)
            self.assertEqual(len(chain.values), n)
            self.assertEqual(len(chain.increments), n - 1)
            self.assertLessEqual(chain.endpoint_residual, bound)
            self.assertLessEqual(chain.telescoping_residual(), bound)
            self.assertTrue(chain.is_monotone())
            for increment in chain.increments:
                self.assertGreaterEqual(min_eigenvalue(increment), -1e-8 * max(1.0, increment.frobenius))
            pair_sum = gap_discrete(F, G, omega, nu).gap
            self.assertLessEqual((chain.values[-1] - chain.values[0] - pair_sum).frobenius, bound)
            self.assertTrue(all(x <= y for x, y in zip(chain.W, chain.W[1:])))
            self.assertTrue(all(x <= y for x, y in zip(chain.V, chain.V[1:])))

    def test_single_point_chain(self):
        F, G = gen_scaled_pair(2, 1, 3)
        w = WeightVector((2.0,))
        chain = q_chain(F, G, w, w)
        self.assertEqual(len(chain.values), 1)
        self.assertEqual(chain.telescoping_residual(), 0.0)

    def test_single_weight_chain_increment(self):
        F, G = gen_scaled_pair(2, 3, 4)
        omega = WeightVector((0.5, 1.5, 1.0))
        chain = q_chain_single(F, G, omega)
        expected = (2 * 1.5 * 0.5) * hadamard(F.matrices[1] - F.matrices[0], G.matrices[1] - G.matrices[0])
        self.assertLessEqual((chain.increments[0] - expected).frobenius, 1e-12 * max(1.0, expected.frobenius))

    def test_chain_cells_pass(self):
        for seed in range(5):
            report = run_cell(Cell("thm31", "scaled_pair", seed, 3, 6))
            self.assertTrue(report.passed, report.inputs_digest)
            self.assertIsNotNone(report.residual)
            self.assertTrue(report.identities_hold)

    def test_broken_identity_fails_independently_of_min_eig(self):
        cell = Cell("thm31", "scaled_pair", 3, 3, 6)
        with mock.patch.object(chebyshev, "IDENTITY_TOL", -1.0):
            report = run_cell(cell)
        self.assertFalse(report.identities_hold)
        self.assertIs(report.verdict, Verdict.FAIL)
        self.assertGreaterEqual(report.min_eig, -1e-8 * max(1.0, report.scale))
        record = make_record(cell, report)
        self.assertEqual((record["verdict"], record["identities_hold"]), ("fail", False))

    def test_pairwise_cells_leave_identities_unset(self):
        self.assertIsNone(run_cell(Cell("thm21", "scaled_pair", 1, 2, 3)).identities_hold)


class TestPointwiseMean(unittest.TestCase):

    def test_lambda_zero_is_equality(self):
        rng = make_rng(2)
        for r in (-1.0, 0.0, 0.5, 1.0):
            A, B = random_strictly_positive(rng, 3), random_strictly_positive(rng, 3)
            report = pointwise_mean_gap(A, B, r, 0.0)
            self.assertLessEqual(report.gap.frobenius, 1e-9 * max(1.0, report.scale))

    def test_equal_operands(self):
        A = HermitianMatrix.diagonal([1.0, 2.0]) + HermitianMatrix.identity(2)
        report = pointwise_mean_gap(A, A, -0.5, 0.3)
        self.assertLessEqual(report.gap.frobenius, 1e-10 * max(1.0, report.scale))

    def test_scalar_geometric_is_tight(self):
        report = pointwise_mean_gap(HermitianMatrix.diagonal([1.0]), HermitianMatrix.diagonal([4.0]), 0.0, 0.5)
        self.assertAlmostEqual(report.min_eig, 0.0, places=12)
        self.assertTrue(report.passed)

    def test_scalar_arithmetic_is_refuted(self):
        report = pointwise_mean_gap(HermitianMatrix.diagonal([1.0]), HermitianMatrix.diagonal([4.0]), 1.0, 0.25)
        self.assertAlmostEqual(report.min_eig, -1.6875, places=12)
        self.assertIs(report.verdict, Verdict.FAIL)


class TestMeanInequality(unittest.TestCase):

    def test_single_point_reduces_to_pointwise(self):
        for seed in range(5):
            F, G = gen_increasing_pair(3, 1, seed)
            alpha = random_weights(1, seed)
            report = gap_mean(F, G, alpha, 0.0, 0.5)
            pointwise = pointwise_mean_gap(F.matrices[0], G.matrices[0], 0.0, 0.5)
            expected = alpha.values[0] ** 2 * pointwise.gap
            self.assertLessEqual((report.gap - expected).frobenius, 1e-10 * max(1.0, report.scale))

    def test_validated_region_passes(self):
        cells = [(r, lam) for r in (-1.0, -0.5, 0.0) for lam in (0.0, 0.25, 0.5, 0.75, 1.0)]
        cells += [(r, lam) for r in (0.5, 1.0) for lam in (0.0, 1.0)]
        for seed in range(4):
            dim = 1 + seed % 3
            n = 2 + seed
            for r, lam in cells:
                report = run_cell(Cell("thm41", "increasing_pair", seed, dim, n, r, lam))
                self.assertTrue(report.passed, report.inputs_digest)

    def test_hypothesis_violation(self):
        F, G = gen_nonsynchronous_pair(2, 3, 0)
        with self.assertRaises(HypothesisViolation):
            gap_mean(F, G, random_weights(3, 0), 0.0, 0.5)
        report = gap_mean(F, G, random_weights(3, 0), 0.0, 0.5, check_hypotheses=False)
        self.assertEqual(report.name, "thm41")

    def test_two_weight_is_reported(self):
        F, G = gen_increasing_pair(2, 4, 3)
        report = gap_mean_two_weight(F, G, random_weights(4, 3, 1), random_weights(4, 3, 2), -0.5, 0.25)
        self.assertEqual(report.name, "thm41_two_weight")
        self.assertIn(report.verdict, (Verdict.PASS, Verdict.FAIL))
        self.assertFalse(get_inequality("thm41_two_weight").asserted)

    def test_mean_cells_need_grid_values(self):
        with self.assertRaises(ValueError):
            run_cell(Cell("thm41", "increasing_pair", 0, 2, 3))


class TestTriangularExample(unittest.TestCase):

    def setUp(self):
        self.t = np.linspace(0.0, 1.0, 16)
        self.unit = WeightVector((1.0,) * 16)

    def test_default_example_holds(self):
        F, G = gen_triangular_pair(self.t, 1 - self.t, np.sin(self.t), self.t, 1 - self.t, np.cos(self.t))
        lhs, rhs = example_sides(F, G, self.unit, self.unit)
        for k in range(2):
            self.assertGreaterEqual((lhs - rhs)[k, k].real, 0.0)
        self.assertTrue(example_gap_raw(F, G, self.unit, self.unit).passed)

    def test_constant_diagonal_gives_zero(self):
        half = np.full(16, 0.5)
        F, G = gen_triangular_pair(half, half, np.sin(self.t), half, half, np.cos(self.t))
        lhs, rhs = example_sides(F, G, self.unit, self.unit)
        for k in range(2):
            self.assertAlmostEqual((lhs - rhs)[k, k].real, 0.0, places=12)

    def test_shape_mismatch(self):
        F, G = gen_triangular_pair(self.t, 1 - self.t, self.t, self.t, 1 - self.t, self.t)
        with self.assertRaises(ShapeMismatch):
            example_sides(F, G, WeightVector((1.0,)), self.unit)


class TestReplayAndFalsify(unittest.TestCase):

    def test_registry(self):
        self.assertEqual(
            set(INEQUALITIES), {"thm21", "cor22", "ineq15", "thm31", "thm41", "thm41_two_weight"}
        )
        with self.assertRaises(UnknownInequality):
            get_inequality("thm99")

    def test_replay_reproduces_cell(self):
        for cell in (
            Cell("thm21", "scaled_pair", 42, 3, 5),
            Cell("thm31", "scaled_pair", 7, 2, 4),
            Cell("thm41", "increasing_pair", 3, 2, 3, -0.5, 0.25),
        ):
            original = run_cell(cell)
            replayed = replay(original.inputs_digest)
            self.assertEqual(replayed.min_eig, original.min_eig)
            self.assertEqual(replayed.verdict, original.verdict)
            self.assertEqual(replayed.inputs_digest, original.inputs_digest)

    def test_run_cell_rejects_unknown_generator(self):
        with self.assertRaises(UnknownGenerator):
            run_cell(Cell("thm21", "bogus", 0, 2, 3))

    def test_finds_nonsynchronous_violation(self):
        for inequality in ("thm21", "cor22"):
            result = falsify(inequality, "nonsynchronous_pair", trials=1000, seed=0)
            self.assertTrue(result.violated)
            self.assertLessEqual(result.trials_run, 1000)
            self.assertIsNotNone(result.cell)
            self.assertEqual(replay(result.found.inputs_digest).verdict, Verdict.FAIL)

    def test_no_violation_for_synchronous_fields(self):
        result = falsify("thm21", "scaled_pair", trials=300, seed=0)
        self.assertFalse(result.violated)
        self.assertEqual(result.trials_run, 300)
        self.assertIsNone(result.cell)

    def test_rejects_empty_search(self):
        with self.assertRaises(ValueError):
            falsify("thm21", "scaled_pair", trials=0, seed=0)
        with self.assertRaises(UnknownInequality):
            falsify("thm99", "scaled_pair", trials=1, seed=0)


if __name__ == "__main__":
    unittest.main()
