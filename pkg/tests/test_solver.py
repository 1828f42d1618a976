"""End-to-end solver tests: pipeline paths, invariances, and frozen systems."""

import warnings

import numpy as np
import pytest

import systems
from multipolyeig.dixon import ResultantPoly
from multipolyeig.errors import ReductionDepthExceededError
from multipolyeig.mpoly import Basis, MatrixPoly, Pmep
from multipolyeig.opdet import solve_linear_mep
from multipolyeig.solver import (
    SolverConfig,
    _lost_coordinate_candidates,
    choose_hidden_variable,
    random_orthogonal,
    solve,
)

from test_opdet import random_linear_mep
from test_pep import det_roots, match_sets

DIAG_KEYS = {
    "resultant_size",
    "normal_rank",
    "projected",
    "dropped_eigenpairs",
    "rotation_seed",
}


def assert_contains_points(found, wanted, tol):
    """Every point in wanted has a match in found (max-norm distance <= tol)."""
    found = np.asarray(found)
    assert found.size > 0
    for w in wanted:
        dist = np.min(np.max(np.abs(found - np.asarray(w)), axis=1))
        assert dist <= tol, f"{w} unmatched (closest at distance {dist:.2e})"


def assert_same_points(a, b, tol):
    a = np.asarray(a)
    b = np.asarray(b)
    assert a.shape == b.shape
    assert_contains_points(a, b, tol)
    assert_contains_points(b, a, tol)


def cross_term_system(seed, sizes, tau):
    """Dense random system; degree-one instances still carry cross terms."""
    rng = np.random.default_rng(seed)
    return systems.random_pmep(rng, sizes, tau)


class TestChooseHiddenVariable:
    @pytest.mark.parametrize(
        "tau, want",
        [
            ((2, 1), 2),
            ((1, 2), 1),
            ((2, 2), 2),
            ((3, 2), 1),
            ((1, 1, 3), 2),
            ((3, 1, 1), 3),
        ],
    )
    def test_known_choices(self, tau, want):
        rng = np.random.default_rng(7)
        p = systems.random_pmep(rng, (1,) * len(tau), tau)
        assert choose_hidden_variable(p) == want


class TestRandomOrthogonal:
    def test_orthogonal_and_real(self):
        for d in (1, 2, 3, 4):
            q = random_orthogonal(d, seed=3)
            assert q.shape == (d, d)
            assert np.isrealobj(q)
            assert np.allclose(q @ q.T, np.eye(d), atol=1e-12)

    def test_deterministic_in_seed(self):
        assert np.array_equal(random_orthogonal(3, 5), random_orthogonal(3, 5))
        assert not np.allclose(random_orthogonal(3, 5), random_orthogonal(3, 6))

    def test_scalar_case_is_sign(self):
        q = random_orthogonal(1, seed=0)
        assert abs(abs(q[0, 0]) - 1.0) < 1e-14

    def test_rejects_nonpositive_dimension(self):
        with pytest.raises(ValueError):
            random_orthogonal(0, seed=0)


class TestConfigValidation:
    def test_bad_tolerances(self):
        with pytest.raises(ValueError):
            SolverConfig(rank_tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(trim_tol=-1.0)
        with pytest.raises(ValueError):
            SolverConfig(probes=0)
        with pytest.raises(ValueError):
            SolverConfig(hide_variable=0)

    def test_solve_rejects_non_system(self):
        with pytest.raises(ValueError):
            solve("not a system")

    def test_hide_variable_out_of_range(self):
        p = systems.quadratic_pair_system()
        with pytest.raises(ValueError), warnings.catch_warnings():
            warnings.simplefilter("ignore")
            solve(p, SolverConfig(hide_variable=3))

    def test_missing_variable_rejected(self):
        # second variable has degree zero: the point set is a curve, not finite
        with pytest.raises(ValueError):
            solve(systems.univariate_pair_system())


class TestQuadraticPair:
    def test_default_pipeline(self):
        p = systems.quadratic_pair_system()
        out = solve(p)
        assert len(out) == 8
        assert max(s.residual for s in out) <= 1e-10
        assert_same_points(out.points(), systems.quadratic_pair_solutions(), 1e-6)
        real_pair = np.array([2.0**0.25, (-1 - np.sqrt(5)) / 2 / 2.0**0.25])
        assert_contains_points(out.points(), [real_pair], 1e-8)
        assert set(out.diagnostics) == DIAG_KEYS
        assert out.diagnostics["projected"]
        assert out.diagnostics["rotation_seed"] == 0
        assert all(s.flags["rotated"] and not s.flags["reduced"] for s in out)

    def test_without_rotation(self):
        p = systems.quadratic_pair_system()
        out = solve(p, SolverConfig(rotate=False))
        assert len(out) == 8
        assert max(s.residual for s in out) <= 1e-12
        assert_same_points(out.points(), systems.quadratic_pair_solutions(), 1e-8)
        assert out.diagnostics["resultant_size"] == 8
        assert out.diagnostics["normal_rank"] == 8
        assert not out.diagnostics["projected"]
        assert out.diagnostics["rotation_seed"] is None
        assert all(not s.flags["rotated"] for s in out)

    def test_rotation_seed_invariance(self):
        p = systems.quadratic_pair_system()
        a = solve(p, SolverConfig(seed=0))
        b = solve(p, SolverConfig(seed=7))
        assert_same_points(a.points(), b.points(), 1e-6)

    def test_explicit_hidden_variable_warns(self):
        # hiding x makes the four x-values double eigenvalues and drops the
        # resultant's rank; the projected/reduced fallbacks still recover all
        # eight roots, but the solver must warn that rotation was skipped
        p = systems.quadratic_pair_system()
        for hide in (1, 2):
            with pytest.warns(RuntimeWarning):
                out = solve(p, SolverConfig(hide_variable=hide))
            assert_same_points(
                out.points(), systems.quadratic_pair_solutions(), 1e-6
            )
        with pytest.warns(RuntimeWarning):
            out = solve(p, SolverConfig(hide_variable=1))
        assert out.diagnostics["normal_rank"] == 4
        assert all(s.flags["reduced"] for s in out)

    def test_explicit_hide_without_rotation_is_silent(self):
        p = systems.quadratic_pair_system()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = solve(p, SolverConfig(hide_variable=2, rotate=False))
        assert_same_points(out.points(), systems.quadratic_pair_solutions(), 1e-6)

    def test_chebyshev_input(self):
        p = systems.quadratic_pair_system(Basis.CHEBYSHEV1)
        out = solve(p)
        assert_same_points(out.points(), systems.quadratic_pair_solutions(), 1e-6)

    def test_basis_override(self):
        p = systems.quadratic_pair_system()
        out = solve(p, SolverConfig(basis=Basis.CHEBYSHEV1, rotate=False))
        assert_same_points(out.points(), systems.quadratic_pair_solutions(), 1e-6)

    def test_determinism(self):
        p = systems.quadratic_pair_system()
        a = solve(p)
        b = solve(p)
        assert len(a) == len(b)
        for sa, sb in zip(a, b):
            assert np.array_equal(sa.x, sb.x)
            assert sa.residual == sb.residual
        assert a.diagnostics == b.diagnostics


class TestRankDeficientPair:
    def test_projected_pipeline(self):
        p = systems.rank_deficient_pair_system()
        out = solve(p, SolverConfig(rotate=False))
        assert len(out) == 2
        assert max(s.residual for s in out) <= 1e-8
        assert_same_points(
            out.points(), systems.rank_deficient_pair_solutions(), 1e-6
        )
        assert out.diagnostics["resultant_size"] == 8
        assert out.diagnostics["normal_rank"] == 5
        assert out.diagnostics["projected"]
        assert all(s.flags["projected"] for s in out)

    def test_default_pipeline(self):
        p = systems.rank_deficient_pair_system()
        out = solve(p)
        assert len(out) == 2
        assert_same_points(
            out.points(), systems.rank_deficient_pair_solutions(), 1e-6
        )


class TestLinearPath:
    def test_fast_path_matches_direct_solver(self):
        rng = np.random.default_rng(11)
        mep = random_linear_mep(rng, (2, 3))
        p = mep.to_pmep()
        out = solve(p)
        direct = solve_linear_mep(mep)
        assert len(out) == len(direct) == 6
        assert_same_points(
            out.points(), [s.x for s in direct], 1e-8
        )
        assert out.diagnostics["rotation_seed"] is None
        assert not out.diagnostics["projected"]

    def test_generic_path_agrees_with_fast_path(self):
        rng = np.random.default_rng(12)
        mep = random_linear_mep(rng, (2, 2))
        p = mep.to_pmep()
        fast = solve(p)
        generic = solve(p, SolverConfig(reduce_linear=False))
        assert_same_points(generic.points(), fast.points(), 1e-6)
        # degree-one systems have no positive power of the first variable in
        # the eigenvector structure, so it is recovered from the equations
        assert all(s.flags["reduced"] for s in generic)
        assert generic.diagnostics["rotation_seed"] == 0

    def test_cross_terms_take_generic_path(self):
        p = cross_term_system(5, (2, 2), (1, 1))
        out = solve(p)
        assert out.diagnostics["rotation_seed"] == 0  # fast path reports None
        assert max(s.residual for s in out) <= 1e-8
        plain = solve(p, SolverConfig(rotate=False))
        assert_same_points(out.points(), plain.points(), 1e-5)


class TestUnivariatePassthrough:
    def test_matches_determinant_roots(self):
        rng = np.random.default_rng(21)
        c = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
        p = Pmep([MatrixPoly(c)])
        out = solve(p)
        want = det_roots(ResultantPoly(c, Basis.MONOMIAL))
        assert len(out) == 4
        assert max(s.residual for s in out) <= 1e-10
        match_sets([s.x[0] for s in out], want, 1e-6)
        assert out.diagnostics["resultant_size"] == 2
        assert out.diagnostics["normal_rank"] == 2
        assert not out.diagnostics["projected"]
        assert out.diagnostics["rotation_seed"] is None
        assert set(out.diagnostics) == DIAG_KEYS

    def test_scalar_linear(self):
        c = np.array([[[-3.0]], [[1.0]]])
        out = solve(Pmep([MatrixPoly(c)]))
        assert len(out) == 1
        assert abs(out[0].x[0] - 3.0) <= 1e-12


class TestSolutionCount:
    def test_dense_quadratic_pairs_have_32_solutions(self):
        # det P_1 and det P_2 are dense bidegree-(4, 4) curves; their mixed
        # volume is 32, attained by generic coefficients, and the rotation-free
        # pipeline validates every intersection
        for seed in (300, 301, 302):
            rng = np.random.default_rng(seed)
            p = systems.random_pmep(rng, (2, 2), (2, 2))
            out = solve(p, SolverConfig(rotate=False))
            assert len(out) == 32, f"seed {seed}: {len(out)} solutions"
            assert max(s.residual for s in out) <= 1e-8
            assert out.diagnostics["resultant_size"] == 8
            assert out.diagnostics["normal_rank"] == 8
            assert not out.diagnostics["projected"]

    def test_default_pipeline_finds_subset(self):
        # the rotated detour computes far-out roots less accurately, so a few
        # of the 32 may exceed the residual filter; what survives must be a
        # subset of the rotation-free set
        rng = np.random.default_rng(300)
        p = systems.random_pmep(rng, (2, 2), (2, 2))
        full = solve(p, SolverConfig(rotate=False))
        out = solve(p)
        assert len(out) >= 24
        assert_contains_points(full.points(), out.points(), 1e-5)


class TestTrivariate:
    def test_trilinear_scalars(self):
        # three dense trilinear scalar equations: mixed volume of three unit
        # cubes is 6, so a generic instance has six solutions
        p = cross_term_system(31, (1, 1, 1), (1, 1, 1))
        out = solve(p, SolverConfig(rotate=False))
        assert len(out) == 6
        assert max(s.residual for s in out) <= 1e-8
        rotated = solve(p)
        assert_same_points(rotated.points(), out.points(), 1e-5)


class TestReduction:
    def test_single_lost_coordinate_candidates(self):
        p = systems.quadratic_pair_system()
        x_true = 2.0**0.25
        y_true = (-1 + np.sqrt(5)) / 2 / x_true
        cands = _lost_coordinate_candidates(
            p, np.array([np.nan + 0j]), y_true, [0], SolverConfig(), depth=0
        )
        xs = np.array([c[0] for c in cands])
        assert np.min(np.abs(xs - x_true)) <= 1e-8
        assert all(c[1] == y_true for c in cands)

    def test_two_lost_coordinates_recurse_once(self):
        quad = systems.quadratic_pair_system()
        polys = []
        for poly in quad.polys:
            c = np.zeros((3, 3, 2, 2, 2), dtype=complex)
            c[:, :, 0] = poly.coeffs
            polys.append(MatrixPoly(c))
        rng = np.random.default_rng(41)
        polys.append(systems.random_poly(rng, 2, (2, 2, 1)))
        work = Pmep(polys)
        lam = 0.7
        cands = _lost_coordinate_candidates(
            work, np.full(2, np.nan, dtype=complex), lam, [0, 1],
            SolverConfig(), depth=0,
        )
        assert len(cands) == 8
        assert_same_points(
            [c[:2] for c in cands], systems.quadratic_pair_solutions(), 1e-6
        )
        assert all(c[2] == lam for c in cands)

    def test_reduction_depth_is_capped(self):
        quad = systems.quadratic_pair_system()
        polys = []
        for poly in quad.polys:
            c = np.zeros((3, 3, 2, 2, 2), dtype=complex)
            c[:, :, 0] = poly.coeffs
            polys.append(MatrixPoly(c))
        rng = np.random.default_rng(42)
        polys.append(systems.random_poly(rng, 2, (2, 2, 1)))
        work = Pmep(polys)
        with pytest.raises(ReductionDepthExceededError):
            _lost_coordinate_candidates(
                work, np.full(2, np.nan, dtype=complex), 0.7, [0, 1],
                SolverConfig(), depth=1,
            )
