"""
Unit tests for Morse matchings, cancellation, collapses and searches.
"""

import unittest

from morsecraft import (
    CancellationError,
    ComplexError,
    MatchingError,
    MorseMatching,
    SimplicialComplex,
    SubcomplexRef,
    Verdict,
    cancel_all,
    cancel_pair,
    collapse_depth,
    collapses_onto,
    collapses_to_vertex,
    constrained_search,
    critical_cells,
    gradient_paths,
    is_endo_collapsible,
    is_lc,
    morse_function,
    morse_inequalities,
    morse_vector,
    optimal_morse,
    random_morse,
    validate_matching,
)
from morsecraft.collapse import CollapseSequence, collapse_order, replay
from morsecraft.fixtures import ball, octahedron, path, polygon, random_tree_of_simplices, simplex, sphere
from morsecraft.search import depth_allowance
from morsecraft.simplicial import facets_of


class TestValidation(unittest.TestCase):
    """Tests for matching validation."""

    def test_empty_matching(self):
        """Test that the empty matching leaves every face critical."""
        V = MorseMatching(simplex(2))
        self.assertTrue(validate_matching(V).valid)
        self.assertEqual(morse_vector(V).c, (3, 3, 1))

    def test_incidence(self):
        """Test that a pair must be a face and a coface."""
        V = MorseMatching(simplex(2), [((0,), (1, 2))])
        report = validate_matching(V)
        self.assertFalse(report.valid)
        self.assertEqual(report.violations[0].kind, "incidence")

    def test_injectivity(self):
        """Test that a face is matched at most once."""
        V = MorseMatching(simplex(2), [((0,), (0, 1)), ((0,), (0, 2))])
        self.assertEqual(validate_matching(V).violations[0].kind, "injectivity")

    def test_cycle(self):
        """Test that a closed V-path is reported."""
        V = MorseMatching(polygon(3), [((0,), (0, 1)), ((1,), (1, 2)), ((2,), (0, 2))])
        report = validate_matching(V)
        self.assertEqual(report.violations[0].kind, "cycle")
        with self.assertRaises(MatchingError):
            critical_cells(V)

    def test_boundary_flag(self):
        """Test that boundary-critical matchings keep boundary faces unmatched."""
        V = MorseMatching(ball(2), [((0,), (0, 3))], boundary_critical=True)
        self.assertEqual(validate_matching(V).violations[0].kind, "boundary")
        W = MorseMatching(ball(2), [((3,), (0, 3))], boundary_critical=True)
        self.assertTrue(validate_matching(W).valid)

    def test_interior_counts(self):
        """Test interior counts on a ball."""
        V = MorseMatching(ball(2), [((2, 3), (0, 2, 3)), ((1, 3), (1, 2, 3))], boundary_critical=True)
        vector = morse_vector(V)
        self.assertEqual(vector.c_int, (1, 1, 1))
        self.assertEqual(vector.c, (4, 4, 1))

    def test_morse_function(self):
        """Test that the discrete Morse function induces the matching."""
        V = optimal_morse(sphere(2)).matching
        values = morse_function(V)
        for face in V.complex.all_faces():
            for sub in facets_of(face):
                if V.partner.get(sub) == face:
                    self.assertEqual(values[sub], values[face])
                else:
                    self.assertLess(values[sub], values[face])


class TestCancellation(unittest.TestCase):
    """Tests for gradient paths and Forman cancellation."""

    def test_unique_path(self):
        """Test cancelling an edge against its endpoint."""
        V = MorseMatching(path(2))
        W = cancel_pair(V, (0, 1), (1,))
        self.assertEqual(W.pairs, (((1,), (0, 1)),))
        self.assertEqual(morse_vector(W).c, (2, 1))

    def test_two_paths(self):
        """Test that two gradient paths block cancellation."""
        V = MorseMatching(polygon(4), [((1,), (1, 2)), ((2,), (2, 3)), ((3,), (0, 3))])
        self.assertEqual(len(gradient_paths(V, (0, 1), (0,))), 2)
        with self.assertRaises(CancellationError):
            cancel_pair(V, (0, 1), (0,))

    def test_not_critical(self):
        """Test that both faces must be critical."""
        V = MorseMatching(path(2), [((1,), (0, 1))])
        with self.assertRaises(CancellationError):
            cancel_pair(V, (0, 1), (0,))

    def test_cancel_all(self):
        """Test greedy cancellation down to a single vertex."""
        V = cancel_all(MorseMatching(path(2)))
        self.assertEqual(morse_vector(V).c, (1, 0))
        self.assertTrue(validate_matching(V).valid)


class TestCollapses(unittest.TestCase):
    """Tests for the collapse engine and collapse searches."""

    def test_simplex_to_vertex(self):
        """Test that a simplex collapses to its least vertex."""
        result = collapses_to_vertex(simplex(3))
        self.assertEqual(result.verdict, Verdict.FOUND)
        self.assertEqual(len(result.sequence), 7)

    def test_sphere_does_not_collapse(self):
        """Test that a sphere cannot collapse to a vertex."""
        result = collapses_to_vertex(sphere(2))
        self.assertEqual(result.verdict, Verdict.IMPOSSIBLE)
        self.assertIsNone(result.sequence)

    def test_collapse_onto_edge(self):
        """Test collapsing a triangle onto one of its edges."""
        K = simplex(2)
        L = SubcomplexRef.closure(K, [(0, 1)])
        result = collapses_onto(K, L)
        self.assertTrue(result.sequence is not None)
        self.assertEqual(replay(K, result.sequence, onto=L), set(L.faces))

    def test_replay_rejects_non_free(self):
        """Test that replay refuses a face that is not free."""
        with self.assertRaises(MatchingError):
            replay(simplex(2), CollapseSequence([((0,), (0, 1))]))

    def test_collapse_order(self):
        """Test that a valid matching can be executed as removals."""
        V = optimal_morse(octahedron()).matching
        order = collapse_order(V)
        removed = sum(1 if b is None else 2 for _, b in order)
        self.assertEqual(removed, octahedron().num_faces())


class TestSearches(unittest.TestCase):
    """Tests for random, exhaustive and constrained searches."""

    def test_random_is_deterministic(self):
        """Test that equal seeds give equal matchings."""
        a = random_morse(octahedron(), seed=3, restarts=4, threads=1)
        b = random_morse(octahedron(), seed=3, restarts=4, threads=4)
        self.assertEqual(a, b)

    def test_random_winner_is_lexicographically_least(self):
        """Test that more restarts never give a lexicographically larger vector."""
        K = random_tree_of_simplices(3, 6, seed=2)
        for seed in range(3):
            vectors = [tuple(morse_vector(random_morse(K, seed=seed, restarts=n, threads=2)).c) for n in (1, 3, 6)]
            self.assertEqual(vectors, sorted(vectors, reverse=True))

    def test_morse_inequalities(self):
        """Test the weak Morse inequalities on random matchings."""
        for K in (simplex(3), sphere(3), octahedron(), polygon(7)):
            for seed in range(5):
                report = morse_inequalities(random_morse(K, seed=seed, restarts=2, threads=1))
                self.assertTrue(all(report["weak_inequalities"]))
                self.assertTrue(report["euler_identity"])

    def test_random_boundary_critical(self):
        """Test boundary-critical random matchings."""
        V = random_morse(ball(3), seed=1, restarts=3, boundary_critical=True, threads=1)
        self.assertTrue(validate_matching(V).valid)
        self.assertGreaterEqual(morse_vector(V).c_int[3], 1)

    def test_polygons_are_perfect(self):
        """Test that every polygon has an optimal vector (1, 1)."""
        for n in range(3, 8):
            result = optimal_morse(polygon(n))
            self.assertTrue(result.exact)
            self.assertEqual(morse_vector(result.matching).c, (1, 1))

    def test_optimal_sphere(self):
        """Test the optimal vector of the boundary of a tetrahedron."""
        result = optimal_morse(sphere(2))
        self.assertTrue(result.exact)
        self.assertEqual(morse_vector(result.matching).c, (1, 0, 1))

    def test_optimal_mobius(self):
        """Test the optimal vector of the Moebius strip."""
        K = SimplicialComplex([(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 0), (4, 0, 1)])
        self.assertEqual(morse_vector(optimal_morse(K).matching).c, (1, 1, 0))

    def test_facet_limit(self):
        """Test the exhaustive facet limit and its override."""
        with self.assertRaises(ComplexError):
            optimal_morse(polygon(20))
        result = optimal_morse(polygon(20), override=True)
        self.assertEqual(morse_vector(result.matching).c, (1, 1))

    def test_exact_counts(self):
        """Test that exact counts force surplus critical cells."""
        _, V = constrained_search(ball(2), [1, 1, 1], exact_counts=True)
        self.assertEqual(morse_vector(V).c_int, (1, 1, 1))
        _, W = constrained_search(ball(2), [1, 1, 1])
        self.assertIsNotNone(W)

    def test_exact_counts_impossible(self):
        """Test that counts with the wrong Euler characteristic are refused."""
        outcome, V = constrained_search(ball(2), [2, 0, 1], exact_counts=True)
        self.assertIsNone(V)
        self.assertEqual(outcome.verdict, Verdict.IMPOSSIBLE)

    def test_pinned_facet(self):
        """Test that a pinned facet stays critical."""
        _, V = constrained_search(ball(2), [0, 0, 1], pinned=[(1, 2, 3)])
        self.assertIn((1, 2, 3), critical_cells(V))

    def test_budget_exhaustion(self):
        """Test that a tiny budget is inconclusive."""
        outcome, V = constrained_search(ball(3), [0, 0, 0, 1], budget=1)
        self.assertIsNone(V)
        self.assertEqual(outcome.verdict, Verdict.INCONCLUSIVE)


class TestEndoAndDepth(unittest.TestCase):
    """Tests for endo-collapsibility, collapse depth and LC certificates."""

    def test_endo_collapsible_ball(self):
        """Test that a cone ball is endo-collapsible."""
        result = is_endo_collapsible(ball(3))
        self.assertTrue(result.found)
        self.assertEqual(morse_vector(result.matching).c_int, (0, 0, 0, 1))

    def test_endo_collapsible_sphere(self):
        """Test the closed case: one vertex and one facet."""
        result = is_endo_collapsible(sphere(2))
        self.assertTrue(result.found)
        self.assertEqual(morse_vector(result.matching).c, (1, 0, 1))

    def test_depth_allowance(self):
        """Test the per-dimension caps for a depth level."""
        self.assertEqual(depth_allowance(3, 2), [None, None, 0, 1])

    def test_sphere_depths(self):
        """Test the collapse depth of simplex boundaries."""
        for d in (2, 3):
            depth = collapse_depth(sphere(d))
            self.assertEqual(depth.k_lower, d)
            self.assertTrue(depth.exact)

    def test_simplex_depth(self):
        """Test the collapse depth of a simplex."""
        depth = collapse_depth(simplex(3))
        self.assertEqual(depth.k_lower, 3)
        self.assertEqual(depth.verdicts, {1: "found", 2: "found", 3: "found"})

    def test_depth_needs_pseudomanifold(self):
        """Test that collapse depth refuses non-pseudomanifolds."""
        with self.assertRaises(ComplexError):
            collapse_depth(SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 1, 4)]))

    def test_certificates_need_manifolds(self):
        """Test that a pinched pseudomanifold is refused by every certificate search."""
        pinched = SimplicialComplex([(0, 1, 2), (0, 3, 4)])
        for search in (is_endo_collapsible, collapse_depth, is_lc):
            with self.assertRaises(ComplexError):
                search(pinched)

    def test_lc(self):
        """Test LC certificates on spheres and balls."""
        for K in (sphere(3), octahedron(), simplex(3)):
            result = is_lc(K)
            self.assertTrue(result.found)
            vector = morse_vector(result.matching)
            self.assertEqual(vector.c_int[K.dim], 1)
            self.assertEqual(vector.c_int[K.dim - 1], 0)

    def test_lc_curve(self):
        """Test that curves fall back to endo-collapsibility."""
        self.assertTrue(is_lc(polygon(5)).found)


if __name__ == "__main__":
    unittest.main()
