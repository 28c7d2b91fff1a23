"""
Unit tests for complexes, homology, manifold checks and facet files.
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np

from morsecraft import (
    ComplexError,
    FormatError,
    ResourceLimitError,
    SimplicialComplex,
    SubcomplexRef,
    betti_gf2,
    boundary_subcomplex,
    build_complex,
    check_manifold,
    cone,
    connected_components,
    dual_graph,
    euler_characteristic,
    f_vector,
    face_string,
    interior_faces,
    is_ball_candidate,
    is_connected,
    is_manifold_candidate,
    is_orientable,
    is_pseudomanifold,
    is_sphere_candidate,
    is_strongly_connected,
    is_tree_of_simplices,
    join,
    link,
    make_simplex,
    parse_face,
    reduced_betti_gf2,
    star,
)
from morsecraft.fixtures import bipyramid, octahedron, polygon, random_tree_of_simplices, simplex, sphere
from morsecraft.formats import format_facets, parse_facets, read_facets, write_facets
from morsecraft.homology import gf2_rank
from morsecraft.manifold import count_boundary_faces


MOBIUS = [(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 0), (4, 0, 1)]


class TestSimplices(unittest.TestCase):
    """Tests for canonical simplices."""

    def test_make_simplex_sorts(self):
        """Test that vertex order is normalized."""
        self.assertEqual(make_simplex([2, 0, 1]), (0, 1, 2))

    def test_make_simplex_rejects_repeats(self):
        """Test that repeated vertices are refused."""
        with self.assertRaises(ComplexError):
            make_simplex([1, 1, 2])

    def test_make_simplex_rejects_negative(self):
        """Test that negative ids are refused."""
        with self.assertRaises(ComplexError):
            make_simplex([-1, 2])

    def test_face_strings(self):
        """Test the canonical face string form."""
        self.assertEqual(face_string((0, 3, 7)), "0-3-7")
        self.assertEqual(parse_face("7-0-3"), (0, 3, 7))


class TestSimplicialComplex(unittest.TestCase):
    """Tests for complexes and face enumeration."""

    def test_triangle_f_vector(self):
        """Test the f-vector of a triangle."""
        self.assertEqual(simplex(2).f_vector(), (3, 3, 1))

    def test_tetrahedron_boundary_f_vector(self):
        """Test the f-vector of the boundary of a tetrahedron."""
        self.assertEqual(sphere(2).f_vector(), (4, 6, 4))

    def test_dominated_facets_dropped(self):
        """Test that listed subfaces of facets are dropped."""
        K = build_complex([[0, 1, 2], [0, 1], [2]])
        self.assertEqual(K.facets, ((0, 1, 2),))

    def test_empty_facet_list_rejected(self):
        """Test that an empty facet list is refused."""
        with self.assertRaises(ComplexError):
            build_complex([])

    def test_face_cap(self):
        """Test that exceeding the face cap raises."""
        K = SimplicialComplex([range(8)], face_cap=20)
        with self.assertRaises(ResourceLimitError):
            K.num_faces()

    def test_cofaces(self):
        """Test coface lookup."""
        K = sphere(2)
        self.assertEqual(K.cofaces((0, 1)), ((0, 1, 2), (0, 1, 3)))

    def test_relabel(self):
        """Test relabeling vertices."""
        K = simplex(1).relabel({0: 5, 1: 7})
        self.assertEqual(K.facets, ((5, 7),))

    def test_content_hash_ignores_input_order(self):
        """Test that the hash depends only on the facet set."""
        a = SimplicialComplex([(0, 1, 2), (1, 2, 3)])
        b = SimplicialComplex([(3, 2, 1), (2, 0, 1)])
        self.assertEqual(a.content_hash(), b.content_hash())
        self.assertEqual(a, b)

    def test_link_and_star(self):
        """Test link and closed star of a vertex."""
        K = octahedron()
        L = link(K, (0,))
        self.assertEqual(L.f_vector(), (4, 4))
        S = star(K, (0,))
        self.assertEqual(len(S.facets()), 4)

    def test_link_of_missing_face(self):
        """Test that the link of a non-face raises."""
        with self.assertRaises(ComplexError):
            link(simplex(2), (0, 5))

    def test_join_and_cone(self):
        """Test joins of disjoint complexes."""
        A = SimplicialComplex([[0], [1]])
        B = SimplicialComplex([[2], [3]])
        self.assertEqual(join(A, B).f_vector(), (4, 4))
        self.assertEqual(cone(polygon(4), 9).f_vector(), (5, 8, 4))
        with self.assertRaises(ComplexError):
            join(A, A)

    def test_subcomplex_must_be_closed(self):
        """Test that a subcomplex missing subfaces is refused."""
        with self.assertRaises(ComplexError):
            SubcomplexRef(simplex(2), frozenset({(0, 1)}))


class TestBoundary(unittest.TestCase):
    """Tests for boundaries, pseudomanifolds and dual graphs."""

    def test_two_triangles(self):
        """Test the boundary of two triangles sharing an edge."""
        K = SimplicialComplex([(0, 1, 2), (1, 2, 3)])
        boundary = boundary_subcomplex(K)
        self.assertEqual(len(boundary.facets()), 4)
        self.assertNotIn((1, 2), boundary)

    def test_closed_sphere_has_empty_boundary(self):
        """Test that spheres are closed."""
        self.assertTrue(boundary_subcomplex(sphere(3)).is_empty())

    def test_three_triangles_on_an_edge(self):
        """Test that a ridge in three facets is not a pseudomanifold."""
        K = SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 1, 4)])
        self.assertFalse(is_pseudomanifold(K))
        with self.assertRaises(ComplexError):
            boundary_subcomplex(K)

    def test_dual_graph(self):
        """Test the dual graph of the bipyramid."""
        graph = dual_graph(bipyramid())
        self.assertEqual(graph.number_of_nodes(), 6)
        self.assertEqual(graph.number_of_edges(), 9)

    def test_boundary_counts(self):
        """Test boundary face counts of a triangle."""
        self.assertEqual(count_boundary_faces(simplex(2)), [3, 3, 0])

    def test_interior_faces(self):
        """Test interior faces of two triangles sharing an edge."""
        K = SimplicialComplex([(0, 1, 2), (1, 2, 3)])
        self.assertEqual(interior_faces(K), [(1, 2), (0, 1, 2), (1, 2, 3)])

    def test_connectivity(self):
        """Test strong connectivity and components."""
        pinched = SimplicialComplex([(0, 1, 2), (0, 3, 4)])
        self.assertTrue(is_connected(pinched))
        self.assertFalse(is_strongly_connected(pinched))
        self.assertTrue(is_strongly_connected(octahedron()))
        parts = connected_components(SimplicialComplex([(0, 1), (2, 3), (3, 4)]))
        self.assertEqual([p.facets for p in parts], [((0, 1),), ((2, 3), (3, 4))])


class TestHomology(unittest.TestCase):
    """Tests for GF(2) Betti numbers."""

    def test_gf2_rank(self):
        """Test rank over GF(2) where the rational rank differs."""
        m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        self.assertEqual(gf2_rank(m), 2)

    def test_spheres(self):
        """Test Betti numbers of simplex boundaries."""
        for d in range(1, 5):
            expected = (1,) + (0,) * (d - 1) + (1,)
            self.assertEqual(betti_gf2(sphere(d)), expected)

    def test_simplex_is_acyclic(self):
        """Test Betti numbers of a simplex."""
        self.assertEqual(betti_gf2(simplex(3)), (1, 0, 0, 0))

    def test_polygon(self):
        """Test Betti numbers and Euler characteristic of a cycle."""
        self.assertEqual(betti_gf2(polygon(6)), (1, 1))
        self.assertEqual(reduced_betti_gf2(polygon(6)), (0, 1))
        self.assertEqual(euler_characteristic(polygon(6)), 0)
        self.assertEqual(f_vector(polygon(6)), (6, 6))

    def test_mobius_strip(self):
        """Test Betti numbers of the Moebius strip."""
        self.assertEqual(betti_gf2(SimplicialComplex(MOBIUS)), (1, 1, 0))


class TestManifold(unittest.TestCase):
    """Tests for the manifold check stack."""

    def test_octahedron_is_sphere(self):
        """Test sphere recognition on the octahedron."""
        self.assertTrue(is_sphere_candidate(octahedron()))
        self.assertTrue(check_manifold(octahedron()).closed)

    def test_bipyramid_is_sphere(self):
        """Test sphere recognition on the bipyramid."""
        self.assertTrue(is_sphere_candidate(bipyramid(), 2))

    def test_balls(self):
        """Test ball recognition."""
        self.assertTrue(is_ball_candidate(simplex(2)))
        self.assertTrue(is_ball_candidate(simplex(3)))
        self.assertFalse(is_ball_candidate(sphere(2)))

    def test_pinched_triangles(self):
        """Test that two triangles sharing only a vertex fail the link check."""
        K = SimplicialComplex([(0, 1, 2), (0, 3, 4)])
        report = check_manifold(K)
        self.assertFalse(report.ok)
        self.assertIn(0, report.link_failures)
        self.assertFalse(is_manifold_candidate(K))
        self.assertTrue(is_manifold_candidate(octahedron()))

    def test_orientability(self):
        """Test orientation propagation."""
        self.assertTrue(is_orientable(octahedron()))
        self.assertFalse(is_orientable(SimplicialComplex(MOBIUS)))

    def test_tree_of_simplices(self):
        """Test trees of simplices."""
        self.assertTrue(is_tree_of_simplices(simplex(3)))
        self.assertTrue(is_tree_of_simplices(random_tree_of_simplices(3, 5, seed=1)))
        self.assertFalse(is_tree_of_simplices(polygon(5)))

    def test_random_tree_size(self):
        """Test that random trees have the requested number of facets."""
        T = random_tree_of_simplices(2, 6, seed=3)
        self.assertEqual(len(T.facets), 6)
        self.assertEqual(betti_gf2(T), (1, 0, 0))


class TestFacetFiles(unittest.TestCase):
    """Tests for the facet file format."""

    def test_parse_with_comments(self):
        """Test comments and blank lines."""
        K = parse_facets("# a triangle\n\n0 1 2\n")
        self.assertEqual(K.facets, ((0, 1, 2),))

    def test_parse_error_line(self):
        """Test that parse errors carry the line number."""
        with self.assertRaises(FormatError) as ctx:
            parse_facets("0 1 2\n# fine\n1 x 3\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_repeated_vertex_line(self):
        """Test that repeated vertices are reported with their line."""
        with self.assertRaises(FormatError) as ctx:
            parse_facets("0 1 1\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_round_trip(self):
        """Test writing then reading a facet file."""
        K = octahedron()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "octahedron.facets"
            write_facets(K, path)
            self.assertEqual(read_facets(path), K)
            self.assertEqual(path.read_text(encoding="utf-8"), format_facets(K))


if __name__ == "__main__":
    unittest.main()
