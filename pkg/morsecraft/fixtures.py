"""
Standard complexes and seeded random constructions used by tests,
acceptance runs and the CLI examples.
"""

from collections import Counter
from itertools import combinations, product
from typing import List, Optional

import numpy as np

from .assembly import GluingSpec
from .local_construction import LocalConstructionTrace, identification_candidates, identify_ridges
from .simplicial import Simplex, SimplicialComplex, cone, face_key, join, simplex_boundary


def simplex(d: int) -> SimplicialComplex:
    """The d-simplex on 0..d."""
    return SimplicialComplex([range(d + 1)])


def sphere(d: int) -> SimplicialComplex:
    """The boundary of the (d+1)-simplex on 0..d+1."""
    return simplex_boundary(range(d + 2))


def polygon(n: int) -> SimplicialComplex:
    if n < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> SimplicialComplex:
    """n edges on the vertices 0..n."""
    if n < 1:
        raise ValueError("a path needs at least one edge")
    return SimplicialComplex([(i, i + 1) for i in range(n)])


def octahedron() -> SimplicialComplex:
    """Antipodal vertex pairs (0,1), (2,3), (4,5)."""
    return SimplicialComplex(product((0, 1), (2, 3), (4, 5)))


def bipyramid() -> SimplicialComplex:
    """Triangle 0-1-2 suspended from 3 and 4."""
    return SimplicialComplex([(0, 1, 3), (1, 2, 3), (0, 2, 3), (0, 1, 4), (1, 2, 4), (0, 2, 4)])


def cone_over(K: SimplicialComplex) -> SimplicialComplex:
    return cone(K, K.max_vertex() + 1)


def suspension(K: SimplicialComplex) -> SimplicialComplex:
    top = K.max_vertex() + 1
    return join(K, SimplicialComplex([[top], [top + 1]]))


def ball(d: int) -> SimplicialComplex:
    """The cone over the boundary of the d-simplex: a d-ball with one interior vertex."""
    return cone_over(simplex_boundary(range(d + 1)))


def two_ball_sphere(d: int) -> GluingSpec:
    """Two copies of ball(d) glued along their boundary spheres."""
    B = ball(d)
    return GluingSpec(B, B, {v: v for v in range(d + 1)})


def random_tree_of_simplices(d: int, n: int, seed: int = 0) -> SimplicialComplex:
    """
    n d-simplices, each new one attached along a uniformly chosen
    boundary ridge with one fresh vertex.
    """
    if n < 1:
        raise ValueError("need at least one simplex")
    rng = np.random.default_rng(seed)
    facets: List[Simplex] = [tuple(range(d + 1))]
    ridge_count: Counter = Counter(combinations(facets[0], d))
    next_vertex = d + 1
    for _ in range(n - 1):
        boundary = sorted((r for r, c in ridge_count.items() if c == 1), key=face_key)
        ridge = boundary[int(rng.integers(len(boundary)))]
        new = tuple(sorted(ridge + (next_vertex,)))
        next_vertex += 1
        facets.append(new)
        ridge_count.update(combinations(new, d))
    return SimplicialComplex(facets)


def random_local_construction_trace(
    d: int,
    n: int,
    steps: int,
    seed: int = 0,
    tree: Optional[SimplicialComplex] = None,
) -> LocalConstructionTrace:
    """
    A seeded trace of up to steps identifications on a random tree of n
    simplices; stops early when no admissible pair is left.
    """
    rng = np.random.default_rng([seed, 1])
    start = tree if tree is not None else random_tree_of_simplices(d, n, seed)
    current = start
    identifications = []
    for _ in range(steps):
        candidates = identification_candidates(current)
        if not candidates:
            break
        r1, r2 = candidates[int(rng.integers(len(candidates)))]
        current, _ = identify_ridges(current, r1, r2)
        identifications.append((r1, r2))
    return LocalConstructionTrace(start, identifications)
