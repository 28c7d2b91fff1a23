"""
GF(2) homology from boundary-matrix ranks.
"""

from typing import Dict, List, Tuple

import numpy as np

from .simplicial import Simplex, SimplicialComplex, face_key, facets_of


def gf2_rank(matrix: np.ndarray) -> int:
    """
    Rank of a 0/1 matrix over the two-element field.

    Args:
        matrix: 2-D array of integers (only parity matters)

    Returns:
        Rank over GF(2)
    """
    m = np.array(matrix, dtype=np.uint8) & 1
    if m.ndim != 2 or m.size == 0:
        return 0
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.nonzero(m[rank:, col])[0]
        if candidates.size == 0:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            m[[rank, pivot]] = m[[pivot, rank]]
        hits = np.nonzero(m[:, col])[0]
        hits = hits[hits != rank]
        if hits.size:
            m[hits] ^= m[rank]
        rank += 1
    return rank


def boundary_matrix(K: SimplicialComplex, k: int) -> np.ndarray:
    """Matrix of the boundary map from k-chains to (k-1)-chains, mod 2."""
    rows: List[Simplex] = sorted(K.faces(k - 1), key=face_key)
    cols: List[Simplex] = sorted(K.faces(k), key=face_key)
    index: Dict[Simplex, int] = {s: i for i, s in enumerate(rows)}
    matrix = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for j, sigma in enumerate(cols):
        for face in facets_of(sigma):
            matrix[index[face], j] = 1
    return matrix


def betti_gf2(K: SimplicialComplex) -> Tuple[int, ...]:
    """
    Betti numbers over GF(2), indexed by dimension 0..dim K.

    The empty complex has an empty Betti vector.
    """
    if K.is_empty():
        return ()
    ranks = [0] * (K.dim + 2)
    for k in range(1, K.dim + 1):
        ranks[k] = gf2_rank(boundary_matrix(K, k))
    f = K.f_vector()
    return tuple(f[k] - ranks[k] - ranks[k + 1] for k in range(K.dim + 1))


def reduced_betti_gf2(K: SimplicialComplex) -> Tuple[int, ...]:
    """Reduced Betti numbers (beta_0 lowered by one)."""
    betti = list(betti_gf2(K))
    if betti:
        betti[0] -= 1
    return tuple(betti)
