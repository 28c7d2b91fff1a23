"""
Gradient paths and Forman cancellation.
"""

import logging
from typing import List, Optional

from .exceptions import CancellationError, MatchingError
from .matching import MorseMatching, critical_cells, validate_matching
from .simplicial import Simplex, face_string, facets_of, make_simplex, top_down_order

logger = logging.getLogger(__name__)


def gradient_paths(
    V: MorseMatching,
    a: Simplex,
    b: Simplex,
    limit: Optional[int] = None,
) -> List[List[Simplex]]:
    """
    V-paths from the boundary of a down to b.

    Each path is listed as [a, s0, t0, s1, t1, ..., b] where (s_i, t_i)
    are matched pairs and s_{i+1} is a facet of t_i other than s_i.

    Args:
        V: Valid matching
        a: Critical face of dimension p + 1
        b: Critical face of dimension p
        limit: Stop after this many paths

    Returns:
        Paths in canonical order of their first steps
    """
    a, b = make_simplex(a), make_simplex(b)
    if len(a) != len(b) + 1:
        raise CancellationError(f"dim {face_string(a)} must be dim {face_string(b)} + 1")
    partner = V.partner
    paths: List[List[Simplex]] = []
    # explicit stack of (current lower face, path so far)
    stack = [(s, [a, s]) for s in reversed(facets_of(a))]
    while stack:
        sigma, path = stack.pop()
        if sigma == b:
            paths.append(path)
            if limit is not None and len(paths) >= limit:
                break
            continue
        tau = partner.get(sigma)
        if tau is None or len(tau) < len(sigma):
            continue
        for nxt in reversed(facets_of(tau)):
            if nxt != sigma:
                stack.append((nxt, path + [tau, nxt]))
    return paths


def cancel_pair(V: MorseMatching, a: Simplex, b: Simplex) -> MorseMatching:
    """
    Reverse the unique gradient path from a to b.

    The result is valid and has the critical set of V minus {a, b}.
    """
    a, b = make_simplex(a), make_simplex(b)
    critical = set(critical_cells(V))
    for face in (a, b):
        if face not in critical:
            raise CancellationError(f"{face_string(face)} is not critical")
    paths = gradient_paths(V, a, b, limit=2)
    if len(paths) != 1:
        raise CancellationError(
            f"{len(paths) if paths else 'no'} gradient paths from {face_string(a)} to {face_string(b)}; "
            "cancellation needs exactly one"
        )
    path = paths[0]
    lower = path[1::2]
    upper = [a] + path[2::2]
    removed = set(zip(lower[:-1], upper[1:]))
    pairs = [p for p in V.pairs if p not in removed]
    pairs.extend(zip(lower, upper))
    result = V.with_pairs(pairs)
    report = validate_matching(result)
    if not report.valid:
        raise CancellationError(f"cancellation produced an invalid matching: {report.violations[0].message}")
    logger.debug("cancelled %s against %s along %d steps", face_string(a), face_string(b), len(lower))
    return result


def cancel_all(V: MorseMatching, max_rounds: int = 1000) -> MorseMatching:
    """
    Greedily cancel critical pairs joined by a unique gradient path.

    Pairs are tried in canonical order; stops when no cancellation applies.
    """
    for _ in range(max_rounds):
        critical = critical_cells(V)
        done = True
        for a in sorted(critical, key=top_down_order):
            for b in (f for f in critical if len(f) == len(a) - 1):
                if len(gradient_paths(V, a, b, limit=2)) == 1:
                    try:
                        V = cancel_pair(V, a, b)
                    except (CancellationError, MatchingError):
                        continue
                    done = False
                    break
            if not done:
                break
        if done:
            return V
    return V
