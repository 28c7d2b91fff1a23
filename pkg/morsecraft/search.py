"""
Morse matching search.

Every search explores removal sequences: collapse a free pair, or delete a
maximal face and declare it critical. A sequence that removes every
non-frozen face defines an acyclic matching in which the frozen faces are
critical. Budgets count node expansions, never wall-clock time.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .collapse import CollapseSequence, CollapseState, replay
from .config import RunConfig
from .exceptions import ComplexError
from .homology import betti_gf2
from .manifold import check_manifold
from .matching import MorseMatching, Pair, morse_vector
from .simplicial import (
    Simplex,
    SimplicialComplex,
    SubcomplexRef,
    boundary_subcomplex,
    euler_characteristic,
    face_key,
    face_string,
    is_pseudomanifold,
    top_down_order,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 1_000_000

Move = Tuple[Simplex, Optional[Simplex]]


class Verdict(Enum):
    """Outcome of a budgeted search."""
    FOUND = "found"
    IMPOSSIBLE = "impossible"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SearchOutcome:
    """
    Result of one removal search.

    moves holds (face, coface) for collapses and (face, None) for critical
    removals, in execution order.
    """
    verdict: Verdict
    moves: List[Move] = field(default_factory=list)
    expansions: int = 0
    stage: str = "search"

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.FOUND

    @property
    def pairs(self) -> List[Pair]:
        return [(a, b) for a, b in self.moves if b is not None]

    @property
    def criticals(self) -> List[Simplex]:
        return [a for a, b in self.moves if b is None]

    def to_matching(self, K: SimplicialComplex, boundary_critical: bool = False) -> MorseMatching:
        return MorseMatching(K, self.pairs, boundary_critical)


class RemovalSearch:
    """
    Depth-first search over removal sequences with a failed-state memo.

    Args:
        K: Complex to search on
        frozen: Downward-closed set of faces that stay (and stay critical)
        allowance: Per-dimension cap on critical removals; None means
            unlimited
        budget: Node expansions before giving up
        pinned: Maximal faces removed as critical before searching
        stage: Name reported in logs and inconclusive results
        exact_counts: Only accept sequences that use every finite allowance
            exactly
    """

    def __init__(
        self,
        K: SimplicialComplex,
        frozen: Iterable[Simplex] = (),
        allowance: Optional[Sequence[Optional[int]]] = None,
        budget: int = DEFAULT_BUDGET,
        pinned: Sequence[Simplex] = (),
        stage: str = "search",
        exact_counts: bool = False,
    ):
        self.K = K
        self.frozen = frozenset(frozen)
        dims = K.dim + 1
        allowed = list(allowance) if allowance is not None else []
        self.allowance: List[Optional[int]] = (allowed + [None] * dims)[:dims]
        self.budget = budget
        self.pinned = list(pinned)
        self.stage = stage
        self.exact_counts = exact_counts

    def _accepts(self, used: List[int]) -> bool:
        if not self.exact_counts:
            return True
        return all(cap is None or cap == n for cap, n in zip(self.allowance, used))

    def _remaining_allowance(self, k: int, used: List[int]) -> Optional[int]:
        cap = self.allowance[k]
        return None if cap is None else cap - used[k]

    def _euler_feasible(self, state: CollapseState, used: List[int]) -> bool:
        target = sum((-1) ** k * n for k, n in enumerate(state.live))
        lo = hi = 0
        for k, n in enumerate(state.live):
            rem = self._remaining_allowance(k, used)
            cap = n if rem is None else min(rem, n)
            if k % 2 == 0:
                hi += cap
            else:
                lo -= cap
        return lo <= target <= hi

    def _options(self, state: CollapseState, used: List[int]) -> List[Move]:
        pairs = [(s, state.coface_of(s)) for s in state.free]
        pairs.sort(key=lambda p: top_down_order(p[1]) + (face_key(p[0]),))
        criticals = []
        for f in state.maximal:
            rem = self._remaining_allowance(len(f) - 1, used)
            if rem is None or rem > 0:
                criticals.append(f)
        criticals.sort(key=top_down_order)
        return pairs + [(f, None) for f in criticals]

    @staticmethod
    def _apply(state: CollapseState, used: List[int], move: Move) -> None:
        face, coface = move
        if coface is None:
            state.remove_critical(face)
            used[len(face) - 1] += 1
        else:
            state.collapse(face, coface)

    @staticmethod
    def _undo(state: CollapseState, used: List[int], move: Move) -> None:
        face, coface = move
        if coface is None:
            state.undo_remove(face)
            used[len(face) - 1] -= 1
        else:
            state.undo_collapse(face, coface)

    def run(self) -> SearchOutcome:
        state = CollapseState(self.K, self.frozen)
        used = [0] * (self.K.dim + 1)
        prefix: List[Move] = []
        for face in self.pinned:
            if face not in self.K or face not in state.maximal:
                raise ComplexError(f"pinned face {face_string(face)} is not a removable maximal face")
            self._apply(state, used, (face, None))
            prefix.append((face, None))
        if any(rem is not None and rem < 0 for rem in
               (self._remaining_allowance(k, used) for k in range(len(used)))):
            return SearchOutcome(Verdict.IMPOSSIBLE, stage=self.stage)
        if state.done():
            verdict = Verdict.FOUND if self._accepts(used) else Verdict.IMPOSSIBLE
            return SearchOutcome(verdict, prefix if verdict is Verdict.FOUND else [], 0, self.stage)
        if not self._euler_feasible(state, used):
            logger.debug("[%s] ruled out by Euler characteristic", self.stage)
            return SearchOutcome(Verdict.IMPOSSIBLE, stage=self.stage)

        failed: Set[Tuple[int, Tuple[int, ...]]] = set()
        stack = [iter(self._options(state, used))]
        trail: List[Move] = []
        expansions = 0
        while stack:
            move = next(stack[-1], None)
            if move is None:
                stack.pop()
                failed.add((state.mask, tuple(used)))
                if trail:
                    self._undo(state, used, trail.pop())
                continue
            if expansions >= self.budget:
                logger.info("[%s] budget of %d expansions exhausted", self.stage, self.budget)
                return SearchOutcome(Verdict.INCONCLUSIVE, prefix + trail, expansions, self.stage)
            expansions += 1
            self._apply(state, used, move)
            key = (state.mask, tuple(used))
            if key in failed:
                self._undo(state, used, move)
                continue
            if not self._euler_feasible(state, used):
                failed.add(key)
                self._undo(state, used, move)
                continue
            if state.done() and not self._accepts(used):
                failed.add(key)
                self._undo(state, used, move)
                continue
            trail.append(move)
            if state.done():
                logger.debug("[%s] found after %d expansions", self.stage, expansions)
                return SearchOutcome(Verdict.FOUND, prefix + trail, expansions, self.stage)
            stack.append(iter(self._options(state, used)))
        logger.debug("[%s] search space exhausted after %d expansions", self.stage, expansions)
        return SearchOutcome(Verdict.IMPOSSIBLE, [], expansions, self.stage)


# -- collapses -------------------------------------------------------------

@dataclass
class CollapseResult:
    verdict: Verdict
    sequence: Optional[CollapseSequence] = None
    expansions: int = 0


def collapses_onto(
    K: SimplicialComplex,
    L: SubcomplexRef,
    budget: int = DEFAULT_BUDGET,
) -> CollapseResult:
    """
    Search for a collapse of K onto the subcomplex L.

    Args:
        K: Complex to collapse
        L: Target subcomplex of K
        budget: Node expansions

    Returns:
        CollapseResult; IMPOSSIBLE only when the search space was exhausted
    """
    if L.parent != K:
        L = SubcomplexRef(K, L.faces)
    outcome = RemovalSearch(K, L.faces, [0] * (K.dim + 1), budget, stage="collapse").run()
    if not outcome.found:
        return CollapseResult(outcome.verdict, None, outcome.expansions)
    sequence = CollapseSequence(outcome.pairs)
    replay(K, sequence, onto=L)
    return CollapseResult(Verdict.FOUND, sequence, outcome.expansions)


def collapses_to_vertex(K: SimplicialComplex, budget: int = DEFAULT_BUDGET) -> CollapseResult:
    """Collapse onto the least vertex."""
    return collapses_onto(K, SubcomplexRef.closure(K, [(K.vertices[0],)]), budget)


# -- random heuristic ------------------------------------------------------

def _pick(rng: np.random.Generator, items: Set[Simplex]) -> Simplex:
    ordered = sorted(items, key=face_key)
    return ordered[int(rng.integers(len(ordered)))]


def _random_run(
    K: SimplicialComplex,
    rng: np.random.Generator,
    frozen: FrozenSet[Simplex],
) -> List[Move]:
    state = CollapseState(K, frozen)
    moves: List[Move] = []
    if frozen:
        interior_facets = sorted((f for f in state.maximal if len(f) == K.dim + 1), key=face_key)
        if interior_facets:
            first = interior_facets[int(rng.integers(len(interior_facets)))]
            state.remove_critical(first)
            moves.append((first, None))
    while not state.done():
        if state.free:
            s = _pick(rng, state.free)
            t = state.coface_of(s)
            state.collapse(s, t)
            moves.append((s, t))
            continue
        top = max(len(f) for f in state.maximal)
        candidates = sorted((f for f in state.maximal if len(f) == top), key=face_key)
        f = candidates[int(rng.integers(len(candidates)))]
        state.remove_critical(f)
        moves.append((f, None))
    return moves


def random_morse(
    K: SimplicialComplex,
    seed: int = 0,
    restarts: int = 10,
    boundary_critical: bool = False,
    threads: Optional[int] = None,
) -> MorseMatching:
    """
    Best matching over seeded random removal runs.

    Each restart owns its generator (seeded from (seed, restart)); the
    winner has the lexicographically least Morse vector, ties going to
    the lowest restart index.
    """
    if restarts <= 0:
        raise ValueError("restarts must be positive")
    frozen: FrozenSet[Simplex] = frozenset()
    if boundary_critical:
        if not is_pseudomanifold(K):
            raise ComplexError("boundary-critical search needs a pseudomanifold")
        frozen = boundary_subcomplex(K).faces
    workers = min(threads or RunConfig().threads, restarts)

    def run(index: int) -> Tuple[Tuple[int, ...], int, List[Move]]:
        rng = np.random.default_rng([seed, index])
        moves = _random_run(K, rng, frozen)
        counts = [0] * (K.dim + 1)
        for face, coface in moves:
            if coface is None:
                counts[len(face) - 1] += 1
        for face in frozen:
            counts[len(face) - 1] += 1
        logger.debug("restart %d: Morse vector %s", index, counts)
        return tuple(counts), index, moves

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, range(restarts)))
    best_counts, best_index, best_moves = min(results, key=lambda r: (r[0], r[1]))
    logger.info("random_morse: best vector %s from restart %d", list(best_counts), best_index)
    V = MorseMatching(K, [(a, b) for a, b in best_moves if b is not None], boundary_critical)
    V.ensure_valid()
    return V


# -- exhaustive ------------------------------------------------------------

def _splits(extra: int, caps: Sequence[int]):
    """Non-negative tuples bounded by caps summing to extra, lexicographically."""
    if len(caps) == 1:
        if extra <= caps[0]:
            yield (extra,)
        return
    for first in range(0, min(extra, caps[0]) + 1):
        for rest in _splits(extra - first, caps[1:]):
            yield (first,) + rest


def _candidate_vectors(lower: Sequence[int], upper: Sequence[int], chi: int):
    """Vectors between the bounds with the right Euler sum, by total then lexicographically."""
    caps = [u - l for l, u in zip(lower, upper)]
    for extra in range(sum(caps) + 1):
        for split in _splits(extra, caps):
            vec = tuple(l + s for l, s in zip(lower, split))
            if sum((-1) ** k * v for k, v in enumerate(vec)) == chi:
                yield vec


@dataclass
class OptimalResult:
    matching: MorseMatching
    exact: bool
    expansions: int = 0


def optimal_morse(
    K: SimplicialComplex,
    budget: int = DEFAULT_BUDGET,
    facet_limit: int = 16,
    override: bool = False,
    seed: int = 0,
) -> OptimalResult:
    """
    Exhaustive minimum Morse matching by increasing candidate vectors.

    Candidates start at the GF(2) Betti numbers and respect the Euler
    characteristic; the first feasible candidate is optimal. exact is set
    only when every smaller candidate was ruled out by a completed search.

    Args:
        K: Complex to search
        budget: Node expansions shared across candidates
        facet_limit: Largest number of top-dimensional facets searched
            without override
        override: Search even above facet_limit
        seed: Seed for the fallback heuristic

    Returns:
        OptimalResult
    """
    top = sum(1 for f in K.facets if len(f) == K.dim + 1)
    if top > facet_limit and not override:
        raise ComplexError(
            f"{top} top-dimensional facets exceed the exhaustive limit of {facet_limit}"
        )
    betti = betti_gf2(K)
    chi = euler_characteristic(K)
    remaining = budget
    spent = 0
    for vec in _candidate_vectors(betti, K.f_vector(), chi):
        if remaining <= 0:
            break
        outcome = RemovalSearch(K, allowance=vec, budget=remaining, stage=f"optimal{list(vec)}").run()
        spent += outcome.expansions
        remaining -= max(outcome.expansions, 1)
        if outcome.found:
            V = outcome.to_matching(K)
            V.ensure_valid()
            logger.info("optimal_morse: %s (exact)", list(morse_vector(V).c))
            return OptimalResult(V, True, spent)
        if outcome.verdict is Verdict.INCONCLUSIVE:
            break
    logger.info("optimal_morse: budget exhausted, falling back to random search")
    return OptimalResult(random_morse(K, seed=seed, restarts=10), False, spent)


# -- boundary-critical searches --------------------------------------------

def constrained_search(
    M: SimplicialComplex,
    allowance: Sequence[Optional[int]],
    budget: int = DEFAULT_BUDGET,
    pinned: Sequence[Simplex] = (),
    frozen: Optional[Iterable[Simplex]] = None,
    stage: str = "constrained",
    exact_counts: bool = False,
) -> Tuple[SearchOutcome, Optional[MorseMatching]]:
    """
    Boundary-critical search with per-dimension interior allowances.

    Args:
        M: Pseudomanifold
        allowance: Cap on critical interior faces per dimension (None = any)
        budget: Node expansions
        pinned: Interior facets forced critical
        frozen: Faces kept critical; defaults to the boundary of M
        stage: Label for logs
        exact_counts: Require every finite allowance to be met exactly

    Returns:
        (outcome, boundary-critical matching or None)
    """
    if frozen is None:
        if not is_pseudomanifold(M):
            raise ComplexError("boundary-critical search needs a pseudomanifold")
        frozen = boundary_subcomplex(M).faces
    outcome = RemovalSearch(M, frozen, allowance, budget, pinned, stage, exact_counts).run()
    if not outcome.found:
        return outcome, None
    V = outcome.to_matching(M, boundary_critical=True)
    V.ensure_valid()
    return outcome, V


@dataclass
class CertificateResult:
    """A searched certificate and how conclusive the search was."""
    verdict: Verdict
    matching: Optional[MorseMatching] = None
    expansions: int = 0
    details: Dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.FOUND


def _interior_euler(M: SimplicialComplex, frozen: FrozenSet[Simplex]) -> int:
    return sum((-1) ** (len(f) - 1) for f in M.all_faces() if f not in frozen)


def _require_manifold(M: SimplicialComplex, what: str) -> None:
    report = check_manifold(M)
    if not report.ok:
        problems = report.reasons or sorted(report.link_failures.values())
        raise ComplexError(f"{what} needs a manifold candidate: {problems[0]}")


def is_endo_collapsible(M: SimplicialComplex, budget: int = DEFAULT_BUDGET) -> CertificateResult:
    """
    Certificate: all boundary faces plus one interior facet critical, or
    for closed M one vertex and one facet.
    """
    _require_manifold(M, "endo-collapsibility")
    boundary = boundary_subcomplex(M).faces
    d = M.dim
    allowance: List[Optional[int]] = [0] * (d + 1)
    allowance[d] = 1
    if not boundary:
        allowance[0] = 1
        if d == 0:
            allowance[0] = 2
    expected = 1 + (-1) ** d if not boundary else (-1) ** d
    if _interior_euler(M, boundary) != expected:
        return CertificateResult(Verdict.IMPOSSIBLE, details={"reason": "Euler characteristic"})
    outcome, V = constrained_search(M, allowance, budget, frozen=boundary, stage="endo")
    return CertificateResult(outcome.verdict, V, outcome.expansions)


@dataclass
class DepthResult:
    k_lower: int
    exact: bool
    certificate: MorseMatching
    verdicts: Dict[int, str] = field(default_factory=dict)


def depth_allowance(d: int, k: int) -> List[Optional[int]]:
    """One critical d-cell, none in dimensions d-1 .. d-k+1, anything below."""
    allowance: List[Optional[int]] = [None] * (d + 1)
    allowance[d] = 1
    for i in range(1, k):
        allowance[d - i] = 0
    return allowance


def collapse_depth(M: SimplicialComplex, budget: int = DEFAULT_BUDGET) -> DepthResult:
    """
    Largest certified k with 1 <= k <= dim M.

    Levels are searched upwards; exact is set when k reaches dim M or the
    search for k + 1 was exhausted.
    """
    _require_manifold(M, "collapse depth")
    d = M.dim
    boundary = boundary_subcomplex(M).faces
    best: Optional[MorseMatching] = None
    k_lower = 0
    verdicts: Dict[int, str] = {}
    exact = False
    for k in range(1, d + 1):
        outcome, V = constrained_search(M, depth_allowance(d, k), budget, frozen=boundary, stage=f"cdepth{k}")
        verdicts[k] = outcome.verdict.value
        if V is None:
            exact = outcome.verdict is Verdict.IMPOSSIBLE
            break
        best, k_lower = V, k
    else:
        exact = True
    if best is None:
        raise ComplexError("no boundary-critical matching with one critical facet exists")
    logger.info("collapse_depth: k=%d exact=%s", k_lower, exact)
    return DepthResult(k_lower, exact, best, verdicts)


def is_lc(M: SimplicialComplex, budget: int = DEFAULT_BUDGET) -> CertificateResult:
    """
    Certificate of collapse depth at least two.

    In dimension one the condition degenerates and endo-collapsibility is
    used instead.
    """
    _require_manifold(M, "the LC certificate")
    if M.dim <= 1:
        return is_endo_collapsible(M, budget)
    boundary = boundary_subcomplex(M).faces
    outcome, V = constrained_search(M, depth_allowance(M.dim, 2), budget, frozen=boundary, stage="lc")
    return CertificateResult(outcome.verdict, V, outcome.expansions)
