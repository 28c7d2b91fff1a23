"""
Collapse engine - elementary collapses, critical removals and replay.

CollapseState tracks which faces are still present together with the
number of present cofaces of each face, so free faces and maximal faces
are available in constant time. Every operation has an exact inverse,
which the backtracking searches rely on.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .exceptions import MatchingError
from .matching import MorseMatching, Pair
from .simplicial import Simplex, SimplicialComplex, SubcomplexRef, face_key, face_string, facets_of, top_down_order

logger = logging.getLogger(__name__)


@dataclass
class CollapseSequence:
    """
    Ordered elementary collapses (free face, its unique coface).
    """
    steps: List[Pair] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def to_matching(self, K: SimplicialComplex, boundary_critical: bool = False) -> MorseMatching:
        return MorseMatching(K, self.steps, boundary_critical)

    def to_dict(self) -> Dict[str, List[List[str]]]:
        return {"steps": [[face_string(a), face_string(b)] for a, b in self.steps]}


class CollapseState:
    """
    Mutable view of a complex under removals.

    Frozen faces are never removed and are excluded from the free and
    maximal sets.
    """

    def __init__(self, K: SimplicialComplex, frozen: Iterable[Simplex] = ()):
        self.K = K
        self.frozen: FrozenSet[Simplex] = frozenset(frozen)
        faces = K.all_faces()
        self.index: Dict[Simplex, int] = {f: i for i, f in enumerate(faces)}
        self.present: Set[Simplex] = set(faces)
        self.up: Dict[Simplex, int] = {f: len(K.cofaces(f)) for f in faces}
        self.free: Set[Simplex] = set()
        self.maximal: Set[Simplex] = set()
        self.live = [0] * (K.dim + 1)
        self.mask = 0
        for f in faces:
            if f in self.frozen:
                continue
            self.live[len(f) - 1] += 1
            self._classify(f)

    def _classify(self, f: Simplex) -> None:
        if f in self.frozen or f not in self.present:
            return
        count = self.up[f]
        if count == 1:
            self.free.add(f)
            self.maximal.discard(f)
        elif count == 0:
            self.maximal.add(f)
            self.free.discard(f)
        else:
            self.free.discard(f)
            self.maximal.discard(f)

    def present_cofaces(self, f: Simplex) -> List[Simplex]:
        return [t for t in self.K.cofaces(f) if t in self.present]

    def coface_of(self, free_face: Simplex) -> Simplex:
        """The unique present coface of a free face."""
        cofaces = self.present_cofaces(free_face)
        if len(cofaces) != 1:
            raise MatchingError(f"{face_string(free_face)} is not free")
        return cofaces[0]

    def _drop(self, f: Simplex) -> None:
        self.present.remove(f)
        self.free.discard(f)
        self.maximal.discard(f)
        self.mask |= 1 << self.index[f]
        if f not in self.frozen:
            self.live[len(f) - 1] -= 1
        for sub in facets_of(f):
            self.up[sub] -= 1
            self._classify(sub)

    def _restore(self, f: Simplex) -> None:
        self.present.add(f)
        self.mask &= ~(1 << self.index[f])
        if f not in self.frozen:
            self.live[len(f) - 1] += 1
        for sub in facets_of(f):
            self.up[sub] += 1
            self._classify(sub)
        self._classify(f)

    def is_free_pair(self, s: Simplex, t: Simplex) -> bool:
        return (
            s in self.present
            and t in self.present
            and self.up[s] == 1
            and self.up[t] == 0
            and len(t) == len(s) + 1
            and set(s).issubset(t)
        )

    def collapse(self, s: Simplex, t: Simplex) -> None:
        """Elementary collapse of the free pair (s, t)."""
        if s in self.frozen or t in self.frozen:
            raise MatchingError(f"collapse ({face_string(s)}, {face_string(t)}) touches a frozen face")
        if not self.is_free_pair(s, t):
            raise MatchingError(f"({face_string(s)}, {face_string(t)}) is not a free pair")
        self._drop(t)
        self._drop(s)

    def undo_collapse(self, s: Simplex, t: Simplex) -> None:
        self._restore(s)
        self._restore(t)

    def remove_critical(self, f: Simplex) -> None:
        """Remove a maximal face, declaring it critical."""
        if f in self.frozen:
            raise MatchingError(f"{face_string(f)} is frozen")
        if f not in self.present or self.up[f] != 0:
            raise MatchingError(f"{face_string(f)} is not a maximal face")
        self._drop(f)

    def undo_remove(self, f: Simplex) -> None:
        self._restore(f)

    def done(self) -> bool:
        """All non-frozen faces removed."""
        return not any(self.live)

    def remaining(self) -> Set[Simplex]:
        return set(self.present)


def replay(
    K: SimplicialComplex,
    sequence: CollapseSequence,
    onto: Optional[SubcomplexRef] = None,
    removed_first: Iterable[Simplex] = (),
) -> Set[Simplex]:
    """
    Re-verify a collapse sequence on a fresh engine.

    Args:
        K: Complex the sequence starts from
        sequence: Steps to execute in order
        onto: When given, the faces left must be exactly these
        removed_first: Maximal faces deleted before the first step

    Returns:
        The set of faces left after the last step
    """
    state = CollapseState(K)
    for f in removed_first:
        state.remove_critical(f)
    for i, (s, t) in enumerate(sequence.steps):
        if not state.is_free_pair(s, t):
            raise MatchingError(f"step {i}: ({face_string(s)}, {face_string(t)}) is not a free pair")
        state.collapse(s, t)
    left = state.remaining()
    if onto is not None and left != set(onto.faces):
        extra = sorted(left - set(onto.faces), key=face_key)
        missing = sorted(set(onto.faces) - left, key=face_key)
        raise MatchingError(
            f"replay ends on the wrong subcomplex ({len(extra)} extra faces, {len(missing)} missing)"
        )
    logger.debug("replayed %d collapse steps", len(sequence.steps))
    return left


def collapse_order(V: MorseMatching, frozen: Iterable[Simplex] = ()) -> List[Tuple[Simplex, Optional[Simplex]]]:
    """
    Removal order realizing a valid matching: free pairs and critical
    maximal faces, top-down, leaving the frozen faces.

    Raises MatchingError when the matching cannot be executed this way,
    which only happens for invalid matchings or frozen faces that are
    matched.
    """
    state = CollapseState(V.complex, frozen)
    partner = V.partner
    order: List[Tuple[Simplex, Optional[Simplex]]] = []
    while not state.done():
        progressed = False
        for f in sorted(state.maximal, key=top_down_order):
            mate = partner.get(f)
            if mate is None:
                state.remove_critical(f)
                order.append((f, None))
                progressed = True
                break
            if len(mate) < len(f) and state.up.get(mate) == 1 and mate in state.present:
                state.collapse(mate, f)
                order.append((mate, f))
                progressed = True
                break
        if not progressed:
            raise MatchingError("matching cannot be executed as a removal sequence")
    return order
