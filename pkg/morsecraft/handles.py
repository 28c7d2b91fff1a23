"""
Handle pipeline - a boundary-critical matching on a manifold assembled
from handles, with c_i critical interior cells of dimension d - i where
c_i counts the handles of index i.

Each handle is certified on its own (endo-collapsible, or after a nice
subdivision), the running union and the handle are brought to a common
derived level, and the two matchings are composed across the attaching
region. Vertices of refined complexes are tracked by keys: an original
vertex keys itself, an apex keys the set of keys of the face it
subdivides. Equal keys on both sides name the same point, which is how
attaching maps survive subdivision.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Tuple

from .assembly import GluingSpec, compose_boundary_critical, glue
from .config import RunConfig
from .exceptions import ComplexError, CompositionError, SearchInconclusive
from .execution_graph import Stage, StageGraph
from .matching import MorseMatching, morse_vector
from .nicesub import nicesub_pipeline
from .search import Verdict, constrained_search, is_endo_collapsible
from .simplicial import SimplicialComplex, boundary_subcomplex
from .stellar_lift import lift_through_derived
from .subdivision import refine_keys

logger = logging.getLogger(__name__)

Keys = Dict[int, Hashable]


@dataclass
class Handle:
    """
    A d-ball attached as an index-p handle.

    attach maps vertices of the running union (as produced by gluing the
    previous handles without subdivision) to vertices of this handle.
    """
    complex: SimplicialComplex
    index: int
    attach: Dict[int, int] = field(default_factory=dict)


@dataclass
class HandleDecomposition:
    handles: List[Handle]

    @property
    def dim(self) -> int:
        return self.handles[0].complex.dim if self.handles else -1

    def validate(self) -> None:
        """
        Raises:
            ComplexError: On an empty list, mixed dimensions, indices out
                of order or attachments on the wrong handles
        """
        if not self.handles:
            raise ComplexError("a handle decomposition needs at least one handle")
        d = self.dim
        first = self.handles[0]
        if first.index != 0 or first.attach:
            raise ComplexError("the first handle must have index 0 and no attachment")
        previous = 0
        for i, handle in enumerate(self.handles):
            if handle.complex.dim != d:
                raise ComplexError(f"handle {i} has dimension {handle.complex.dim}, expected {d}")
            if not 0 <= handle.index <= d:
                raise ComplexError(f"handle {i} has index {handle.index} outside 0..{d}")
            if handle.index < previous:
                raise ComplexError(f"handle {i} breaks the increasing index order")
            if i and (handle.index == 0 or not handle.attach):
                raise ComplexError(f"handle {i} must have positive index and an attaching map")
            previous = handle.index

    def index_counts(self) -> List[int]:
        counts = [0] * (self.dim + 1)
        for handle in self.handles:
            counts[handle.index] += 1
        return counts

    def expected_interior(self) -> List[int]:
        """c_int_{d-i} = number of index-i handles."""
        return list(reversed(self.index_counts()))


@dataclass
class PipelineResult:
    complex: SimplicialComplex
    matching: MorseMatching
    level: int
    stages: List[Dict[str, Any]] = field(default_factory=list)
    tiers: List[int] = field(default_factory=list)


@dataclass
class _Certified:
    complex: SimplicialComplex
    matching: MorseMatching
    level: int
    keys: Keys


@dataclass
class _Union:
    coarse: SimplicialComplex
    fine: SimplicialComplex
    matching: MorseMatching
    level: int
    keys: Keys
    tiers: List[int] = field(default_factory=list)


def _certify_handle(index: int, handle: Handle, config: RunConfig) -> _Certified:
    stage = f"handle{index}.certify"
    B = handle.complex
    result = is_endo_collapsible(B, config.budget)
    keys: Keys = {v: ("v", v) for v in B.vertices}
    if result.found:
        return _Certified(B, result.matching, 0, keys)
    logger.info("%s: not certified directly (%s), trying a nice subdivision", stage, result.verdict.value)
    try:
        nice = nicesub_pipeline(B, config, rounds=0, keys=keys)
    except SearchInconclusive as e:
        raise SearchInconclusive(str(e), stage=stage)
    keys = dict(nice.keys)
    keys.update({v: ("interior", index, v) for v in nice.complex.vertices if v not in nice.keys})
    return _Certified(nice.complex, nice.certificate, nice.rounds, keys)


def _raise_level(K: SimplicialComplex, V: MorseMatching, keys: Keys, rounds: int) -> Tuple[SimplicialComplex, MorseMatching, Keys]:
    if rounds == 0:
        return K, V, keys
    lifted = lift_through_derived(K, V, rounds)
    _, keys = refine_keys(K, keys, rounds)
    return lifted.complex, lifted.matching, keys


def _region_target(d: int, p: int) -> List[int]:
    target = [0] * d
    target[d - 1] += 1
    target[d - p] += 1
    return target


def _attach(index: int, union: _Union, handle: Handle, cert: _Certified, config: RunConfig) -> _Union:
    stage = f"handle{index}.attach"
    d = union.fine.dim
    coarse = glue(GluingSpec(union.coarse, handle.complex, dict(handle.attach)))
    # handle keys renamed into coarse union labels
    rename = {("v", v): ("v", coarse.right_labels[v]) for v in handle.complex.vertices}

    def translate(key: Hashable) -> Hashable:
        if isinstance(key, frozenset):
            return frozenset(translate(k) for k in key)
        return rename.get(key, key)

    level = max(union.level, cert.level)
    fine, u, union_keys = _raise_level(union.fine, union.matching, union.keys, level - union.level)
    hfine, g, hkeys = _raise_level(cert.complex, cert.matching, cert.keys, level - cert.level)
    hkeys = {v: translate(k) for v, k in hkeys.items()}

    by_key = {k: v for v, k in union_keys.items()}
    hboundary = set(boundary_subcomplex(hfine).vertices())
    mapping = {by_key[k]: v for v, k in hkeys.items() if v in hboundary and k in by_key}
    spec = GluingSpec(fine, hfine, mapping)
    region = glue(spec).intersection.as_complex()

    target = _region_target(d, handle.index)
    outcome, h = constrained_search(region, target, config.budget, stage=stage, exact_counts=True)
    if h is None:
        if outcome.verdict is Verdict.INCONCLUSIVE:
            raise SearchInconclusive("no certificate on the attaching region within budget", stage=stage)
        raise CompositionError(f"attaching region admits no matching with interior counts {target}")

    composed = compose_boundary_critical(spec, u, g, h, config.budget, allow_components=handle.index == 1)
    glued = composed.glued
    keys = dict(union_keys)
    keys.update({glued.right_labels[v]: k for v, k in hkeys.items()})
    logger.info("%s: union has %d facets at level %d", stage, len(glued.complex.facets), level)
    return _Union(coarse.complex, glued.complex, composed.matching, level, keys, union.tiers + [composed.tier])


def _pipeline_1d(H: HandleDecomposition, config: RunConfig) -> PipelineResult:
    union = H.handles[0].complex
    for handle in H.handles[1:]:
        union = glue(GluingSpec(union, handle.complex, dict(handle.attach))).complex
    target = H.expected_interior()
    outcome, V = constrained_search(union, target, config.budget, stage="handles.1d", exact_counts=True)
    if V is None:
        if outcome.verdict is Verdict.INCONCLUSIVE:
            raise SearchInconclusive("one-dimensional assembly not certified within budget", stage="handles.1d")
        raise CompositionError(f"assembled curve admits no matching with interior counts {target}")
    return PipelineResult(union, V, 0, [{"stage": "handles.1d", "status": "completed"}])


def handle_pipeline(H: HandleDecomposition, config: Optional[RunConfig] = None) -> PipelineResult:
    """
    Assemble H and certify it.

    Args:
        H: Handles in increasing index order
        config: Budget and derived-round limit for every sub-search

    Returns:
        PipelineResult with a boundary-critical matching whose interior
        counts are H.expected_interior()

    Raises:
        SearchInconclusive: A sub-search ran out of budget; stage names it
        CompositionError: The assembled counts disagree with the handle counts
    """
    config = config or RunConfig()
    H.validate()
    if H.dim < 1:
        raise ComplexError("handle decompositions need dimension at least 1")
    if H.dim == 1:
        return _pipeline_1d(H, config)

    graph = StageGraph()
    for i, handle in enumerate(H.handles):
        graph.add_stage(Stage(
            f"handle{i}.certify",
            lambda inputs, i=i, handle=handle: _certify_handle(i, handle, config),
        ))
    graph.add_stage(Stage(
        "union0",
        lambda inputs: _start(inputs["handle0.certify"], H.handles[0]),
        dependencies=["handle0.certify"],
    ))
    for i, handle in enumerate(H.handles[1:], start=1):
        graph.add_stage(Stage(
            f"union{i}",
            lambda inputs, i=i, handle=handle: _attach(
                i, inputs[f"union{i - 1}"], handle, inputs[f"handle{i}.certify"], config
            ),
            dependencies=[f"union{i - 1}", f"handle{i}.certify"],
        ))
    try:
        results = graph.execute()
    except SearchInconclusive as e:
        raise SearchInconclusive(
            f"pipeline stopped: {e}", stage=e.stage or graph.failed_stage(), partial=graph.summary()
        )
    final: _Union = results[f"union{len(H.handles) - 1}"]
    expected = H.expected_interior()
    achieved = list(morse_vector(final.matching).c_int or ())
    if achieved != expected:
        raise CompositionError(f"assembled interior counts {achieved} differ from the handle counts {expected}")
    return PipelineResult(final.fine, final.matching, final.level, graph.summary(), final.tiers)


def _start(cert: _Certified, handle: Handle) -> _Union:
    return _Union(handle.complex, cert.complex, cert.matching, cert.level, dict(cert.keys))
