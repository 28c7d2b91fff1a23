"""
Artifacts - certificates and records bound to the complex they were
computed on.

Every artifact carries the complex_hash of its complex and is checked
against it, and re-validated, before it is trusted again.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .collapse import CollapseSequence, replay
from .exceptions import FormatError, MatchingError
from .matching import MorseMatching, critical_cells, morse_vector, validate_matching
from .simplicial import SimplicialComplex, SubcomplexRef, face_string, parse_face
from .subdivision import SubdivisionMap


def complex_hash(K: SimplicialComplex) -> str:
    """SHA-256 hex digest of the canonical sorted facet listing."""
    return K.content_hash()


def _check_hash(K: SimplicialComplex, expected: str, kind: str) -> None:
    actual = complex_hash(K)
    if actual != expected:
        raise MatchingError(f"{kind} was computed on complex {expected[:12]}..., not on {actual[:12]}...")


class MatchingCertificate(BaseModel):
    """
    A Morse matching together with everything needed to re-check it.
    """

    complex_hash: str = Field(..., description="Hash of the complex the matching lives on")
    boundary_critical: bool = Field(False, description="Whether every boundary face is critical")
    pairs: List[List[str]] = Field(default_factory=list, description="[face, coface] pairs as face strings")
    critical: List[str] = Field(default_factory=list, description="Critical faces as face strings")
    morse_vector: List[int] = Field(default_factory=list, description="Critical faces per dimension")
    c_int: List[int] = Field(default_factory=list, description="Critical interior faces per dimension")
    metadata: Dict[str, Any] = Field(default_factory=dict, description="Provenance of the certificate")

    @classmethod
    def from_matching(cls, V: MorseMatching, metadata: Optional[Dict[str, Any]] = None) -> "MatchingCertificate":
        """
        Certify a matching; refuses invalid ones.
        """
        V.ensure_valid()
        vector = morse_vector(V).to_dict()
        return cls(
            complex_hash=complex_hash(V.complex),
            boundary_critical=V.boundary_critical,
            pairs=[[face_string(a), face_string(b)] for a, b in V.pairs],
            critical=[face_string(f) for f in critical_cells(V)],
            morse_vector=vector["morse_vector"],
            c_int=vector["c_int"],
            metadata=dict(sorted((metadata or {}).items())),
        )

    def to_matching(self, K: SimplicialComplex) -> MorseMatching:
        """
        Rebuild the matching on K after checking the hash.

        Raises:
            MatchingError: On a hash mismatch, an invalid matching, or
                recorded counts that disagree with the recomputed ones
        """
        _check_hash(K, self.complex_hash, "certificate")
        pairs = []
        for item in self.pairs:
            if len(item) != 2:
                raise FormatError(f"pair entry must have two faces, got {item!r}")
            pairs.append((parse_face(item[0]), parse_face(item[1])))
        V = MorseMatching(K, pairs, self.boundary_critical)
        report = validate_matching(V)
        if not report.valid:
            raise MatchingError(f"certificate does not validate: {report.violations[0].message}")
        recomputed = MatchingCertificate.from_matching(V)
        if recomputed.critical != self.critical or recomputed.morse_vector != self.morse_vector:
            raise MatchingError("recorded critical faces disagree with the matching")
        return V


class CollapseCertificate(BaseModel):
    """A collapse sequence and, optionally, the subcomplex it ends on."""

    complex_hash: str = Field(..., description="Hash of the starting complex")
    steps: List[List[str]] = Field(default_factory=list, description="[free face, coface] steps in order")
    onto: Optional[List[str]] = Field(None, description="Facets of the final subcomplex")

    @classmethod
    def from_sequence(
        cls,
        K: SimplicialComplex,
        sequence: CollapseSequence,
        onto: Optional[SubcomplexRef] = None,
    ) -> "CollapseCertificate":
        return cls(
            complex_hash=complex_hash(K),
            steps=sequence.to_dict()["steps"],
            onto=[face_string(f) for f in onto.facets()] if onto is not None else None,
        )

    def to_sequence(self) -> CollapseSequence:
        return CollapseSequence([(parse_face(a), parse_face(b)) for a, b in self.steps])

    def verify(self, K: SimplicialComplex) -> CollapseSequence:
        """Replay the steps on K and check the final subcomplex."""
        _check_hash(K, self.complex_hash, "collapse sequence")
        sequence = self.to_sequence()
        onto = None
        if self.onto is not None:
            onto = SubcomplexRef.closure(K, (parse_face(f) for f in self.onto))
        replay(K, sequence, onto=onto)
        return sequence


class SubdivisionRecord(BaseModel):
    """Carrier map of a subdivision, keyed by source face strings."""

    source_hash: str = Field(..., description="Hash of the subdivided complex")
    target_hash: str = Field(..., description="Hash of the subdivision")
    carrier: Dict[str, List[str]] = Field(default_factory=dict, description="Source face -> target faces")

    @classmethod
    def from_map(cls, m: SubdivisionMap) -> "SubdivisionRecord":
        return cls(
            source_hash=complex_hash(m.source),
            target_hash=complex_hash(m.target),
            carrier=m.to_dict(),
        )


class DepthReport(BaseModel):
    """Collapse depth with its certificate."""

    complex_hash: str
    k: int = Field(..., description="Largest certified collapse depth")
    exact: bool = Field(..., description="Whether the next level was proved impossible")
    verdicts: Dict[str, str] = Field(default_factory=dict, description="Search verdict per level")
    certificate: MatchingCertificate
