"""
File formats - facet files and the JSON inputs and artifacts.

Facet files are UTF-8 text with one facet per line, vertex ids separated
by whitespace; lines starting with # are comments and blank lines are
skipped. JSON inputs name facet files relative to their own directory.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from .artifact import MatchingCertificate
from .assembly import GluingSpec
from .exceptions import ComplexError, FormatError
from .handles import Handle, HandleDecomposition
from .local_construction import LocalConstructionTrace
from .simplicial import DEFAULT_FACE_CAP, SimplicialComplex, parse_face

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
ModelT = TypeVar("ModelT", bound=BaseModel)


def parse_facets(text: str, face_cap: int = DEFAULT_FACE_CAP) -> SimplicialComplex:
    """
    Parse facet-file text.

    Raises:
        FormatError: With the 1-based line number of the offending line
    """
    facets: List[List[int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = [int(token) for token in line.split()]
        except ValueError:
            raise FormatError(f"expected whitespace-separated integers, got {line!r}", line=number)
        if any(v < 0 for v in row):
            raise FormatError("vertex ids must be non-negative", line=number)
        if len(set(row)) != len(row):
            raise FormatError(f"repeated vertex in facet {row}", line=number)
        facets.append(row)
    if not facets:
        raise FormatError("no facets found")
    return SimplicialComplex(facets, face_cap=face_cap)


def read_facets(path: PathLike, face_cap: int = DEFAULT_FACE_CAP) -> SimplicialComplex:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Facet file not found: {path}")
    try:
        return parse_facets(file_path.read_text(encoding="utf-8"), face_cap)
    except FormatError as e:
        raise FormatError(f"{path}: {e}")


def format_facets(K: SimplicialComplex) -> str:
    """Canonical facet listing: facets sorted, one per line."""
    return "".join(" ".join(str(v) for v in f) + "\n" for f in K.facets)


def write_facets(K: SimplicialComplex, path: PathLike) -> None:
    Path(path).write_text(format_facets(K), encoding="utf-8")


def dump_json(value: Union[BaseModel, Dict[str, Any], List[Any]]) -> str:
    """Deterministic JSON text with a trailing newline."""
    if isinstance(value, BaseModel):
        return value.model_dump_json(indent=2) + "\n"
    return json.dumps(value, indent=2, sort_keys=True) + "\n"


def _load_model(path: PathLike, model: Type[ModelT]) -> ModelT:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"JSON file not found: {path}")
    try:
        return model.model_validate_json(file_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise FormatError(f"{path}: {e.errors()[0]['msg']} at {e.errors()[0]['loc']}")


def read_certificate(path: PathLike) -> MatchingCertificate:
    return _load_model(path, MatchingCertificate)


class GluingSpecFile(BaseModel):
    left: Optional[str] = Field(None, description="Facet file of the left side")
    right: Optional[str] = Field(None, description="Facet file of the right side")
    map: List[Tuple[int, int]] = Field(..., description="[left vertex, right vertex] pairs")

    def identification(self) -> Dict[int, int]:
        mapping: Dict[int, int] = {}
        for a, b in self.map:
            if a in mapping:
                raise FormatError(f"left vertex {a} is identified twice")
            mapping[a] = b
        return mapping


class TraceFile(BaseModel):
    tree: str = Field(..., description="Facet file of the tree of simplices")
    identify: List[Tuple[str, str]] = Field(default_factory=list, description="[ridge, ridge] pairs")


class HandleEntry(BaseModel):
    complex: str = Field(..., description="Facet file of the handle")
    index: int = Field(..., description="Handle index")
    attach: Optional[GluingSpecFile] = Field(None, description="Map from the running union onto the handle")


def _resolve(base: Path, name: Optional[str], what: str) -> Path:
    if not name:
        raise FormatError(f"missing {what} file name")
    candidate = Path(name)
    return candidate if candidate.is_absolute() else base / candidate


def load_gluing_spec(path: PathLike, face_cap: int = DEFAULT_FACE_CAP) -> GluingSpec:
    spec = _load_model(path, GluingSpecFile)
    base = Path(path).parent
    left = read_facets(_resolve(base, spec.left, "left"), face_cap)
    right = read_facets(_resolve(base, spec.right, "right"), face_cap)
    return GluingSpec(left, right, spec.identification())


def load_trace(path: PathLike, face_cap: int = DEFAULT_FACE_CAP) -> LocalConstructionTrace:
    trace = _load_model(path, TraceFile)
    tree = read_facets(_resolve(Path(path).parent, trace.tree, "tree"), face_cap)
    try:
        steps = [(parse_face(a), parse_face(b)) for a, b in trace.identify]
    except ComplexError as e:
        raise FormatError(f"{path}: {e}")
    return LocalConstructionTrace(tree, steps)


def load_decomposition(path: PathLike, face_cap: int = DEFAULT_FACE_CAP) -> HandleDecomposition:
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"JSON file not found: {path}")
    try:
        entries = TypeAdapter(List[HandleEntry]).validate_json(file_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise FormatError(f"{path}: {e.errors()[0]['msg']} at {e.errors()[0]['loc']}")
    base = file_path.parent
    handles = []
    for entry in entries:
        K = read_facets(_resolve(base, entry.complex, "handle"), face_cap)
        attach = entry.attach.identification() if entry.attach is not None else {}
        handles.append(Handle(K, entry.index, attach))
    return HandleDecomposition(handles)
