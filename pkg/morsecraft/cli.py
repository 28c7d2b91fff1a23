"""
Command-line front end.

Exit codes: 0 on success (including proved negative answers), 2 when a
search ran out of budget, 1 on any error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .artifact import CollapseCertificate, DepthReport, MatchingCertificate, SubdivisionRecord, complex_hash
from .assembly import compose_boundary_critical, glue
from .config import RunConfig
from .exceptions import MorsecraftError, SearchInconclusive
from .formats import (
    dump_json,
    format_facets,
    load_decomposition,
    load_gluing_spec,
    load_trace,
    read_certificate,
    read_facets,
    write_facets,
)
from .handles import handle_pipeline
from .homology import betti_gf2
from .local_construction import build_local_construction
from .manifold import check_manifold, is_orientable
from .matching import morse_inequalities
from .search import Verdict, collapse_depth, collapses_onto, is_lc, optimal_morse, random_morse
from .simplicial import (
    SubcomplexRef,
    boundary_subcomplex,
    euler_characteristic,
    is_pseudomanifold,
    parse_face,
)
from .stellar_lift import lift_matching
from .subdivision import bistellar_flip, derived_subdivision, star_face

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _config(args: argparse.Namespace) -> RunConfig:
    overrides = {"seed": args.seed, "budget": args.budget, "restarts": args.restarts}
    if args.config:
        return RunConfig.from_yaml(args.config, overrides)
    return RunConfig.build(None, overrides)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _verdict_report(K, verdict: Verdict, expansions: int, **extra: Any) -> Dict[str, Any]:
    report: Dict[str, Any] = {
        "complex_hash": complex_hash(K),
        "verdict": verdict.value,
        "expansions": expansions,
    }
    report.update(extra)
    return report


def _info_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    report: Dict[str, Any] = {
        "complex_hash": complex_hash(K),
        "dim": K.dim,
        "f_vector": list(K.f_vector()),
        "euler_characteristic": euler_characteristic(K),
        "betti_gf2": list(betti_gf2(K)),
        "pure": K.is_pure(),
        "pseudomanifold": is_pseudomanifold(K),
    }
    if report["pseudomanifold"]:
        boundary = boundary_subcomplex(K)
        report["boundary_f_vector"] = list(boundary.as_complex().f_vector()) if not boundary.is_empty() else []
        report["manifold"] = check_manifold(K).to_dict()
        report["orientable"] = is_orientable(K)
    _emit(args, dump_json(report))
    return EXIT_OK


def _morse_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    if args.exhaustive:
        result = optimal_morse(K, config.budget, config.exhaustive_facet_limit, args.override, config.seed)
        V, metadata = result.matching, {"method": "exhaustive", "exact": result.exact}
    else:
        V = random_morse(K, config.seed, config.restarts, args.boundary_critical, config.threads)
        metadata = {"method": "random", "seed": config.seed, "restarts": config.restarts}
    metadata["inequalities"] = morse_inequalities(V)
    _emit(args, dump_json(MatchingCertificate.from_matching(V, metadata)))
    if args.exhaustive and not metadata["exact"]:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _collapse_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    if args.onto:
        L = SubcomplexRef.closure(K, read_facets(args.onto, config.face_cap).facets)
    else:
        L = SubcomplexRef.closure(K, [(K.vertices[0],)])
    result = collapses_onto(K, L, config.budget)
    if result.sequence is not None:
        _emit(args, dump_json(CollapseCertificate.from_sequence(K, result.sequence, L)))
        return EXIT_OK
    _emit(args, dump_json(_verdict_report(K, result.verdict, result.expansions)))
    return EXIT_INCONCLUSIVE if result.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def _cdepth_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    depth = collapse_depth(K, config.budget)
    report = DepthReport(
        complex_hash=complex_hash(K),
        k=depth.k_lower,
        exact=depth.exact,
        verdicts={str(k): v for k, v in sorted(depth.verdicts.items())},
        certificate=MatchingCertificate.from_matching(depth.certificate),
    )
    _emit(args, dump_json(report))
    return EXIT_OK if depth.exact else EXIT_INCONCLUSIVE


def _lc_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    result = is_lc(K, config.budget)
    if result.found:
        _emit(args, dump_json(MatchingCertificate.from_matching(result.matching, {"lc": True})))
        return EXIT_OK
    _emit(args, dump_json(_verdict_report(K, result.verdict, result.expansions, lc=False)))
    return EXIT_INCONCLUSIVE if result.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def _subdivide_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    if args.star:
        target, m = star_face(K, parse_face(args.star))
    else:
        target, m = derived_subdivision(K, args.derived)
    _emit(args, format_facets(target))
    if args.map:
        with open(args.map, "w", encoding="utf-8") as handle:
            handle.write(dump_json(SubdivisionRecord.from_map(m)))
    return EXIT_OK


def _flip_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    _emit(args, format_facets(bistellar_flip(K, parse_face(args.s), parse_face(args.t))))
    return EXIT_OK


def _lift_command(args: argparse.Namespace) -> int:
    config = _config(args)
    K = read_facets(args.file, config.face_cap)
    V = read_certificate(args.matching).to_matching(K)
    result = lift_matching(K, V, parse_face(args.face))
    if args.complex_out:
        write_facets(result.complex, args.complex_out)
    metadata = {"starred": args.face}
    _emit(args, dump_json(MatchingCertificate.from_matching(result.matching, metadata)))
    return EXIT_OK


def _glue_command(args: argparse.Namespace) -> int:
    config = _config(args)
    glued = glue(load_gluing_spec(args.spec, config.face_cap))
    _emit(args, format_facets(glued.complex))
    return EXIT_OK


def _compose_command(args: argparse.Namespace) -> int:
    config = _config(args)
    spec = load_gluing_spec(args.spec, config.face_cap)
    region = glue(spec).intersection.as_complex()
    f = read_certificate(args.f).to_matching(spec.left)
    g = read_certificate(args.g).to_matching(spec.right)
    h = read_certificate(args.h).to_matching(region)
    result = compose_boundary_critical(spec, f, g, h, config.budget)
    if args.complex_out:
        write_facets(result.glued.complex, args.complex_out)
    metadata = {"tier": result.tier, "expected_c_int": result.expected}
    _emit(args, dump_json(MatchingCertificate.from_matching(result.matching, metadata)))
    return EXIT_OK


def _build_lc_command(args: argparse.Namespace) -> int:
    config = _config(args)
    built = build_local_construction(load_trace(args.trace, config.face_cap))
    logger.info("local construction closed=%s", built.closed)
    _emit(args, format_facets(built.complex))
    return EXIT_OK


def _pipeline_command(args: argparse.Namespace) -> int:
    config = _config(args)
    result = handle_pipeline(load_decomposition(args.decomposition, config.face_cap), config)
    if args.complex_out:
        write_facets(result.complex, args.complex_out)
    metadata = {"level": result.level, "stages": result.stages, "tiers": result.tiers}
    _emit(args, dump_json(MatchingCertificate.from_matching(result.matching, metadata)))
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="Seed for randomized searches")
    common.add_argument("--budget", type=int, help="Node expansions per search")
    common.add_argument("--restarts", type=int, help="Restarts for the random heuristic")
    common.add_argument("-o", "--output", help="Write the result here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="morsecraft", description="Discrete Morse theory on simplicial complexes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("info", parents=[common], help="Invariants and manifold checks")
    p.add_argument("file")
    p.set_defaults(func=_info_command)

    p = subparsers.add_parser("morse", parents=[common], help="Find a Morse matching")
    p.add_argument("file")
    p.add_argument("--exhaustive", action="store_true", help="Search for an optimal matching")
    p.add_argument("--override", action="store_true", help="Allow exhaustive search above the facet limit")
    p.add_argument("--boundary-critical", action="store_true", help="Keep every boundary face critical")
    p.set_defaults(func=_morse_command)

    p = subparsers.add_parser("collapse", parents=[common], help="Collapse onto a subcomplex or a vertex")
    p.add_argument("file")
    p.add_argument("--onto", help="Facet file of the target subcomplex")
    p.set_defaults(func=_collapse_command)

    p = subparsers.add_parser("cdepth", parents=[common], help="Collapse depth with certificate")
    p.add_argument("file")
    p.set_defaults(func=_cdepth_command)

    p = subparsers.add_parser("lc", parents=[common], help="Certify local constructibility")
    p.add_argument("file")
    p.set_defaults(func=_lc_command)

    p = subparsers.add_parser("subdivide", parents=[common], help="Derived or stellar subdivision")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--derived", type=int, metavar="N", help="Rounds of derived subdivision")
    mode.add_argument("--star", metavar="FACE", help="Face to star, e.g. 0-1")
    p.add_argument("--map", help="Write the carrier map JSON here")
    p.set_defaults(func=_subdivide_command)

    p = subparsers.add_parser("flip", parents=[common], help="Bistellar flip")
    p.add_argument("file")
    p.add_argument("s", help="Face to remove, e.g. 0-1")
    p.add_argument("t", help="Face to insert, e.g. 3-4")
    p.set_defaults(func=_flip_command)

    p = subparsers.add_parser("lift", parents=[common], help="Lift a matching through a starring")
    p.add_argument("file")
    p.add_argument("matching", help="Matching certificate JSON")
    p.add_argument("face", help="Face to star, e.g. 0-1")
    p.add_argument("--complex-out", help="Write the subdivided complex here")
    p.set_defaults(func=_lift_command)

    p = subparsers.add_parser("glue", parents=[common], help="Glue two complexes")
    p.add_argument("spec", help="Gluing spec JSON")
    p.set_defaults(func=_glue_command)

    p = subparsers.add_parser("compose", parents=[common], help="Compose boundary-critical matchings")
    p.add_argument("spec", help="Gluing spec JSON")
    p.add_argument("f", help="Certificate on the left side")
    p.add_argument("g", help="Certificate on the right side")
    p.add_argument("h", help="Certificate on the identified region, in left labels")
    p.add_argument("--complex-out", help="Write the glued complex here")
    p.set_defaults(func=_compose_command)

    p = subparsers.add_parser("build-lc", parents=[common], help="Replay a local construction")
    p.add_argument("trace", help="Trace JSON")
    p.set_defaults(func=_build_lc_command)

    p = subparsers.add_parser("pipeline", parents=[common], help="Certify a handle decomposition")
    p.add_argument("decomposition", help="Handle decomposition JSON")
    p.add_argument("--complex-out", help="Write the assembled complex here")
    p.set_defaults(func=_pipeline_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SearchInconclusive as e:
        logger.error("inconclusive: %s", e)
        return EXIT_INCONCLUSIVE
    except (MorsecraftError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_ERROR
    except ValueError as e:
        logger.error("invalid value: %s", e)
        return EXIT_ERROR
