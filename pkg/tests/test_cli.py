"""
Unit tests for the command-line front end, configuration and artifacts.
"""

import json
import tempfile
import unittest
from pathlib import Path

from pydantic import ValidationError

from morsecraft import (
    CollapseCertificate,
    MatchingCertificate,
    MatchingError,
    MorseMatching,
    RunConfig,
    SubdivisionRecord,
    collapses_to_vertex,
    complex_hash,
    derived_subdivision,
    glue,
    optimal_morse,
)
from morsecraft.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, main
from morsecraft.fixtures import ball, octahedron, simplex, sphere
from morsecraft.formats import (
    dump_json,
    load_decomposition,
    load_gluing_spec,
    parse_facets,
    read_facets,
    write_facets,
)


class CLITestCase(unittest.TestCase):
    """Temporary directory with a few facet files."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)
        write_facets(simplex(2), self.dir / "triangle.facets")
        write_facets(sphere(2), self.dir / "tetra.facets")
        write_facets(ball(2), self.dir / "disk.facets")

    def tearDown(self):
        self._tmp.cleanup()

    def run_cli(self, *args):
        out = self.dir / "out.txt"
        code = main([*args, "-o", str(out)])
        text = out.read_text(encoding="utf-8") if out.exists() else ""
        return code, text

    def path(self, name):
        return str(self.dir / name)


class TestCommands(CLITestCase):
    """Tests for the CLI commands."""

    def test_info(self):
        """Test the info report."""
        code, text = self.run_cli("info", self.path("tetra.facets"))
        report = json.loads(text)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report["f_vector"], [4, 6, 4])
        self.assertEqual(report["betti_gf2"], [1, 0, 1])
        self.assertTrue(report["manifold"]["closed"])
        self.assertTrue(report["orientable"])

    def test_morse_exhaustive(self):
        """Test an exhaustive Morse matching."""
        code, text = self.run_cli("morse", self.path("tetra.facets"), "--exhaustive")
        certificate = MatchingCertificate.model_validate_json(text)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(certificate.morse_vector, [1, 0, 1])
        self.assertTrue(certificate.metadata["exact"])
        certificate.to_matching(sphere(2))

    def test_morse_random(self):
        """Test the random heuristic with a fixed seed."""
        first = self.run_cli("morse", self.path("tetra.facets"), "--seed", "7")
        second = self.run_cli("morse", self.path("tetra.facets"), "--seed", "7")
        self.assertEqual(first, second)

    def test_subdivide(self):
        """Test derived subdivision with a carrier map."""
        code, text = self.run_cli(
            "subdivide", self.path("triangle.facets"), "--derived", "1", "--map", self.path("map.json")
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(text.splitlines()), 6)
        record = json.loads((self.dir / "map.json").read_text(encoding="utf-8"))
        self.assertEqual(record["target_hash"], complex_hash(derived_subdivision(simplex(2))[0]))

    def test_star(self):
        """Test stellar subdivision of one face."""
        code, text = self.run_cli("subdivide", self.path("triangle.facets"), "--star", "0-1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(text, "0 2 3\n1 2 3\n")

    def test_collapse(self):
        """Test collapsing onto the least vertex."""
        code, text = self.run_cli("collapse", self.path("triangle.facets"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(json.loads(text)["steps"]), 3)

    def test_collapse_impossible(self):
        """Test that a proved negative answer exits cleanly."""
        code, text = self.run_cli("collapse", self.path("tetra.facets"))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(text)["verdict"], "impossible")

    def test_collapse_inconclusive(self):
        """Test the inconclusive exit code."""
        code, text = self.run_cli("collapse", self.path("disk.facets"), "--budget", "1")
        self.assertEqual(code, EXIT_INCONCLUSIVE)
        self.assertEqual(json.loads(text)["verdict"], "inconclusive")

    def test_cdepth(self):
        """Test the collapse depth report."""
        code, text = self.run_cli("cdepth", self.path("tetra.facets"))
        report = json.loads(text)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report["k"], 2)
        self.assertTrue(report["exact"])

    def test_lc(self):
        """Test the LC certificate command."""
        code, text = self.run_cli("lc", self.path("tetra.facets"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(text)["metadata"]["lc"])

    def test_flip(self):
        """Test a vertex-inserting flip."""
        code, text = self.run_cli("flip", self.path("tetra.facets"), "0-1-2", "5")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(text.splitlines()), 6)

    def test_lift(self):
        """Test lifting a stored certificate through a starring."""
        V = optimal_morse(sphere(2)).matching
        (self.dir / "v.json").write_text(dump_json(MatchingCertificate.from_matching(V)), encoding="utf-8")
        code, text = self.run_cli(
            "lift", self.path("tetra.facets"), self.path("v.json"), "0-1",
            "--complex-out", self.path("lifted.facets"),
        )
        self.assertEqual(code, EXIT_OK)
        certificate = MatchingCertificate.model_validate_json(text)
        self.assertEqual(certificate.morse_vector, [1, 0, 1])
        certificate.to_matching(read_facets(self.dir / "lifted.facets"))

    def _write_json(self, name, value):
        (self.dir / name).write_text(json.dumps(value), encoding="utf-8")
        return self.path(name)

    def test_glue_and_compose(self):
        """Test gluing two disks and composing certificates."""
        spec = self._write_json(
            "spec.json", {"left": "disk.facets", "right": "disk.facets", "map": [[0, 0], [1, 1], [2, 2]]}
        )
        code, text = self.run_cli("glue", spec)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(text.splitlines()), 6)

        for name in ("f.json", "g.json"):
            code, _ = self.run_cli("morse", self.path("disk.facets"), "--boundary-critical")
            self.assertEqual(code, EXIT_OK)
            (self.dir / "out.txt").rename(self.dir / name)
        region = glue(load_gluing_spec(spec)).intersection.as_complex()
        h = MorseMatching(region, [((1,), (0, 1)), ((2,), (1, 2))], True)
        (self.dir / "h.json").write_text(dump_json(MatchingCertificate.from_matching(h)), encoding="utf-8")
        code, text = self.run_cli(
            "compose", spec, self.path("f.json"), self.path("g.json"), self.path("h.json")
        )
        self.assertEqual(code, EXIT_OK)
        certificate = MatchingCertificate.model_validate_json(text)
        self.assertEqual(certificate.metadata["expected_c_int"], certificate.c_int)

    def test_build_lc(self):
        """Test replaying a trace file."""
        write_facets(parse_facets("0 1 2\n0 2 3\n0 3 4\n"), self.dir / "fan.facets")
        trace = self._write_json("trace.json", {"tree": "fan.facets", "identify": [["0-1", "0-4"]]})
        code, text = self.run_cli("build-lc", trace)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(text, "0 1 2\n0 1 3\n0 2 3\n")

    def test_pipeline(self):
        """Test the handle pipeline from a decomposition file."""
        decomposition = self._write_json("handles.json", [
            {"complex": "disk.facets", "index": 0},
            {"complex": "disk.facets", "index": 2, "attach": {"map": [[0, 0], [1, 1], [2, 2]]}},
        ])
        self.assertEqual(load_decomposition(decomposition).expected_interior(), [1, 0, 1])
        code, text = self.run_cli("pipeline", decomposition)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(MatchingCertificate.model_validate_json(text).c_int, [1, 0, 1])


class TestExitCodes(CLITestCase):
    """Tests for error handling in the front end."""

    def test_missing_file(self):
        """Test that a missing file is an error."""
        code, _ = self.run_cli("info", self.path("nope.facets"))
        self.assertEqual(code, EXIT_ERROR)

    def test_malformed_file(self):
        """Test that a malformed facet file is an error."""
        (self.dir / "bad.facets").write_text("0 1\n1 two\n", encoding="utf-8")
        code, _ = self.run_cli("info", self.path("bad.facets"))
        self.assertEqual(code, EXIT_ERROR)

    def test_cdepth_needs_pseudomanifold(self):
        """Test that cdepth refuses a non-pseudomanifold."""
        (self.dir / "book.facets").write_text("0 1 2\n0 1 3\n0 1 4\n", encoding="utf-8")
        code, _ = self.run_cli("cdepth", self.path("book.facets"))
        self.assertEqual(code, EXIT_ERROR)

    def test_bad_flip(self):
        """Test that an invalid flip is an error."""
        code, _ = self.run_cli("flip", self.path("tetra.facets"), "0-1", "2-3")
        self.assertEqual(code, EXIT_ERROR)

    def test_zero_derived_rounds(self):
        """Test that zero derived rounds is an input error."""
        code, _ = self.run_cli("subdivide", self.path("tetra.facets"), "--derived", "0")
        self.assertEqual(code, EXIT_ERROR)

    def test_zero_restarts(self):
        """Test that a configuration rejected by validation is an input error."""
        code, _ = self.run_cli("morse", self.path("tetra.facets"), "--restarts", "0")
        self.assertEqual(code, EXIT_ERROR)


class TestRunConfig(unittest.TestCase):
    """Tests for run configuration."""

    def test_defaults(self):
        """Test the built-in defaults."""
        config = RunConfig()
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.budget, 1_000_000)
        self.assertEqual(config.max_derived_rounds, 3)

    def test_yaml_with_overrides(self):
        """Test that explicit values beat the file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.yaml"
            path.write_text("seed: 4\nbudget: 50\n", encoding="utf-8")
            config = RunConfig.from_yaml(str(path), {"seed": 9, "budget": None})
        self.assertEqual(config.seed, 9)
        self.assertEqual(config.budget, 50)

    def test_invalid_budget(self):
        """Test that a non-positive budget is refused."""
        with self.assertRaises(ValidationError):
            RunConfig(budget=0)

    def test_missing_file(self):
        """Test that a missing config file raises."""
        with self.assertRaises(FileNotFoundError):
            RunConfig.from_yaml("/nonexistent/run.yaml")


class TestArtifacts(unittest.TestCase):
    """Tests for certificates and records."""

    def test_certificate_round_trip(self):
        """Test rebuilding a matching from its certificate."""
        V = optimal_morse(octahedron()).matching
        certificate = MatchingCertificate.model_validate_json(dump_json(MatchingCertificate.from_matching(V)))
        self.assertEqual(certificate.to_matching(octahedron()), V)

    def test_hash_mismatch(self):
        """Test that a certificate refuses another complex."""
        certificate = MatchingCertificate.from_matching(optimal_morse(sphere(2)).matching)
        with self.assertRaises(MatchingError):
            certificate.to_matching(octahedron())

    def test_tampered_counts(self):
        """Test that edited critical faces are detected."""
        certificate = MatchingCertificate.from_matching(optimal_morse(sphere(2)).matching)
        certificate.critical = certificate.critical[1:]
        with self.assertRaises(MatchingError):
            certificate.to_matching(sphere(2))

    def test_collapse_certificate(self):
        """Test replaying a stored collapse."""
        K = simplex(3)
        sequence = collapses_to_vertex(K).sequence
        certificate = CollapseCertificate.from_sequence(K, sequence)
        self.assertEqual(certificate.verify(K).steps, sequence.steps)
        with self.assertRaises(MatchingError):
            certificate.verify(simplex(2))

    def test_subdivision_record(self):
        """Test the carrier record of a derived subdivision."""
        target, m = derived_subdivision(simplex(1))
        record = SubdivisionRecord.from_map(m)
        self.assertEqual(record.target_hash, complex_hash(target))
        self.assertEqual(record.carrier["0-1"], ["0-2", "1-2", "2"])


if __name__ == "__main__":
    unittest.main()
