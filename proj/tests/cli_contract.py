"""Black-box checks of the unimap executable: exit codes, schemas, manifests, determinism."""

import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

CLI = os.environ.get("UNIMAP_CLI", "unimap")
SCHEMAS = Path(os.environ.get("UNIMAP_SCHEMAS", Path(__file__).resolve().parent.parent / "schemas"))


def run(*args, env=None):
    merged = dict(os.environ, **(env or {}))
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=merged)


def validate(path, schema):
    with open(SCHEMAS / f"{schema}.schema.json") as f:
        s = json.load(f)
    with open(path) as f:
        doc = json.load(f)
    jsonschema.Draft202012Validator(s).validate(doc)
    return doc


class CliContract(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, obj):
        p = self.tmp / name
        p.write_text(json.dumps(obj))
        return p

    def assert_manifest(self, out_dir):
        m = validate(out_dir / "manifest.json", "manifest")
        written = sorted(
            str(p.relative_to(out_dir)) for p in out_dir.rglob("*") if p.is_file() and p.name != "manifest.json"
        )
        self.assertEqual(sorted(m["outputs"]), written)
        self.assertEqual(len(m["outputs"]), len(set(m["outputs"])))
        self.assertFalse(list(out_dir.rglob("*.tmp")))
        return m

    def test_model_info(self):
        r = run("model", "info", "cs133-f3-aux4", "--out", self.tmp / "m.json")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = validate(self.tmp / "m.json", "model_info")
        self.assertEqual(doc["dimension"], 8)
        self.assertEqual(doc["lie_algebra_dimension"], 64)

    def test_unknown_preset_is_validation_error(self):
        r = run("model", "info", "cs999")
        self.assertEqual(r.returncode, 2)
        self.assertIn("cs999", r.stderr)

    def test_optimize_state(self):
        out = self.tmp / "os"
        r = run("optimize-state", "--initial-ket", 7, "--target-ket", 0, "--seed", 3, "--out-dir", out, "--manifest")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = validate(out / "report.json", "search_report")
        self.assertTrue((out / doc["result"]["waveform_file"]).exists())
        self.assertEqual(self.assert_manifest(out)["seed"], 3)

    def test_exact_gate_fidelity(self):
        out = self.tmp / "bx"
        r = run("build-unitary", "--gate", "H", "--d", 7, "--exact-mappers", "--out-dir", out, "--manifest")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = validate(out / "report.json", "synthesis_report")
        self.assertGreaterEqual(doc["fidelity"], 1 - 1e-10)
        self.assertEqual(doc["searches"], 0)
        self.assert_manifest(out)

    def test_waveform_gate_on_spin(self):
        out = self.tmp / "bu"
        r = run("build-unitary", "--system", "spin:3", "--gate", "X", "--d", 4, "--out-dir", out, "--manifest")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = validate(out / "report.json", "synthesis_report")
        self.assertLessEqual(doc["searches"], 4)
        for step in doc["steps"]:
            if step["waveform_file"]:
                self.assertTrue((out / step["waveform_file"]).exists())
        self.assert_manifest(out)

    def test_subspace_map(self):
        spec = self.write("spec.json", {"dim": 8, "pairs": [{"name": "lift", "source": {"ket": 0}, "target": {"ket": 3}}]})
        out = self.tmp / "bs"
        r = run("build-subspace-map", "--spec", spec, "--out-dir", out, "--manifest")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = validate(out / "report.json", "synthesis_report")
        self.assertEqual(doc["searches"], 1)
        self.assertEqual(self.assert_manifest(out)["inputs"], [str(spec)])

    def test_malformed_spec_names_field(self):
        spec = self.write("bad.json", {"dim": 8, "pairs": [{"source": {"ket": 0}, "target": {"kat": 3}}]})
        r = run("build-subspace-map", "--spec", spec, "--out-dir", self.tmp / "x")
        self.assertEqual(r.returncode, 2)
        self.assertIn("pairs[0].target.kat", r.stderr)

    def test_malformed_config_names_field(self):
        cfg = self.write("cfg.json", {"search": {"restarts": "three"}})
        r = run("optimize-state", "--config", cfg, "--initial-ket", 7, "--target-ket", 0, "--out-dir", self.tmp / "x")
        self.assertEqual(r.returncode, 2)
        self.assertIn("search.restarts", r.stderr)

    def test_missing_subcommand(self):
        self.assertEqual(run().returncode, 2)

    def test_ec_sweep_rerun_is_byte_identical(self):
        outs = []
        for threads in ("1", "2"):
            out = self.tmp / f"ec{threads}"
            r = run("ec-sweep", "--preset", "ideal", "--samples", 200, "--seed", 7, "--out-dir", out, "--manifest",
                    env={"UNIMAP_THREADS": threads})
            self.assertEqual(r.returncode, 0, r.stderr)
            validate(out / "ec_meta.json", "ec_metadata")
            self.assert_manifest(out)
            outs.append(((out / "ec.csv").read_bytes(), (out / "ec_meta.json").read_bytes()))
        self.assertEqual(outs[0], outs[1])
        header = outs[0][0].decode().splitlines()[0]
        self.assertTrue(header.startswith("epsilon,"), header)

    def test_ec_sweep_bad_grid(self):
        r = run("ec-sweep", "--eps-min", 0.3, "--eps-max", 0.1, "--out-dir", self.tmp / "x")
        self.assertEqual(r.returncode, 2)
        self.assertIn("--eps-min", r.stderr)

    def test_verify_clifford(self):
        out = self.tmp / "c.json"
        r = run("verify-clifford", "--d", 3, "--out", out)
        self.assertEqual(r.returncode, 1)
        doc = validate(out, "clifford_report")
        failing = [c["relation"] for c in doc["checks"] if not c["holds"]]
        self.assertEqual(failing, ["S X S^dagger = X Z"])
        r = run("verify-clifford", "--d", 3, "--convention", "dimension-parity", "--out", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertTrue(validate(out, "clifford_report")["holds"])

    def test_wigner_csv(self):
        state = self.write("s.json", {"amplitudes": [1, 0, 0, 0, 0, 0, 0]})
        r = run("wigner", "--state", state, "--n-theta", 5, "--n-phi", 8)
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.splitlines()
        self.assertEqual(lines[0], "theta,phi,w")
        self.assertEqual(len(lines), 1 + 5 * 8)


if __name__ == "__main__":
    if len(sys.argv) > 1:
        CLI = sys.argv.pop(1)
    unittest.main()
