"""CLI exit codes and JSON schema conformance of run outputs."""
import csv
import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema
from referencing import Registry, Resource

CLI = pathlib.Path(sys.argv.pop(1)).resolve()
ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
SCHEMAS = ROOT / "schemas"


def load(path):
    with open(path) as f:
        return json.load(f)


def registry():
    resources = []
    for p in SCHEMAS.glob("*.schema.json"):
        doc = load(p)
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


REGISTRY = registry()


def validator(name):
    schema = load(SCHEMAS / f"{name}.schema.json")
    cls = jsonschema.validators.validator_for(schema)
    cls.check_schema(schema)
    return cls(schema, registry=REGISTRY, format_checker=cls.FORMAT_CHECKER)


def run(*args):
    return subprocess.run([str(CLI), *map(str, args)], capture_output=True, text=True)


class ExitCodes(unittest.TestCase):
    def test_valid_catalog_group(self):
        r = run("validate", "heisenberg3", "--samples", 200)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(json.loads(r.stdout)["status"], "pass")

    def test_broken_algebra_is_a_violation(self):
        r = run("validate", DATA / "broken_algebra.json")
        self.assertEqual(r.returncode, 1)
        out = json.loads(r.stdout)
        self.assertEqual(out["axioms"], "fail")
        self.assertEqual(out["violations"][0]["axiom"], "antisymmetry")
        self.assertEqual(out["violations"][0]["witness"], ["(1,1)", "(1,2)"])

    def test_abelian_lemmas_not_applicable(self):
        r = run("verify-lemmas", DATA / "abelian_algebra.json", "--max-N", 4)
        self.assertEqual(r.returncode, 0, r.stderr)
        statuses = {(x["check"], x["status"]) for x in json.loads(r.stdout)["reports"]}
        self.assertIn(("nonvanishing", "not_applicable"), statuses)

    def test_too_few_samples_is_a_config_error(self):
        r = run("run", DATA / "too_few_samples.json", "--output", tempfile.mkdtemp())
        self.assertEqual(r.returncode, 2)
        self.assertIn("samples", r.stderr)

    def test_unknown_group_is_a_usage_error(self):
        self.assertEqual(run("validate", "nosuchgroup").returncode, 2)

    def test_lattice_measure_fails_cramer(self):
        r = run("cramer", DATA / "two_atom_measure.json", "--group", "heisenberg3")
        self.assertEqual(r.returncode, 1)

    def test_tiny_budget_is_a_resource_error(self):
        r = run("verify-lemmas", "free2step3", "--max-N", 6, "--budget", 10)
        self.assertEqual(r.returncode, 3)

    def test_emitted_law_algebra_conforms(self):
        r = run("emit-law", "ut4")
        self.assertEqual(r.returncode, 0, r.stderr)
        validator("algebra").validate(json.loads(r.stdout)["algebra"])


class Schemas(unittest.TestCase):
    def test_data_documents(self):
        for name in ("broken_algebra", "abelian_algebra"):
            validator("algebra").validate(load(DATA / f"{name}.json"))
        validator("measure").validate(load(DATA / "two_atom_measure.json"))

    def test_shipped_configs(self):
        v = validator("config")
        for p in sorted((ROOT / "configs").rglob("*.json")):
            with self.subTest(config=p.name):
                v.validate(load(p))

    def test_schema_rejects_small_samples(self):
        with self.assertRaises(jsonschema.ValidationError):
            validator("config").validate(load(DATA / "too_few_samples.json"))

    def test_smoke_run_outputs(self):
        out = pathlib.Path(tempfile.mkdtemp())
        r = run("run", ROOT / "configs" / "smoke.json", "--output", out, "--quiet", "--threads", 2)
        self.assertEqual(r.returncode, 0, r.stderr)
        validator("report").validate(load(out / "report.json"))
        manifest = load(out / "manifest.json")
        validator("manifest").validate(manifest)
        self.assertEqual(manifest["status"], "complete")
        row_v = validator("results_row")
        with open(out / "results.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertGreater(len(rows), 0)
        for row in rows:
            for key in ("N", "samples", "seed"):
                row[key] = int(row[key])
            for key in ("mean", "std_error"):
                row[key] = float(row[key])
            row_v.validate(row)


if __name__ == "__main__":
    unittest.main(verbosity=2)
