# Copyright (c) 2026 The SBF Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command-line contract: exit codes, report schema, determinism, sweep CSV."""

import csv
import io
import json

import jsonschema
import pytest

from conftest import DATA, SCHEMA

ROW1 = ("A bell is ringing while birds are chirping in the background",
        "A bell rings while people talk in a courtyard")


def validate(doc):
    jsonschema.validate(doc, SCHEMA)


def without_timestamp(doc):
    doc = json.loads(json.dumps(doc))
    doc["manifest"].pop("timestamp")
    return doc


def test_score_explains_false_alarm_and_miss(cli):
    out = cli("score", *ROW1, check=0).stdout
    fp = out.index("False Positives:")
    fn = out.index("False Negatives:")
    assert "Bird" in out[fp:fn]
    assert "Conversation" in out[fn:]
    assert "P=0.500 R=0.500 F=0.500" in out


def test_identical_captions(cli):
    out = cli("score", ROW1[1], ROW1[1], check=0).stdout
    assert "no false alarms, no misses" in out
    assert "F=1.000" in out


def test_score_json_validates(cli):
    doc = json.loads(cli("--json", "score", *ROW1, check=0).stdout)
    validate(doc)
    item = doc["items"][0]
    assert [t["name"] for t in item["fp"]] == ["Bird"]
    assert item["tp"][0]["matched_name"] == "Bell"
    assert doc["manifest"]["command"] == "score"
    assert {i["role"] for i in doc["manifest"]["inputs"]} == {"ontology", "fixture"}


def test_score_multi_reference(cli):
    doc = json.loads(cli("--json", "--aggregation", "max", "score", ROW1[0], ROW1[1], ROW1[0], check=0).stdout)
    validate(doc)
    assert len(doc["items"]) == 2
    assert doc["summary"]["fscore"] == 1.0


def test_out_file(cli, tmp_path):
    target = tmp_path / "report.json"
    cli("--out", target, "score", *ROW1, check=0)
    validate(json.loads(target.read_text()))


def test_benchmark_fixture_accuracy(cli):
    doc = json.loads(cli("benchmark", DATA / "pairs.csv", check=0).stdout)
    validate(doc)
    for cat in ("HC", "HI", "HM", "MM"):
        assert doc["summary"]["categories"][cat]["accuracy"] == 1.0
    assert doc["summary"]["overall"]["total"] == 4


def test_corpus_is_deterministic(cli):
    a = json.loads(cli("eval-corpus", DATA / "corpus.jsonl", check=0).stdout)
    b = json.loads(cli("--workers", "4", "eval-corpus", DATA / "corpus.jsonl", check=0).stdout)
    validate(a)
    assert a["summary"]["fscore"] == pytest.approx(0.75)
    a2 = json.loads(cli("eval-corpus", DATA / "corpus.jsonl", check=0).stdout)
    assert json.dumps(without_timestamp(a), sort_keys=True) == json.dumps(without_timestamp(a2), sort_keys=True)
    assert a["items"] == b["items"]
    assert a["summary"] == b["summary"]


def test_corpus_csv_matches_jsonl(cli):
    a = json.loads(cli("eval-corpus", DATA / "corpus.jsonl", check=0).stdout)
    b = json.loads(cli("eval-corpus", DATA / "corpus.csv", check=0).stdout)
    assert a["items"] == b["items"]


def test_corpus_failures_are_reported(cli, tmp_path):
    data = tmp_path / "c.jsonl"
    data.write_text(
        json.dumps({"item_id": "ok", "candidate": ROW1[0], "references": [ROW1[1]]}) + "\n" +
        json.dumps({"item_id": "bad", "candidate": "A cat meows", "references": [ROW1[1]]}) + "\n")
    proc = cli("eval-corpus", data, check=0)
    doc = json.loads(proc.stdout)
    validate(doc)
    assert doc["summary"]["items_failed"] == 1
    assert doc["summary"]["has_failures"] is True
    assert "1 of 2" in proc.stderr or "bad" in proc.stderr


def test_sweep_csv_rows(cli, tmp_path):
    target = tmp_path / "sweep.csv"
    proc = cli("--json", "sweep", DATA / "pairs.csv", "--tag-t-values", "0.4,0.45,0.5", "--csv", target, check=0)
    doc = json.loads(proc.stdout)
    validate(doc)
    assert [r["tag_t"] for r in doc["sweep"]] == [0.4, 0.45, 0.5]
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    for cat in ("HC", "HI", "HM", "MM"):
        assert len([r for r in rows if r["category"] == cat]) == 3
    assert {r["tag_t"] for r in rows} == {"0.4", "0.45", "0.5"}


@pytest.mark.parametrize("args", [
    ["--tag-t", "1.5", "score", "a", "b"],
    ["--backend", "gpu", "score", "a", "b"],
    ["--aggregation", "median", "score", "a", "b"],
    ["score"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(cli, args):
    assert cli(*args).returncode == 2


def test_config_errors_exit_2(cli, tmp_path):
    cfg = tmp_path / "sbf.toml"
    cfg.write_text("unknown_key = 1\n")
    assert cli("--config", cfg, "score", "a", "b").returncode == 2
    assert cli("--backend", "remote", "score", "a", "b", fixture=False).returncode == 2


def test_runtime_errors_exit_1(cli):
    assert cli("score", "A cat meows", "a bell rings").returncode == 1
    proc = cli("--backend", "fixture", "--fixture", DATA / "example_fixture.json",
               "--ontology", "/nonexistent.json", "score", "a", "b", fixture=False)
    assert proc.returncode == 1
    proc = cli("--backend", "remote", "--endpoint", "http://127.0.0.1:9", "--ontology",
               DATA / "mini_ontology.json", "score", "a bell", "a bell", fixture=False)
    assert proc.returncode == 1
    assert "127.0.0.1:9" in proc.stderr


def test_config_file_overridden_by_flags(cli, tmp_path):
    cfg = tmp_path / "sbf.toml"
    cfg.write_text('tag_t = 0.7\nsim-t = 0.5\naggregation = "max"\n')
    doc = json.loads(cli("--config", cfg, "--json", "score", *ROW1, check=0).stdout)
    assert doc["config"]["tag_t"] == 0.7
    assert doc["config"]["sim_t"] == 0.5
    assert doc["config"]["aggregation"] == "max"
    doc = json.loads(cli("--config", cfg, "--tag-t", "0.3", "--json", "score", *ROW1, check=0).stdout)
    assert doc["config"]["tag_t"] == 0.3


def test_cache_commands(cli, tmp_path):
    env = {"SBF_CACHE_DIR": str(tmp_path / "cache"), "PATH": "/usr/bin:/bin"}
    cli("score", *ROW1, check=0, env=env)
    info = cli("cache", "info", check=0, env=env, fixture=False).stdout
    assert "entries: " in info and "entries: 0" not in info
    cli("cache", "clear", check=0, env=env, fixture=False)
    assert "entries: 0" in cli("cache", "info", check=0, env=env, fixture=False).stdout


def test_local_model_files_in_manifest(cli):
    proc = cli("--backend", "local", "--model-dir", DATA / "tiny_bert", "--ontology", DATA / "mini_ontology.json",
               "--tag-t", "0.01", "--sim-t", "0.01", "--rep-t", "0.99", "--json", "score", ROW1[0], ROW1[1],
               fixture=False, check=0)
    doc = json.loads(proc.stdout)
    validate(doc)
    roles = {i["role"] for i in doc["manifest"]["inputs"]}
    assert {"model:config.json", "model:vocab.txt", "model:model.safetensors"} <= roles
