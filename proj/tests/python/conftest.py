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

"""Shared paths for the Python test-suite."""

import json
import os
import pathlib
import shutil
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
SCHEMA = json.loads((ROOT / "schemas" / "report.schema.json").read_text())


def _find_cli():
    env = os.environ.get("SBF_CLI")
    if env:
        return env
    for cand in (ROOT / "build" / "tools" / "sbf", shutil.which("sbf")):
        if cand and pathlib.Path(cand).exists():
            return str(cand)
    return None


@pytest.fixture(scope="session")
def cli():
    path = _find_cli()
    if path is None:
        pytest.skip("sbf executable not built")
    fixture_flags = ["--backend", "fixture", "--fixture", str(DATA / "example_fixture.json"),
                     "--ontology", str(DATA / "mini_ontology.json")]

    def run(*args, fixture=True, check=None, env=None):
        cmd = [path] + (fixture_flags if fixture else []) + [str(a) for a in args]
        proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
        if check is not None:
            assert proc.returncode == check, proc.stderr
        return proc

    return run
