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


"""Similarity-based F-score (SBF) for audio captions.

Thin wrapper over the C++ core: phrase extraction, tag grounding, soft
set matching and the pairwise human-judgment benchmark.
"""

import json

from ._sbf import (
    ConfigError,
    SbfError,
    __version__,
    cos_sim,
    extract_phrases,
    pos_tag,
    prf,
)
from ._sbf import _Scorer
from ._sbf import load_ontology as _load_ontology

__all__ = [
    "ConfigError",
    "SbfError",
    "Scorer",
    "cos_sim",
    "extract_phrases",
    "load_ontology",
    "pos_tag",
    "prf",
    "__version__",
]


def load_ontology(path):
    """Returns the ontology classes at ``path`` as a list of dicts."""
    return _load_ontology(str(path))


class Scorer:
    """Scores candidate captions against references over an ontology.

    Keyword arguments mirror the command-line flags: ``backend`` is one of
    ``"local"``, ``"remote"`` or ``"fixture"``; thresholds default to
    tag_t=0.4, sim_t=rep_t=0.45.
    """

    def __init__(self, ontology, **kwargs):
        self._impl = _Scorer(str(ontology), **kwargs)

    @property
    def universe_size(self):
        return self._impl.universe_size

    def score(self, candidate, reference):
        return json.loads(self._impl.score(candidate, reference))

    def score_multi(self, candidate, references, aggregation="mean"):
        return json.loads(self._impl.score_multi(candidate, list(references), aggregation))

    def benchmark(self, pairs_path, aggregation="mean", workers=1):
        return json.loads(self._impl.benchmark(str(pairs_path), aggregation, workers))

    def evaluate_corpus(self, path, aggregation="mean", workers=1):
        return json.loads(self._impl.evaluate_corpus(str(path), aggregation, workers))
