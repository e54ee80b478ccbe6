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

"""Builds a tiny randomly initialised BERT sentence encoder and freezes the
reference tokenisation and mean-pooled outputs computed by `transformers`.

Run from the repository root:  python3 tests/tools/make_tiny_bert.py
"""

import json
import pathlib
import string

import torch
from transformers import BertConfig, BertModel, BertTokenizer

ROOT = pathlib.Path(__file__).resolve().parents[2]
OUT = ROOT / "tests" / "data" / "tiny_bert"
MAX_SEQ = 24

WORDS = """a the bell is ringing rings while birds are chirping in background
people talk courtyard waves crash against shore and splash ocean roll out
from rain pour down street with traffic sound river flow water fall dog
bark cafe loud quiet""".split()
PIECES = ["##s", "##ing", "##ed", "##ly", "##es", "##y", "##er", "##ful"]

SENTENCES = [
    "A bell is ringing while birds are chirping in the background",
    "a bell rings",
    "Ocean waves roll in and out from the shore!",
    "Rain is pouring down the street, with traffic sounds.",
    "Café naïve RÉSUMÉ",
    "zzqx unknownword",
    "traffic",
    "dogs bark loudly and birds chirp and people talk in the courtyard while "
    "rain pours down the street and waves crash against the shore",
]


def build_vocab():
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += list(string.ascii_lowercase) + list(string.digits) + list("!,.?'-")
    vocab += ["##" + c for c in string.ascii_lowercase]
    vocab += WORDS + PIECES
    seen, out = set(), []
    for v in vocab:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "1_Pooling").mkdir(exist_ok=True)
    vocab = build_vocab()
    (OUT / "vocab.txt").write_text("\n".join(vocab) + "\n")
    torch.manual_seed(1234)
    config = BertConfig(vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
                        num_attention_heads=4, intermediate_size=64,
                        max_position_embeddings=64, hidden_act="gelu")
    model = BertModel(config, add_pooling_layer=False).eval()
    with torch.no_grad():
        for p in model.parameters():
            p.add_(0.05 * torch.randn_like(p))
    model.save_pretrained(OUT, safe_serialization=True)
    (OUT / "tokenizer_config.json").write_text(json.dumps({"do_lower_case": True}) + "\n")
    (OUT / "sentence_bert_config.json").write_text(
        json.dumps({"max_seq_length": MAX_SEQ, "do_lower_case": False}) + "\n")
    (OUT / "1_Pooling" / "config.json").write_text(json.dumps(
        {"word_embedding_dimension": 32, "pooling_mode_mean_tokens": True,
         "pooling_mode_cls_token": False}) + "\n")

    tok = BertTokenizer(str(OUT / "vocab.txt"), do_lower_case=True)
    cases = []
    for s in SENTENCES:
        enc = tok(s, truncation=True, max_length=MAX_SEQ, return_tensors="pt")
        with torch.no_grad():
            hidden = model(**enc).last_hidden_state[0]
        cases.append({
            "text": s,
            "tokens": tok.convert_ids_to_tokens(enc["input_ids"][0]),
            "ids": enc["input_ids"][0].tolist(),
            "embedding": hidden.mean(dim=0).tolist(),
        })
    (OUT / "expected.json").write_text(json.dumps({"max_seq_length": MAX_SEQ, "cases": cases}, indent=1) + "\n")


if __name__ == "__main__":
    main()
