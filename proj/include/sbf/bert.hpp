// Copyright (c) 2026 The SBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SBF_BERT_HPP_
#define SBF_BERT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sbf/embedding.hpp"

namespace sbf {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major, converted to f32 on load

  std::int64_t numel() const;
};

// Reader for the safetensors container: u64 header length, JSON header,
// raw little-endian buffer. Accepts F32, F16, BF16 and F64 tensors.
class SafeTensors {
 public:
  static SafeTensors load(const std::filesystem::path& path);
  static SafeTensors parse(std::string_view bytes);

  bool contains(const std::string& name) const { return tensors_.count(name) > 0; }
  const Tensor& at(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, Tensor> tensors_;
};

// BERT uncased/cased WordPiece pipeline: text cleanup, whitespace and
// punctuation split, optional lowercasing with accent stripping, then
// greedy longest-match subwords.
class WordPieceTokenizer {
 public:
  WordPieceTokenizer(std::vector<std::string> vocab, bool lowercase);
  static WordPieceTokenizer load(const std::filesystem::path& vocab_txt, bool lowercase);

  std::vector<std::string> basic_tokenize(std::string_view text) const;
  std::vector<std::string> wordpiece(const std::string& word) const;
  // [CLS] pieces... [SEP], truncated so the total is at most max_length.
  std::vector<std::int32_t> encode(std::string_view text, std::size_t max_length) const;

  std::size_t vocab_size() const { return vocab_.size(); }
  std::int32_t id(const std::string& token) const;

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::int32_t> ids_;
  bool lowercase_;
  std::int32_t unk_id_, cls_id_, sep_id_;
};

struct BertConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden_size = 0;
  std::size_t num_layers = 0;
  std::size_t num_heads = 0;
  std::size_t intermediate_size = 0;
  std::size_t max_position = 512;
  std::size_t type_vocab_size = 2;
  double layer_norm_eps = 1e-12;
  std::string hidden_act = "gelu";

  static BertConfig from_json_file(const std::filesystem::path& path);
};

enum class Pooling { kMean, kCls };

// Sentence encoder: BERT forward pass followed by token pooling. Inference
// is const and thread-safe.
class BertEncoder {
 public:
  // `dir` holds config.json, model.safetensors and vocab.txt, plus optional
  // sentence-transformers files (sentence_bert_config.json,
  // 1_Pooling/config.json, tokenizer_config.json).
  static std::unique_ptr<BertEncoder> load(const std::filesystem::path& dir);

  std::vector<float> encode(std::string_view text) const;
  // Hidden states for explicit ids; used to check the forward pass alone.
  std::vector<float> encode_ids(std::span<const std::int32_t> ids) const;

  const BertConfig& config() const { return config_; }
  const WordPieceTokenizer& tokenizer() const { return *tokenizer_; }
  std::size_t dim() const { return config_.hidden_size; }
  std::size_t max_seq_length() const { return max_seq_length_; }

  ~BertEncoder();

 private:
  struct Weights;
  BertEncoder() = default;

  BertConfig config_;
  std::unique_ptr<WordPieceTokenizer> tokenizer_;
  std::unique_ptr<Weights> weights_;
  std::size_t max_seq_length_ = 512;
  Pooling pooling_ = Pooling::kMean;
};

class LocalModelBackend : public EmbeddingBackend {
 public:
  LocalModelBackend(const std::filesystem::path& model_dir, std::string model_id);

  std::string identity() const override { return "local:" + model_id_; }
  std::string cache_namespace() const override { return model_id_; }
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;

  const BertEncoder& encoder() const { return *encoder_; }

 private:
  std::unique_ptr<BertEncoder> encoder_;
  std::string model_id_;
};

// Finds a model directory: `explicit_dir` if given; `model_id` itself when it
// names a directory; $SBF_MODEL_DIR/<id>; the Hugging Face hub cache
// (sentence-transformers/<id>). Throws ModelLoadError listing what was tried.
std::filesystem::path resolve_model_dir(const std::string& model_id,
                                        const std::string& explicit_dir = "");

}  // namespace sbf

#endif  // SBF_BERT_HPP_
