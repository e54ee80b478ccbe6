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

#include "sbf/bert.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "sbf/errors.hpp"

namespace sbf {

namespace fs = std::filesystem;
using nlohmann::json;
using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---- safetensors ----

std::int64_t Tensor::numel() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace {

float half_to_float(std::uint16_t h) {
  std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000) << 16;
  std::uint32_t exp = (h >> 10) & 0x1f;
  std::uint32_t mant = h & 0x3ff;
  std::uint32_t bits;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      // subnormal: renormalize
      exp = 127 - 15 + 1;
      while ((mant & 0x400) == 0) {
        mant <<= 1;
        --exp;
      }
      mant &= 0x3ff;
      bits = sign | (exp << 23) | (mant << 13);
    }
  } else if (exp == 0x1f) {
    bits = sign | 0x7f800000u | (mant << 13);
  } else {
    bits = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

float bf16_to_float(std::uint16_t h) {
  std::uint32_t bits = static_cast<std::uint32_t>(h) << 16;
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

template <typename T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof v);  // x86/ARM little-endian hosts
  return v;
}

}  // namespace

SafeTensors SafeTensors::parse(std::string_view bytes) {
  if (bytes.size() < 8) throw ModelLoadError("safetensors: file too short");
  auto header_len = read_le<std::uint64_t>(bytes.data());
  if (header_len > bytes.size() - 8) throw ModelLoadError("safetensors: header length out of range");
  json header;
  try {
    header = json::parse(bytes.substr(8, header_len));
  } catch (const json::parse_error& e) {
    throw ModelLoadError(std::string("safetensors: bad header: ") + e.what());
  }
  std::string_view buffer = bytes.substr(8 + header_len);

  SafeTensors st;
  for (auto it = header.begin(); it != header.end(); ++it) {
    if (it.key() == "__metadata__") continue;
    const auto& meta = it.value();
    Tensor t;
    t.shape = meta.at("shape").get<std::vector<std::int64_t>>();
    auto offsets = meta.at("data_offsets").get<std::vector<std::uint64_t>>();
    std::string dtype = meta.at("dtype").get<std::string>();
    if (offsets.size() != 2 || offsets[0] > offsets[1] || offsets[1] > buffer.size()) {
      throw ModelLoadError("safetensors: bad data_offsets for " + it.key());
    }
    const char* p = buffer.data() + offsets[0];
    std::size_t nbytes = offsets[1] - offsets[0];
    auto n = static_cast<std::size_t>(t.numel());
    std::size_t width = dtype == "F32" ? 4 : dtype == "F64" ? 8 : (dtype == "F16" || dtype == "BF16") ? 2 : 0;
    if (width == 0) throw ModelLoadError("safetensors: unsupported dtype " + dtype + " for " + it.key());
    if (nbytes != n * width) throw ModelLoadError("safetensors: size mismatch for " + it.key());
    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const char* q = p + i * width;
      if (dtype == "F32") {
        t.data[i] = read_le<float>(q);
      } else if (dtype == "F64") {
        t.data[i] = static_cast<float>(read_le<double>(q));
      } else if (dtype == "F16") {
        t.data[i] = half_to_float(read_le<std::uint16_t>(q));
      } else {
        t.data[i] = bf16_to_float(read_le<std::uint16_t>(q));
      }
    }
    st.tensors_.emplace(it.key(), std::move(t));
  }
  return st;
}

SafeTensors SafeTensors::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(bytes);
}

const Tensor& SafeTensors::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ModelLoadError("safetensors: missing tensor " + name);
  return it->second;
}

std::vector<std::string> SafeTensors::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tensors_) out.push_back(k);
  return out;
}

// ---- tokenizer ----

namespace {

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1f;
      len = 2;
    } else if ((c >> 4) == 0xe) {
      cp = c & 0x0f;
      len = 3;
    } else if ((c >> 3) == 0x1e) {
      cp = c & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

std::string utf8_encode(std::span<const char32_t> cps) {
  std::string out;
  for (char32_t cp : cps) utf8_append(out, cp);
  return out;
}

bool is_ws(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_control(char32_t c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  return c < 0x20 || (c >= 0x7F && c <= 0x9F) || c == 0xAD || (c >= 0x200B && c <= 0x200F) ||
         (c >= 0x2060 && c <= 0x2064) || c == 0xFEFF;
}

bool is_punct(char32_t c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB ||
         c == 0xBF || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0xFF01 && c <= 0xFF0F);
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2B73F) ||
         (c >= 0x2B740 && c <= 0x2B81F) || (c >= 0x2B820 && c <= 0x2CEAF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

bool is_combining_mark(char32_t c) {
  return (c >= 0x300 && c <= 0x36F) || (c >= 0x1AB0 && c <= 0x1AFF) ||
         (c >= 0x1DC0 && c <= 0x1DFF) || (c >= 0x20D0 && c <= 0x20FF) ||
         (c >= 0xFE20 && c <= 0xFE2F);
}

char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c == 0x130) return 'i';
  if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
  if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

// Base letter of a precomposed Latin character, or 0 if it has none.
char32_t accent_base(char32_t c) {
  static constexpr std::string_view kLatin1 =  // U+00E0..U+00FF
      "aaaaaa-ceeeeiiii-nooooo--uuuuy-y";
  static constexpr std::string_view kExtA =  // U+0100..U+017F
      "aaaaaaccccccccdd--eeeeeeeeeegggggggghh--iiiiiiiii---jjkk-llllll----nnnnnn---oooooo--rrrrrrsssssssstttt--uuuuuuuuuuuuwwyyyzzzzzz-";
  char b = 0;
  if (c >= 0xE0 && c <= 0xFF) b = kLatin1[c - 0xE0];
  if (c >= 0x100 && c <= 0x17F) b = kExtA[c - 0x100];
  return (b == 0 || b == '-') ? 0 : static_cast<char32_t>(b);
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab, bool lowercase)
    : vocab_(std::move(vocab)), lowercase_(lowercase) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    ids_.emplace(vocab_[i], static_cast<std::int32_t>(i));
  }
  auto need = [&](const char* tok) {
    auto it = ids_.find(tok);
    if (it == ids_.end()) throw ModelLoadError(std::string("vocabulary lacks ") + tok);
    return it->second;
  };
  unk_id_ = need("[UNK]");
  cls_id_ = need("[CLS]");
  sep_id_ = need("[SEP]");
}

WordPieceTokenizer WordPieceTokenizer::load(const fs::path& vocab_txt, bool lowercase) {
  std::ifstream in(vocab_txt);
  if (!in) throw ModelLoadError("cannot open " + vocab_txt.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return WordPieceTokenizer(std::move(vocab), lowercase);
}

std::int32_t WordPieceTokenizer::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? unk_id_ : it->second;
}

std::vector<std::string> WordPieceTokenizer::basic_tokenize(std::string_view text) const {
  std::vector<std::vector<char32_t>> words;
  std::vector<char32_t> current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  };
  for (char32_t c : utf8_decode(text)) {
    if (c == 0 || c == 0xFFFD || is_control(c)) continue;
    if (is_ws(c)) {
      flush();
      continue;
    }
    if (is_cjk(c)) {
      flush();
      words.push_back({c});
      continue;
    }
    current.push_back(c);
  }
  flush();

  std::vector<std::string> out;
  for (auto& w : words) {
    std::vector<char32_t> norm;
    if (lowercase_) {
      for (char32_t c : w) {
        char32_t l = to_lower(c);
        if (is_combining_mark(l)) continue;
        char32_t base = accent_base(l);
        norm.push_back(base ? base : l);
      }
    } else {
      norm = w;
    }
    std::vector<char32_t> piece;
    for (char32_t c : norm) {
      if (is_punct(c)) {
        if (!piece.empty()) out.push_back(utf8_encode(piece));
        piece.clear();
        out.push_back(utf8_encode(std::span<const char32_t>(&c, 1)));
      } else {
        piece.push_back(c);
      }
    }
    if (!piece.empty()) out.push_back(utf8_encode(piece));
  }
  return out;
}

std::vector<std::string> WordPieceTokenizer::wordpiece(const std::string& word) const {
  constexpr std::size_t kMaxChars = 100;
  auto cps = utf8_decode(word);
  if (cps.size() > kMaxChars) return {"[UNK]"};
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::string match;
    while (start < end) {
      std::string sub = utf8_encode(std::span<const char32_t>(cps.data() + start, end - start));
      if (start > 0) sub = "##" + sub;
      if (ids_.count(sub)) {
        match = std::move(sub);
        break;
      }
      --end;
    }
    if (match.empty()) return {"[UNK]"};
    pieces.push_back(std::move(match));
    start = end;
  }
  return pieces;
}

std::vector<std::int32_t> WordPieceTokenizer::encode(std::string_view text,
                                                     std::size_t max_length) const {
  std::vector<std::int32_t> ids{cls_id_};
  const std::size_t budget = max_length >= 2 ? max_length - 2 : 0;
  for (const auto& word : basic_tokenize(text)) {
    for (const auto& piece : wordpiece(word)) {
      if (ids.size() - 1 >= budget) break;
      ids.push_back(id(piece));
    }
    if (ids.size() - 1 >= budget) break;
  }
  ids.push_back(sep_id_);
  return ids;
}

// ---- model ----

BertConfig BertConfig::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelLoadError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelLoadError(path.string() + ": " + e.what());
  }
  if (j.contains("model_type") && j["model_type"] != "bert") {
    throw ModelLoadError("unsupported model_type " + j["model_type"].dump() + " (only bert)");
  }
  BertConfig c;
  try {
    c.vocab_size = j.at("vocab_size").get<std::size_t>();
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.num_layers = j.at("num_hidden_layers").get<std::size_t>();
    c.num_heads = j.at("num_attention_heads").get<std::size_t>();
    c.intermediate_size = j.at("intermediate_size").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ModelLoadError(path.string() + ": " + e.what());
  }
  c.max_position = j.value("max_position_embeddings", std::size_t{512});
  c.type_vocab_size = j.value("type_vocab_size", std::size_t{2});
  c.layer_norm_eps = j.value("layer_norm_eps", 1e-12);
  c.hidden_act = j.value("hidden_act", std::string("gelu"));
  if (c.num_heads == 0 || c.hidden_size % c.num_heads != 0) {
    throw ModelLoadError("hidden_size must be divisible by num_attention_heads");
  }
  return c;
}

struct BertEncoder::Weights {
  struct Linear {
    RowMat w;  // out x in
    Eigen::RowVectorXf b;
  };
  struct Norm {
    Eigen::RowVectorXf gamma, beta;
  };
  struct Layer {
    Linear query, key, value, attn_out;
    Norm attn_norm;
    Linear intermediate, output;
    Norm out_norm;
  };
  RowMat word, position, token_type;
  Norm emb_norm;
  std::vector<Layer> layers;
};

namespace {

RowMat to_matrix(const Tensor& t, std::size_t rows, std::size_t cols, const std::string& name) {
  if (t.shape.size() != 2 || static_cast<std::size_t>(t.shape[0]) != rows ||
      static_cast<std::size_t>(t.shape[1]) != cols) {
    throw ModelLoadError("tensor " + name + " has unexpected shape");
  }
  return Eigen::Map<const RowMat>(t.data.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

Eigen::RowVectorXf to_vector(const Tensor& t, std::size_t n, const std::string& name) {
  if (t.shape.size() != 1 || static_cast<std::size_t>(t.shape[0]) != n) {
    throw ModelLoadError("tensor " + name + " has unexpected shape");
  }
  return Eigen::Map<const Eigen::RowVectorXf>(t.data.data(), static_cast<Eigen::Index>(n));
}

void layer_norm(RowMat& x, const Eigen::RowVectorXf& gamma, const Eigen::RowVectorXf& beta,
                float eps) {
  const auto n = static_cast<float>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    float mean = row.sum() / n;
    row.array() -= mean;
    float var = row.squaredNorm() / n;
    row *= 1.0f / std::sqrt(var + eps);
    row = row.cwiseProduct(gamma) + beta;
  }
}

void activate(RowMat& x, const std::string& act) {
  if (act == "gelu") {
    x = x.unaryExpr([](float v) { return 0.5f * v * (1.0f + std::erf(v * 0.70710678118654752f)); });
  } else if (act == "gelu_new" || act == "gelu_pytorch_tanh" || act == "gelu_fast") {
    x = x.unaryExpr([](float v) {
      return 0.5f * v * (1.0f + std::tanh(0.7978845608028654f * (v + 0.044715f * v * v * v)));
    });
  } else if (act == "relu") {
    x = x.cwiseMax(0.0f);
  } else {
    throw ModelLoadError("unsupported hidden_act " + act);
  }
}

}  // namespace

BertEncoder::~BertEncoder() = default;

std::unique_ptr<BertEncoder> BertEncoder::load(const fs::path& dir) {
  auto enc = std::unique_ptr<BertEncoder>(new BertEncoder());
  enc->config_ = BertConfig::from_json_file(dir / "config.json");
  const auto& cfg = enc->config_;

  bool lowercase = true;
  if (fs::exists(dir / "tokenizer_config.json")) {
    std::ifstream in(dir / "tokenizer_config.json");
    auto j = json::parse(in, nullptr, false);
    if (j.is_object()) lowercase = j.value("do_lower_case", true);
  }
  enc->tokenizer_ = std::make_unique<WordPieceTokenizer>(
      WordPieceTokenizer::load(dir / "vocab.txt", lowercase));

  enc->max_seq_length_ = std::min<std::size_t>(512, cfg.max_position);
  if (fs::exists(dir / "sentence_bert_config.json")) {
    std::ifstream in(dir / "sentence_bert_config.json");
    auto j = json::parse(in, nullptr, false);
    if (j.is_object() && j.contains("max_seq_length")) {
      enc->max_seq_length_ = std::min(j["max_seq_length"].get<std::size_t>(), cfg.max_position);
    }
  }
  if (fs::exists(dir / "1_Pooling" / "config.json")) {
    std::ifstream in(dir / "1_Pooling" / "config.json");
    auto j = json::parse(in, nullptr, false);
    if (j.is_object() && j.value("pooling_mode_cls_token", false)) enc->pooling_ = Pooling::kCls;
  }

  if (!fs::exists(dir / "model.safetensors")) {
    throw ModelLoadError(dir.string() + " has no model.safetensors (PyTorch .bin weights are not supported)");
  }
  auto st = SafeTensors::load(dir / "model.safetensors");
  std::string prefix = st.contains("bert.embeddings.word_embeddings.weight") ? "bert." : "";
  auto get = [&](const std::string& name) -> const Tensor& {
    std::string full = prefix + name;
    if (!st.contains(full) && name.ends_with("LayerNorm.weight")) {
      full = prefix + name.substr(0, name.size() - 6) + "gamma";
    } else if (!st.contains(full) && name.ends_with("LayerNorm.bias")) {
      full = prefix + name.substr(0, name.size() - 4) + "beta";
    }
    return st.at(full);
  };
  const std::size_t h = cfg.hidden_size;
  auto linear = [&](const std::string& base, std::size_t out, std::size_t in) {
    return Weights::Linear{to_matrix(get(base + ".weight"), out, in, base),
                           to_vector(get(base + ".bias"), out, base)};
  };
  auto norm = [&](const std::string& base, std::size_t n) {
    return Weights::Norm{to_vector(get(base + ".weight"), n, base),
                         to_vector(get(base + ".bias"), n, base)};
  };

  auto w = std::make_unique<Weights>();
  w->word = to_matrix(get("embeddings.word_embeddings.weight"), cfg.vocab_size, h, "word_embeddings");
  w->position = to_matrix(get("embeddings.position_embeddings.weight"), cfg.max_position, h,
                          "position_embeddings");
  w->token_type = to_matrix(get("embeddings.token_type_embeddings.weight"), cfg.type_vocab_size, h,
                            "token_type_embeddings");
  w->emb_norm = norm("embeddings.LayerNorm", h);
  for (std::size_t i = 0; i < cfg.num_layers; ++i) {
    std::string base = "encoder.layer." + std::to_string(i) + ".";
    Weights::Layer layer;
    layer.query = linear(base + "attention.self.query", h, h);
    layer.key = linear(base + "attention.self.key", h, h);
    layer.value = linear(base + "attention.self.value", h, h);
    layer.attn_out = linear(base + "attention.output.dense", h, h);
    layer.attn_norm = norm(base + "attention.output.LayerNorm", h);
    layer.intermediate = linear(base + "intermediate.dense", cfg.intermediate_size, h);
    layer.output = linear(base + "output.dense", h, cfg.intermediate_size);
    layer.out_norm = norm(base + "output.LayerNorm", h);
    w->layers.push_back(std::move(layer));
  }
  if (enc->tokenizer_->vocab_size() > cfg.vocab_size) {
    throw ModelLoadError("vocab.txt is larger than the embedding table");
  }
  enc->weights_ = std::move(w);
  return enc;
}

std::vector<float> BertEncoder::encode_ids(std::span<const std::int32_t> ids) const {
  const auto& w = *weights_;
  const auto len = static_cast<Eigen::Index>(ids.size());
  const auto h = static_cast<Eigen::Index>(config_.hidden_size);
  const auto heads = static_cast<Eigen::Index>(config_.num_heads);
  const Eigen::Index head_dim = h / heads;
  const float eps = static_cast<float>(config_.layer_norm_eps);
  if (ids.empty() || ids.size() > config_.max_position) {
    throw Error("input length " + std::to_string(ids.size()) + " outside model limits");
  }

  RowMat x(len, h);
  for (Eigen::Index t = 0; t < len; ++t) {
    auto id = ids[static_cast<std::size_t>(t)];
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
      throw Error("token id out of range");
    }
    x.row(t) = w.word.row(id) + w.position.row(t) + w.token_type.row(0);
  }
  layer_norm(x, w.emb_norm.gamma, w.emb_norm.beta, eps);

  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  RowMat context(len, h);
  for (const auto& layer : w.layers) {
    RowMat q = (x * layer.query.w.transpose()).rowwise() + layer.query.b;
    RowMat k = (x * layer.key.w.transpose()).rowwise() + layer.key.b;
    RowMat v = (x * layer.value.w.transpose()).rowwise() + layer.value.b;
    for (Eigen::Index hd = 0; hd < heads; ++hd) {
      auto cols = Eigen::seqN(hd * head_dim, head_dim);
      RowMat scores = (q(Eigen::all, cols) * k(Eigen::all, cols).transpose()) * scale;
      for (Eigen::Index r = 0; r < len; ++r) {
        auto row = scores.row(r);
        float m = row.maxCoeff();
        row = (row.array() - m).exp();
        row /= row.sum();
      }
      context(Eigen::all, cols) = scores * v(Eigen::all, cols);
    }
    RowMat attn = (context * layer.attn_out.w.transpose()).rowwise() + layer.attn_out.b;
    x += attn;
    layer_norm(x, layer.attn_norm.gamma, layer.attn_norm.beta, eps);

    RowMat inter = (x * layer.intermediate.w.transpose()).rowwise() + layer.intermediate.b;
    activate(inter, config_.hidden_act);
    RowMat out = (inter * layer.output.w.transpose()).rowwise() + layer.output.b;
    x += out;
    layer_norm(x, layer.out_norm.gamma, layer.out_norm.beta, eps);
  }

  Eigen::RowVectorXf pooled =
      pooling_ == Pooling::kCls ? Eigen::RowVectorXf(x.row(0)) : Eigen::RowVectorXf(x.colwise().mean());
  return std::vector<float>(pooled.data(), pooled.data() + pooled.size());
}

std::vector<float> BertEncoder::encode(std::string_view text) const {
  auto ids = tokenizer_->encode(text, max_seq_length_);
  return encode_ids(ids);
}

LocalModelBackend::LocalModelBackend(const fs::path& model_dir, std::string model_id)
    : encoder_(BertEncoder::load(model_dir)), model_id_(std::move(model_id)) {}

std::vector<std::vector<double>> LocalModelBackend::embed(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto v = encoder_->encode(t);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

fs::path resolve_model_dir(const std::string& model_id, const std::string& explicit_dir) {
  std::vector<fs::path> tried;
  auto usable = [&](const fs::path& p) {
    tried.push_back(p);
    std::error_code ec;
    return fs::exists(p / "config.json", ec) && fs::exists(p / "vocab.txt", ec);
  };
  if (!explicit_dir.empty()) {
    if (usable(explicit_dir)) return explicit_dir;
    throw ModelLoadError("model directory " + explicit_dir + " lacks config.json/vocab.txt");
  }
  if (!model_id.empty() && usable(model_id)) return model_id;

  std::string short_id = model_id.substr(model_id.find('/') == std::string::npos ? 0 : model_id.find('/') + 1);
  std::string org = model_id.find('/') == std::string::npos ? "sentence-transformers"
                                                            : model_id.substr(0, model_id.find('/'));
  if (const char* env = std::getenv("SBF_MODEL_DIR"); env && *env) {
    if (usable(fs::path(env) / short_id)) return fs::path(env) / short_id;
    if (usable(fs::path(env))) return fs::path(env);
  }
  std::vector<fs::path> hubs;
  if (const char* hf = std::getenv("HF_HOME"); hf && *hf) hubs.push_back(fs::path(hf) / "hub");
  if (const char* home = std::getenv("HOME"); home && *home) {
    hubs.push_back(fs::path(home) / ".cache" / "huggingface" / "hub");
  }
  for (const auto& hub : hubs) {
    fs::path snapshots = hub / ("models--" + org + "--" + short_id) / "snapshots";
    std::error_code ec;
    if (!fs::is_directory(snapshots, ec)) {
      tried.push_back(snapshots);
      continue;
    }
    for (const auto& snap : fs::directory_iterator(snapshots)) {
      if (usable(snap.path())) return snap.path();
    }
  }
  std::string msg = "cannot locate model '" + model_id + "'; tried:";
  for (const auto& p : tried) msg += " " + p.string();
  throw ModelLoadError(msg + " (set SBF_MODEL_DIR or --model-dir)");
}

}  // namespace sbf
