// Copyright 2026 The Authors.
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

// Document-frequency index over contiguous subsequences of a padded corpus,
// and the count-ratio estimators of a token given its preceding or
// succeeding n-token context.
//
// Every document is padded with n <pad> tokens on each side before
// indexing, so boundary contexts carry real counts. A subsequence is counted
// at most once per document. Conditional estimates are ratios of document
// counts (not token-level language-model probabilities); a zero numerator or
// an unseen context yields the floor epsilon = 1 / (|corpus| + 1).

#ifndef XPROB_NGRAM_HPP_
#define XPROB_NGRAM_HPP_

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xprob/corpus.hpp"
#include "xprob/text.hpp"

namespace xprob {

class NgramIndex {
 public:
  using TokenId = std::uint32_t;
  static constexpr TokenId kPadId = 0;
  // Id of any token never seen in the corpus; matches no indexed key.
  static constexpr TokenId kUnknownId = std::numeric_limits<TokenId>::max();

  NgramIndex() = default;

  static NgramIndex build(const Corpus& corpus, int n) {
    if (corpus.empty()) throw ContractViolation("build_index: empty corpus");
    if (n < 1) throw ContractViolation("build_index: n must be >= 1");
    NgramIndex index;
    index.n_ = n;
    index.corpus_size_ = corpus.size();
    index.ids_.emplace(kPadToken, kPadId);
    index.tokens_.push_back(kPadToken);

    std::vector<TokenId> padded;
    std::vector<std::string> keys;
    for (const auto& doc : corpus.documents) {
      padded.assign(static_cast<std::size_t>(n), kPadId);
      for (const auto& tok : doc) padded.push_back(index.Intern(tok));
      padded.insert(padded.end(), static_cast<std::size_t>(n), kPadId);

      keys.clear();
      for (std::size_t len = 1; len <= static_cast<std::size_t>(n) + 1;
           ++len) {
        for (std::size_t s = 0; s + len <= padded.size(); ++s) {
          keys.push_back(Key(std::span(padded).subspan(s, len)));
        }
      }
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      for (auto& k : keys) ++index.df_[std::move(k)];
    }
    return index;
  }

  int n() const { return n_; }
  std::size_t corpus_size() const { return corpus_size_; }
  double epsilon() const {
    return 1.0 / (static_cast<double>(corpus_size_) + 1.0);
  }
  std::size_t entry_count() const { return df_.size(); }

  TokenId id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnknownId : it->second;
  }

  // Pads `tokens` with n <pad> ids on each side.
  std::vector<TokenId> padded_ids(const TokenSeq& tokens) const {
    std::vector<TokenId> out(static_cast<std::size_t>(n_), kPadId);
    for (const auto& t : tokens) out.push_back(id(t));
    out.insert(out.end(), static_cast<std::size_t>(n_), kPadId);
    return out;
  }

  // Number of padded documents containing `seq` contiguously.
  std::uint32_t df(std::span<const TokenId> seq) const {
    if (seq.empty() || seq.size() > static_cast<std::size_t>(n_) + 1) {
      throw ContractViolation("df: subsequence length must be in [1, n+1]");
    }
    for (TokenId t : seq) {
      if (t == kUnknownId) return 0;
    }
    auto it = df_.find(Key(seq));
    return it == df_.end() ? 0 : it->second;
  }

  std::uint32_t df(const TokenSeq& seq) const {
    std::vector<TokenId> ids;
    ids.reserve(seq.size());
    for (const auto& t : seq) ids.push_back(id(t));
    return df(std::span<const TokenId>(ids));
  }

  // df(context + [w]) / df(context), floored at epsilon.
  double p_pre(TokenId w, std::span<const TokenId> context) const {
    CheckContext(context);
    std::vector<TokenId> ext(context.begin(), context.end());
    ext.push_back(w);
    return Ratio(df(std::span<const TokenId>(ext)), df(context));
  }

  // df([w] + context) / df(context), floored at epsilon.
  double p_suc(TokenId w, std::span<const TokenId> context) const {
    CheckContext(context);
    std::vector<TokenId> ext;
    ext.reserve(context.size() + 1);
    ext.push_back(w);
    ext.insert(ext.end(), context.begin(), context.end());
    return Ratio(df(std::span<const TokenId>(ext)), df(context));
  }

  double p_pre(const std::string& w, const TokenSeq& context) const {
    const auto ids = ToIds(context);
    return p_pre(id(w), std::span<const TokenId>(ids));
  }
  double p_suc(const std::string& w, const TokenSeq& context) const {
    const auto ids = ToIds(context);
    return p_suc(id(w), std::span<const TokenId>(ids));
  }

  // Binary cache layout (little-endian):
  //   "XPNG1" | u32 n | u64 corpus_size | u64 entry_count |
  //   entry_count x ( u32 token_count | token_count x (u32 len | bytes) |
  //                   u32 df )
  // Entries are written in lexicographic token order.
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ngram cache: " + path);
    out.write("XPNG1", 5);
    WriteU32(out, static_cast<std::uint32_t>(n_));
    WriteU64(out, corpus_size_);
    std::vector<std::pair<TokenSeq, std::uint32_t>> entries;
    entries.reserve(df_.size());
    for (const auto& [key, count] : df_) {
      TokenSeq seq;
      for (std::size_t off = 0; off < key.size(); off += sizeof(TokenId)) {
        TokenId t;
        std::memcpy(&t, key.data() + off, sizeof(TokenId));
        seq.push_back(tokens_[t]);
      }
      entries.emplace_back(std::move(seq), count);
    }
    std::sort(entries.begin(), entries.end());
    WriteU64(out, entries.size());
    for (const auto& [seq, count] : entries) {
      WriteU32(out, static_cast<std::uint32_t>(seq.size()));
      for (const auto& tok : seq) {
        WriteU32(out, static_cast<std::uint32_t>(tok.size()));
        out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
      }
      WriteU32(out, count);
    }
    if (!out) throw std::runtime_error("write failure on ngram cache: " + path);
  }

  static NgramIndex load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ngram cache: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "XPNG1", 5) != 0) {
      throw std::runtime_error("not an XPNG1 ngram cache: " + path);
    }
    NgramIndex index;
    index.n_ = static_cast<int>(ReadU32(in));
    index.corpus_size_ = ReadU64(in);
    index.ids_.emplace(kPadToken, kPadId);
    index.tokens_.push_back(kPadToken);
    const std::uint64_t count = ReadU64(in);
    std::vector<TokenId> ids;
    for (std::uint64_t e = 0; e < count; ++e) {
      const std::uint32_t len = ReadU32(in);
      if (len == 0 || len > static_cast<std::uint32_t>(index.n_) + 1) {
        throw std::runtime_error("corrupt ngram cache entry: " + path);
      }
      ids.clear();
      for (std::uint32_t k = 0; k < len; ++k) {
        const std::uint32_t tlen = ReadU32(in);
        std::string tok(tlen, '\0');
        in.read(tok.data(), tlen);
        ids.push_back(index.Intern(tok));
      }
      index.df_[Key(std::span<const TokenId>(ids))] = ReadU32(in);
    }
    if (!in) throw std::runtime_error("truncated ngram cache: " + path);
    return index;
  }

 private:
  static std::string Key(std::span<const TokenId> seq) {
    std::string key(seq.size() * sizeof(TokenId), '\0');
    std::memcpy(key.data(), seq.data(), key.size());
    return key;
  }

  TokenId Intern(const std::string& token) {
    auto [it, inserted] =
        ids_.try_emplace(token, static_cast<TokenId>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  std::vector<TokenId> ToIds(const TokenSeq& seq) const {
    std::vector<TokenId> out;
    out.reserve(seq.size());
    for (const auto& t : seq) out.push_back(id(t));
    return out;
  }

  void CheckContext(std::span<const TokenId> context) const {
    if (context.size() != static_cast<std::size_t>(n_)) {
      throw ContractViolation("context length must equal n");
    }
  }

  double Ratio(std::uint32_t num, std::uint32_t den) const {
    if (num == 0 || den == 0) return epsilon();
    return static_cast<double>(num) / static_cast<double>(den);
  }

  static void WriteU32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  static void WriteU64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  static std::uint32_t ReadU32(std::istream& in) {
    unsigned char b[4] = {};
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  static std::uint64_t ReadU64(std::istream& in) {
    unsigned char b[8] = {};
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  int n_ = 1;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> df_;
};

inline NgramIndex build_index(const Corpus& corpus, int n) {
  return NgramIndex::build(corpus, n);
}

}  // namespace xprob

#endif  // XPROB_NGRAM_HPP_
