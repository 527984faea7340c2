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

// Fixtures and independent reference implementations shared by the unit
// tests and the acceptance binary. Nothing here calls into NgramIndex or the
// editor: probabilities are recomputed by scanning documents directly.

#ifndef XPROB_TESTS_TEST_SUPPORT_HPP_
#define XPROB_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xprob/xprob.hpp"

namespace xprob::testing {

inline Corpus HandCorpus() {
  Corpus c;
  for (const char* d : {"the food was great", "the food was bad",
                        "great service", "bad service",
                        "the service was great"}) {
    c.documents.push_back(tokenize(d));
  }
  return c;
}

inline TokenSeq Pad(const TokenSeq& doc, int n) {
  TokenSeq out(static_cast<std::size_t>(n), kPadToken);
  out.insert(out.end(), doc.begin(), doc.end());
  out.insert(out.end(), static_cast<std::size_t>(n), kPadToken);
  return out;
}

inline bool ContainsRun(const TokenSeq& hay, const TokenSeq& needle) {
  if (needle.size() > hay.size()) return false;
  for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      match = hay[s + k] == needle[k];
    }
    if (match) return true;
  }
  return false;
}

// Number of padded documents containing `seq` as a contiguous run.
inline std::size_t ScanDf(const Corpus& c, int n, const TokenSeq& seq) {
  std::size_t df = 0;
  for (const auto& d : c.documents) df += ContainsRun(Pad(d, n), seq) ? 1 : 0;
  return df;
}

inline double ScanRatio(const Corpus& c, int n, const TokenSeq& num,
                        const TokenSeq& den) {
  const double eps = 1.0 / static_cast<double>(c.size() + 1);
  const std::size_t a = ScanDf(c, n, num), b = ScanDf(c, n, den);
  if (a == 0 || b == 0) return eps;
  return static_cast<double>(a) / static_cast<double>(b);
}

inline double ScanPre(const Corpus& c, int n, const std::string& w,
                      const TokenSeq& ctx) {
  TokenSeq num = ctx;
  num.push_back(w);
  return ScanRatio(c, n, num, ctx);
}

inline double ScanSuc(const Corpus& c, int n, const std::string& w,
                      const TokenSeq& ctx) {
  TokenSeq num{w};
  num.insert(num.end(), ctx.begin(), ctx.end());
  return ScanRatio(c, n, num, ctx);
}

struct BruteEdit {
  std::size_t i = 0, j = 0;
  double score = 0.0;
};

// Enumerates every (i, j) over the padded prototype with document-scan
// probabilities. Returns the highest score; nullopt when nothing is valid.
inline std::optional<BruteEdit> BruteForceBestEdit(const Corpus& c, int n,
                                                   const std::string& w,
                                                   const TokenSeq& proto) {
  const TokenSeq padded = Pad(proto, n);
  const std::size_t len = padded.size();
  const auto un = static_cast<std::size_t>(n);
  const double eps = 1.0 / static_cast<double>(c.size() + 1);
  std::optional<BruteEdit> best;
  for (std::size_t i = un; i <= len - un; ++i) {
    const TokenSeq pre_ctx(padded.begin() + static_cast<long>(i - un),
                           padded.begin() + static_cast<long>(i));
    const double pre = ScanPre(c, n, w, pre_ctx);
    for (std::size_t j = i + 1; j <= len - un + 1; ++j) {
      const TokenSeq suc_ctx(padded.begin() + static_cast<long>(j - 1),
                             padded.begin() + static_cast<long>(j - 1 + un));
      const double raw = pre * ScanSuc(c, n, w, suc_ctx);
      if (!(raw > eps * eps)) continue;
      const double score = raw / std::exp(static_cast<double>(j - i));
      if (!best || score > best->score) best = BruteEdit{i, j, score};
    }
  }
  return best;
}

// Deterministic classifier driven by a caller-supplied class-1 probability.
class FunctionClassifier final : public Classifier {
 public:
  explicit FunctionClassifier(std::function<double(const TokenSeq&)> p1)
      : p1_(std::move(p1)) {}
  int class_count() const override { return 2; }
  std::vector<Prediction> classify_batch(
      std::span<const TokenSeq> texts) override {
    std::vector<Prediction> out;
    for (const auto& t : texts) {
      const double p = p1_(t);
      out.push_back(Prediction{{1.0 - p, p}});
    }
    calls_ += texts.size();
    return out;
  }
  std::string descriptor() const override { return "test:function"; }
  std::size_t calls() const { return calls_; }

 private:
  std::function<double(const TokenSeq&)> p1_;
  std::size_t calls_ = 0;
};

// Class 1 when "great" is present and "bad" is not; otherwise class 0.
inline std::shared_ptr<FunctionClassifier> KeywordClassifier() {
  return std::make_shared<FunctionClassifier>([](const TokenSeq& t) {
    const bool good = contains(t, "great"), bad = contains(t, "bad");
    if (good && !bad) return 0.9;
    if (bad && !good) return 0.1;
    return 0.5 - 1e-3;
  });
}

inline std::filesystem::path SourceDir() { return XPROB_SOURCE_DIR; }

inline std::filesystem::path TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "xprob_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline void WriteFile(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Random corpus over a small vocabulary, so contexts repeat often.
inline Corpus RandomCorpus(std::mt19937_64& rng, std::size_t docs,
                           const std::vector<std::string>& vocab) {
  Corpus c;
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t len = 1 + rng() % 8;
    TokenSeq doc;
    for (std::size_t k = 0; k < len; ++k) doc.push_back(vocab[rng() % vocab.size()]);
    c.documents.push_back(doc);
  }
  return c;
}

}  // namespace xprob::testing

#endif  // XPROB_TESTS_TEST_SUPPORT_HPP_
