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

// Word-dropping neighborhoods: every position is kept independently with
// probability 1/2; masks that keep nothing or everything are resampled.
// The explicand itself is always a member.

#ifndef XPROB_BASELINE_HPP_
#define XPROB_BASELINE_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "xprob/blackbox.hpp"
#include "xprob/corpus.hpp"
#include "xprob/neighborhood.hpp"
#include "xprob/text.hpp"

namespace xprob {

class PerturbationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using DropMask = std::vector<bool>;

inline TokenSeq apply_mask(const TokenSeq& tokens, const DropMask& keep) {
  TokenSeq out;
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (keep[p]) out.push_back(tokens[p]);
  }
  return out;
}

// Unclassified variants, explicand first, in sampling order.
inline std::vector<TokenSeq> sample_drop_variants(const TokenSeq& explicand,
                                                  std::size_t count,
                                                  std::uint64_t seed) {
  const std::size_t len = explicand.size();
  if (len < 2) {
    throw PerturbationError("word dropping needs at least 2 tokens, got " +
                            std::to_string(len));
  }
  if (count < 1) throw ContractViolation("count must be >= 1");

  std::vector<TokenSeq> out{explicand};
  std::unordered_set<TokenSeq, TokenSeqHash> seen{explicand};
  // Proper masks: neither empty nor all-keep.
  const bool bounded = len < 63;
  const std::uint64_t proper_masks =
      bounded ? (std::uint64_t{1} << len) - 2 : UINT64_MAX;
  std::unordered_set<std::uint64_t> masks_tried;

  std::mt19937_64 rng(seed);
  std::uint64_t bits = 0;
  int bits_left = 0;
  auto next_bit = [&]() -> bool {
    if (bits_left == 0) {
      bits = rng();
      bits_left = 64;
    }
    const bool b = bits & 1u;
    bits >>= 1;
    --bits_left;
    return b;
  };

  DropMask keep(len);
  while (out.size() < count) {
    if (bounded && masks_tried.size() >= proper_masks) break;
    std::size_t kept = 0;
    std::uint64_t code = 0;
    for (std::size_t p = 0; p < len; ++p) {
      keep[p] = next_bit();
      kept += keep[p];
      if (bounded && keep[p]) code |= std::uint64_t{1} << p;
    }
    if (kept == 0 || kept == len) continue;
    if (bounded) masks_tried.insert(code);
    TokenSeq variant = apply_mask(explicand, keep);
    if (seen.insert(variant).second) out.push_back(std::move(variant));
  }
  return out;
}

inline Neighborhood perturb_by_dropping(const TokenSeq& explicand,
                                        std::size_t count, std::uint64_t seed,
                                        Classifier& classifier,
                                        const TfidfModel& tfidf) {
  auto variants = sample_drop_variants(explicand, count, seed);
  const SparseVector x = tfidf.vectorize(explicand);
  const auto preds = classifier.classify_batch(variants);
  Neighborhood out;
  out.explicand = explicand;
  out.explicand_prediction = preds.front();
  out.target_class = preds.front().predicted_class();
  out.rounds = 1;
  out.members.reserve(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const double d = cosine_distance(x, tfidf.vectorize(variants[i]));
    out.members.push_back(
        Member{std::move(variants[i]), preds[i], d, i == 0 ? 0 : 1});
  }
  return out;
}

}  // namespace xprob

#endif  // XPROB_BASELINE_HPP_
