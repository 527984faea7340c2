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

// Probability-based editing: integrate a token w into a prototype by keeping
// a prefix (ending at i) and a suffix (starting at j) of the padded
// prototype and placing w between them. The chosen (i, j) maximizes
//
//   p_pre(w | prefix context) * p_suc(w | suffix context) / e^(j - i)
//
// among operations whose unpenalized product exceeds epsilon^2, i.e. w was
// observed next to at least one of the two contexts.
//
// Positions are 1-based over the padded prototype of length L = l + 2n.
// i ranges over [n, L - n] so the prefix context is a full n-token window;
// j ranges over [i + 1, L - n + 1] so the suffix context is one too.
// j == i + 1 inserts; larger spans replace prototype tokens i+1 .. j-1.

#ifndef XPROB_EDITOR_HPP_
#define XPROB_EDITOR_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xprob/ngram.hpp"
#include "xprob/text.hpp"

namespace xprob {

struct EditOperation {
  std::size_t i = 0;
  std::size_t j = 0;
  double score = 0.0;
  double raw_product = 0.0;

  bool is_insertion() const { return j == i + 1; }
  friend bool operator==(const EditOperation&, const EditOperation&) = default;
};

enum class EditMode { kAny, kInsertionOnly };

namespace internal {

inline void CheckEditToken(const std::string& w) {
  if (w.empty()) throw ContractViolation("edit token must be non-empty");
  if (w == kPadToken) throw ContractViolation("<pad> cannot be edited in");
}

}  // namespace internal

// Ties on score resolve to the smaller span j - i, then the smaller i.
inline std::optional<EditOperation> best_edit(
    const NgramIndex& index, const std::string& w, const TokenSeq& prototype,
    EditMode mode = EditMode::kAny) {
  if (prototype.empty()) throw ContractViolation("best_edit: empty prototype");
  internal::CheckEditToken(w);

  const auto n = static_cast<std::size_t>(index.n());
  const std::vector<NgramIndex::TokenId> padded = index.padded_ids(prototype);
  const std::size_t len = padded.size();
  const NgramIndex::TokenId wid = index.id(w);
  const std::span<const NgramIndex::TokenId> view(padded);

  // pre[i] for 1-based i in [n, len - n]; suc[j] for j in [n + 1, len - n + 1].
  std::vector<double> pre(len + 2, 0.0), suc(len + 2, 0.0);
  for (std::size_t i = n; i <= len - n; ++i) {
    pre[i] = index.p_pre(wid, view.subspan(i - n, n));
  }
  for (std::size_t j = n + 1; j <= len - n + 1; ++j) {
    suc[j] = index.p_suc(wid, view.subspan(j - 1, n));
  }

  const double eps = index.epsilon();
  const double threshold = eps * eps;
  const std::size_t max_span = mode == EditMode::kInsertionOnly
                                   ? 1
                                   : (len - n + 1) - n;
  std::optional<EditOperation> best;
  for (std::size_t span = 1; span <= max_span; ++span) {
    const double penalty = std::exp(static_cast<double>(span));
    for (std::size_t i = n; i + span <= len - n + 1; ++i) {
      const std::size_t j = i + span;
      const double raw = pre[i] * suc[j];
      if (!(raw > threshold)) continue;
      const double score = raw / penalty;
      if (!best || score > best->score) {
        best = EditOperation{i, j, score, raw};
      }
    }
  }
  return best;
}

// Convenience for callers that only want insertions (j == i + 1).
inline std::optional<EditOperation> best_insertion(const NgramIndex& index,
                                                   const std::string& w,
                                                   const TokenSeq& text) {
  return best_edit(index, w, text, EditMode::kInsertionOnly);
}

// Returns padded[1..i] + [w] + padded[j..L] with padding removed.
inline TokenSeq apply_edit(const TokenSeq& prototype, const std::string& w,
                           const EditOperation& op, int n) {
  internal::CheckEditToken(w);
  const auto pad = static_cast<std::size_t>(n);
  const std::size_t len = prototype.size() + 2 * pad;
  if (op.i < pad || op.j <= op.i || op.j > len - pad + 1) {
    throw ContractViolation("apply_edit: edit indices out of range");
  }
  // Padded position p (1-based) maps to prototype index p - pad - 1.
  TokenSeq out;
  out.reserve(prototype.size() + 1);
  for (std::size_t p = pad + 1; p <= op.i; ++p) {
    out.push_back(prototype[p - pad - 1]);
  }
  out.push_back(w);
  for (std::size_t p = std::max(op.j, pad + 1); p <= len - pad; ++p) {
    out.push_back(prototype[p - pad - 1]);
  }
  return out;
}

}  // namespace xprob

#endif  // XPROB_EDITOR_HPP_
