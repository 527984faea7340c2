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

#ifndef XPROB_TEXT_HPP_
#define XPROB_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xprob {

// A text is an ordered list of lowercase, whitespace-free tokens.
using TokenSeq = std::vector<std::string>;

// Boundary sentinel. tokenize() strips a leading '<', so no tokenized text
// can ever produce this string.
inline const std::string kPadToken = "<pad>";

// Thrown when a caller violates an operation's documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace internal {

// Decodes the UTF-8 sequence starting at `pos`; returns the code point and
// writes its byte length. Malformed bytes decode as themselves (length 1).
inline char32_t DecodeUtf8(std::string_view s, std::size_t pos,
                           std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      *len = 2;
      return (static_cast<char32_t>(b0 & 0x1F) << 6) | c1;
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) {
      *len = 3;
      return (static_cast<char32_t>(b0 & 0x0F) << 12) | (c1 << 6) | c2;
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      *len = 4;
      return (static_cast<char32_t>(b0 & 0x07) << 18) | (c1 << 12) |
             (c2 << 6) | c3;
    }
  }
  *len = 1;
  return b0;
}

inline bool IsUnicodeSpace(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline bool IsStrippablePunct(unsigned char c) {
  if (c == '\'') return false;
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
         (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

inline std::string CleanPiece(std::string piece) {
  std::size_t b = 0, e = piece.size();
  while (b < e && IsStrippablePunct(static_cast<unsigned char>(piece[b]))) ++b;
  while (e > b && IsStrippablePunct(static_cast<unsigned char>(piece[e - 1])))
    --e;
  piece = piece.substr(b, e - b);
  for (char& ch : piece) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return piece;
}

}  // namespace internal

// Lowercases (ASCII), splits on Unicode whitespace and strips leading and
// trailing ASCII punctuation other than apostrophes from every piece.
// Empty pieces are dropped.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::string piece;
  auto flush = [&] {
    if (!piece.empty()) {
      std::string cleaned = internal::CleanPiece(std::move(piece));
      if (!cleaned.empty()) out.push_back(std::move(cleaned));
      piece.clear();
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len = 1;
    const char32_t cp = internal::DecodeUtf8(text, pos, &len);
    if (internal::IsUnicodeSpace(cp)) {
      flush();
    } else {
      piece.append(text.substr(pos, len));
    }
    pos += len;
  }
  flush();
  return out;
}

inline std::string join(const TokenSeq& tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

inline bool contains(const TokenSeq& tokens, std::string_view token) {
  for (const auto& t : tokens) {
    if (t == token) return true;
  }
  return false;
}

// FNV-1a over the tokens with a unit separator; used for hash containers.
struct TokenSeqHash {
  std::size_t operator()(const TokenSeq& seq) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& t : seq) {
      for (unsigned char c : t) {
        h ^= c;
        h *= 1099511628211ULL;
      }
      h ^= 0x1F;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace xprob

#endif  // XPROB_TEXT_HPP_
