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

#ifndef XPROB_EXPLANATION_HPP_
#define XPROB_EXPLANATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xprob/corpus.hpp"
#include "xprob/neighborhood.hpp"
#include "xprob/surrogate.hpp"
#include "xprob/text.hpp"

namespace xprob {

struct InstanceExplanation {
  std::vector<TokenSeq> factuals;
  std::vector<TokenSeq> counterfactuals;
  double lambda = 0.5;

  friend bool operator==(const InstanceExplanation&,
                         const InstanceExplanation&) = default;
};

namespace internal {

// Greedy closeness/diversity selection over one pool of neighborhood
// indices. Ties go to the earlier index.
inline std::vector<std::size_t> GreedyDiverse(
    const std::vector<std::size_t>& pool, const Neighborhood& hood,
    const std::vector<SparseVector>& directions, double lambda,
    std::size_t m) {
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(pool.size(), false);
  // Running sum of direction distances to the chosen set, per candidate.
  std::vector<double> diversity_sum(pool.size(), 0.0);
  while (chosen.size() < m && chosen.size() < pool.size()) {
    long best = -1;
    double best_score = 0.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (taken[c]) continue;
      const double closeness = 1.0 - hood.members[pool[c]].distance;
      const double diversity =
          chosen.empty() ? 0.0
                         : diversity_sum[c] / static_cast<double>(chosen.size());
      const double score = lambda * closeness + (1.0 - lambda) * diversity;
      if (best < 0 || score > best_score) {
        best = static_cast<long>(c);
        best_score = score;
      }
    }
    const auto pick = static_cast<std::size_t>(best);
    taken[pick] = true;
    chosen.push_back(pool[pick]);
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (!taken[c]) {
        diversity_sum[c] +=
            direction_distance(directions[pool[c]], directions[pool[pick]]);
      }
    }
  }
  return chosen;
}

}  // namespace internal

// Picks up to m factuals (same predicted class as the explicand) and m
// counterfactuals, each pool independently. Each step maximizes
//   lambda * (1 - d(x', x)) + (1 - lambda) * mean_{s chosen} d(dx', ds)
// where dx' = tfidf(x') - tfidf(x); the diversity term is 0 for the first
// pick.
inline InstanceExplanation select_instances(const Neighborhood& hood,
                                            const TfidfModel& tfidf,
                                            double lambda, std::size_t m) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ContractViolation("lambda must lie in [0, 1]");
  }
  if (m < 1) throw ContractViolation("m must be >= 1");
  const SparseVector x = tfidf.vectorize(hood.explicand);
  std::vector<SparseVector> directions;
  directions.reserve(hood.size());
  std::vector<std::size_t> factual_pool, counter_pool;
  for (std::size_t i = 0; i < hood.size(); ++i) {
    directions.push_back(subtract(tfidf.vectorize(hood.members[i].tokens), x));
    if (hood.members[i].prediction.predicted_class() == hood.target_class) {
      factual_pool.push_back(i);
    } else {
      counter_pool.push_back(i);
    }
  }
  InstanceExplanation out;
  out.lambda = lambda;
  for (std::size_t i :
       internal::GreedyDiverse(factual_pool, hood, directions, lambda, m)) {
    out.factuals.push_back(hood.members[i].tokens);
  }
  for (std::size_t i :
       internal::GreedyDiverse(counter_pool, hood, directions, lambda, m)) {
    out.counterfactuals.push_back(hood.members[i].tokens);
  }
  return out;
}

struct RunMetadata {
  std::string method = "xprob";
  int n = 1;
  std::size_t k = 80;
  std::size_t population = 400;
  double sigma = 1.0;
  double lambda = 0.5;
  double ridge = 1e-3;
  double threshold = 0.1;
  std::string corpus_sha256;
  std::string classifier;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

// Everything needed to re-render an explanation. Only the reported
// (above-threshold) extrinsic attributions are kept.
struct ExplanationReport {
  static constexpr int kSchemaVersion = 1;

  TokenSeq explicand;
  int predicted_class = 0;
  double confidence = 0.0;
  std::vector<IntrinsicAttribution> intrinsic;
  std::vector<ExtrinsicAttribution> extrinsic;
  InstanceExplanation instances;
  RunMetadata meta;

  friend bool operator==(const ExplanationReport&,
                         const ExplanationReport&) = default;
};

inline ExplanationReport make_report(const Neighborhood& hood,
                                     const AttributionVector& attr,
                                     InstanceExplanation instances,
                                     RunMetadata meta) {
  ExplanationReport r;
  r.explicand = hood.explicand;
  r.predicted_class = hood.target_class;
  r.confidence = hood.explicand_prediction.prob(hood.target_class);
  r.intrinsic = attr.intrinsic;
  r.extrinsic = attr.reported_extrinsic();
  r.instances = std::move(instances);
  r.meta = std::move(meta);
  return r;
}

inline nlohmann::ordered_json to_json(const ExplanationReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = ExplanationReport::kSchemaVersion;
  j["explicand"] = join(r.explicand);
  j["prediction"] = {{"class", r.predicted_class},
                     {"confidence", r.confidence}};
  auto intrinsic = nlohmann::ordered_json::array();
  for (const auto& a : r.intrinsic) {
    intrinsic.push_back(
        {{"position", a.position}, {"token", a.token}, {"score", a.score}});
  }
  auto extrinsic = nlohmann::ordered_json::array();
  for (const auto& a : r.extrinsic) {
    extrinsic.push_back({{"token", a.token}, {"score", a.score}});
  }
  j["attributions"] = {{"intrinsic", intrinsic}, {"extrinsic", extrinsic}};
  auto texts = [](const std::vector<TokenSeq>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : v) arr.push_back(join(t));
    return arr;
  };
  j["instances"] = {{"factuals", texts(r.instances.factuals)},
                    {"counterfactuals", texts(r.instances.counterfactuals)}};
  j["meta"] = {{"method", r.meta.method},
               {"n", r.meta.n},
               {"k", r.meta.k},
               {"population", r.meta.population},
               {"sigma", r.meta.sigma},
               {"lambda", r.meta.lambda},
               {"ridge", r.meta.ridge},
               {"threshold", r.meta.threshold},
               {"corpus_sha256", r.meta.corpus_sha256},
               {"classifier", r.meta.classifier}};
  return j;
}

inline ExplanationReport report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != ExplanationReport::kSchemaVersion) {
    throw std::runtime_error("unsupported report schema_version");
  }
  ExplanationReport r;
  r.explicand = tokenize(j.at("explicand").get<std::string>());
  r.predicted_class = j.at("prediction").at("class").get<int>();
  r.confidence = j.at("prediction").at("confidence").get<double>();
  for (const auto& a : j.at("attributions").at("intrinsic")) {
    r.intrinsic.push_back({a.at("position").get<std::size_t>(),
                           a.at("token").get<std::string>(),
                           a.at("score").get<double>()});
  }
  for (const auto& a : j.at("attributions").at("extrinsic")) {
    r.extrinsic.push_back(
        {a.at("token").get<std::string>(), a.at("score").get<double>()});
  }
  for (const auto& t : j.at("instances").at("factuals")) {
    r.instances.factuals.push_back(tokenize(t.get<std::string>()));
  }
  for (const auto& t : j.at("instances").at("counterfactuals")) {
    r.instances.counterfactuals.push_back(tokenize(t.get<std::string>()));
  }
  const auto& m = j.at("meta");
  r.meta.method = m.at("method").get<std::string>();
  r.meta.n = m.at("n").get<int>();
  r.meta.k = m.at("k").get<std::size_t>();
  r.meta.population = m.at("population").get<std::size_t>();
  r.meta.sigma = m.at("sigma").get<double>();
  r.meta.lambda = m.at("lambda").get<double>();
  r.instances.lambda = r.meta.lambda;
  r.meta.ridge = m.at("ridge").get<double>();
  r.meta.threshold = m.at("threshold").get<double>();
  r.meta.corpus_sha256 = m.at("corpus_sha256").get<std::string>();
  r.meta.classifier = m.at("classifier").get<std::string>();
  return r;
}

enum class ReportFormat { kJson, kHtml, kText };

inline ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "html") return ReportFormat::kHtml;
  if (name == "text") return ReportFormat::kText;
  throw std::invalid_argument("unknown report format: " + name);
}

namespace internal {

inline std::string HtmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Blue for evidence toward class 1, red toward class 0; opacity |score|
// capped at 1. Zero scores get no style at all.
inline std::string SaliencySpan(const std::string& token, double score,
                                int target_class) {
  const std::string text = HtmlEscape(token);
  if (score == 0.0) return "<span class=\"tok\">" + text + "</span>";
  const bool supports_target = score > 0.0;
  const bool toward_positive = (target_class == 1) == supports_target;
  const double alpha = std::min(1.0, std::fabs(score));
  const std::string rgb = toward_positive ? "0, 0, 255" : "255, 0, 0";
  return "<span class=\"tok\" title=\"" + Fixed(score, 4) +
         "\" style=\"background-color: rgba(" + rgb + ", " + Fixed(alpha, 3) +
         ")\">" + text + "</span>";
}

}  // namespace internal

inline std::string render_html(const ExplanationReport& r) {
  using internal::HtmlEscape;
  std::ostringstream o;
  o << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
    << "<title>Explanation</title>\n<style>\n"
    << "body { font-family: sans-serif; margin: 2em; }\n"
    << ".tok { padding: 1px 3px; margin: 0 1px; border-radius: 3px; }\n"
    << "table { border-collapse: collapse; }\n"
    << "td, th { padding: 2px 8px; text-align: left; }\n"
    << "</style>\n</head>\n<body>\n";
  o << "<h2>Prediction: class " << r.predicted_class << " (confidence "
    << internal::Fixed(r.confidence, 3) << ")</h2>\n";
  o << "<p class=\"explicand\">";
  for (const auto& a : r.intrinsic) {
    o << internal::SaliencySpan(a.token, a.score, r.predicted_class) << ' ';
  }
  o << "</p>\n";
  o << "<h3>Extrinsic words</h3>\n<p class=\"extrinsic\">";
  for (const auto& a : r.extrinsic) {
    o << internal::SaliencySpan(a.token, a.score, r.predicted_class) << ' ';
  }
  o << "</p>\n";
  auto list = [&](const char* title, const std::vector<TokenSeq>& texts) {
    o << "<h3>" << title << "</h3>\n<ol>\n";
    for (const auto& t : texts) o << "<li>" << HtmlEscape(join(t)) << "</li>\n";
    o << "</ol>\n";
  };
  list("Factuals", r.instances.factuals);
  list("Counterfactuals", r.instances.counterfactuals);
  o << "<h3>Run</h3>\n<table>\n";
  auto row = [&](const char* k, const std::string& v) {
    o << "<tr><th>" << k << "</th><td>" << HtmlEscape(v) << "</td></tr>\n";
  };
  row("method", r.meta.method);
  row("n", std::to_string(r.meta.n));
  row("prototypes", std::to_string(r.meta.k));
  row("population", std::to_string(r.meta.population));
  row("sigma", internal::Fixed(r.meta.sigma, 4));
  row("lambda", internal::Fixed(r.meta.lambda, 4));
  row("ridge", internal::Fixed(r.meta.ridge, 6));
  row("corpus sha256", r.meta.corpus_sha256);
  row("classifier", r.meta.classifier);
  o << "</table>\n</body>\n</html>\n";
  return o.str();
}

inline std::string render_text(const ExplanationReport& r) {
  std::ostringstream o;
  o << "explicand:  " << join(r.explicand) << '\n';
  o << "prediction: class " << r.predicted_class << " (confidence "
    << internal::Fixed(r.confidence, 3) << ")\n\n";
  std::size_t width = 5;
  for (const auto& a : r.intrinsic) width = std::max(width, a.token.size());
  for (const auto& a : r.extrinsic) width = std::max(width, a.token.size());
  auto line = [&](const std::string& pos, const std::string& tok, double s) {
    o << "  " << pos << std::string(6 - std::min<std::size_t>(6, pos.size()), ' ')
      << tok << std::string(width + 2 - tok.size(), ' ')
      << (s >= 0 ? "+" : "") << internal::Fixed(s, 4) << '\n';
  };
  o << "intrinsic attributions:\n";
  for (const auto& a : r.intrinsic) line(std::to_string(a.position), a.token, a.score);
  o << "extrinsic attributions (|score| >= " << internal::Fixed(r.meta.threshold, 2)
    << "):\n";
  if (r.extrinsic.empty()) o << "  (none)\n";
  for (const auto& a : r.extrinsic) line("-", a.token, a.score);
  o << "\nfactuals:\n";
  for (const auto& t : r.instances.factuals) o << "  " << join(t) << '\n';
  o << "counterfactuals:\n";
  for (const auto& t : r.instances.counterfactuals) o << "  " << join(t) << '\n';
  return o.str();
}

inline std::string render(const ExplanationReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return to_json(r).dump(2) + "\n";
    case ReportFormat::kHtml:
      return render_html(r);
    case ReportFormat::kText:
      return render_text(r);
  }
  throw std::invalid_argument("unknown report format");
}

}  // namespace xprob

#endif  // XPROB_EXPLANATION_HPP_
