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

// Batch drivers shared by the command-line tool and the acceptance suite:
// metric sweeps over a test set and the template stability study.

#ifndef XPROB_HARNESS_HPP_
#define XPROB_HARNESS_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xprob/evaluation.hpp"
#include "xprob/pipeline.hpp"

namespace xprob {

// Runs fn(0) .. fn(count - 1) on up to `jobs` threads. fn must only write
// to its own slot of any shared output.
inline void parallel_for(std::size_t count, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

struct EvalRow {
  std::size_t explicand_id = 0;
  Method method = Method::kXprob;
  MetricRecord metrics;
  std::string error;  // non-empty when the explicand failed

  bool ok() const { return error.empty(); }
};

inline std::vector<EvalRow> run_eval(const Explainer& explainer,
                                     std::span<const TokenSeq> texts,
                                     std::span<const Method> methods,
                                     int jobs = 1) {
  std::vector<EvalRow> rows(texts.size() * methods.size());
  parallel_for(rows.size(), jobs, [&](std::size_t slot) {
    EvalRow& row = rows[slot];
    row.explicand_id = slot / methods.size();
    row.method = methods[slot % methods.size()];
    try {
      const auto result = explainer.explain(texts[row.explicand_id], row.method);
      row.metrics = explainer.evaluate(result);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

namespace internal {

inline std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace internal

inline void write_eval_csv(std::ostream& out, std::span<const EvalRow> rows) {
  out << "explicand_id,method,r2,fidelity,confidence_drop,aopc,seconds\n";
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    out << r.explicand_id << ',' << method_name(r.method) << ','
        << internal::Num(r.metrics.r2) << ',' << internal::Num(r.metrics.fidelity)
        << ',' << internal::Num(r.metrics.confidence_drop) << ','
        << internal::Num(r.metrics.aopc) << ','
        << internal::Num(r.metrics.wall_time_seconds) << '\n';
  }
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

// NaN entries (undefined R^2) are skipped.
inline MeanStd mean_std(std::span<const double> values) {
  MeanStd s;
  for (double v : values) {
    if (std::isnan(v)) continue;
    s.mean += v;
    ++s.count;
  }
  if (s.count == 0) return {std::nan(""), std::nan(""), 0};
  s.mean /= static_cast<double>(s.count);
  for (double v : values) {
    if (!std::isnan(v)) s.std += (v - s.mean) * (v - s.mean);
  }
  s.std = std::sqrt(s.std / static_cast<double>(s.count));
  return s;
}

struct MethodSummary {
  Method method;
  MeanStd r2, fidelity, confidence_drop, aopc, seconds;
  std::size_t failures = 0;
};

inline std::vector<MethodSummary> summarize(std::span<const EvalRow> rows,
                                            std::span<const Method> methods) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    std::vector<double> r2v, fid, drop, ao, sec;
    MethodSummary s{m, {}, {}, {}, {}, {}, 0};
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (!r.ok()) {
        ++s.failures;
        continue;
      }
      r2v.push_back(r.metrics.r2);
      fid.push_back(r.metrics.fidelity);
      drop.push_back(r.metrics.confidence_drop);
      ao.push_back(r.metrics.aopc);
      sec.push_back(r.metrics.wall_time_seconds);
    }
    s.r2 = mean_std(r2v);
    s.fidelity = mean_std(fid);
    s.confidence_drop = mean_std(drop);
    s.aopc = mean_std(ao);
    s.seconds = mean_std(sec);
    out.push_back(s);
  }
  return out;
}

inline void print_summary(std::ostream& out,
                          std::span<const MethodSummary> summary) {
  auto cell = [](const MeanStd& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", s.mean, s.std);
    return std::string(buf);
  };
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %-16s %-16s %-16s %-16s %-16s %s\n",
                "method", "R2", "fidelity", "conf. drop", "AOPC", "seconds",
                "failed");
  out << line;
  for (const auto& s : summary) {
    std::snprintf(line, sizeof(line), "%-8s %-17s %-17s %-17s %-17s %-17s %zu\n",
                  method_name(s.method).c_str(), cell(s.r2).c_str(),
                  cell(s.fidelity).c_str(), cell(s.confidence_drop).c_str(),
                  cell(s.aopc).c_str(), cell(s.seconds).c_str(), s.failures);
    out << line;
  }
}

// ---------------------------------------------------------------------------

struct StabilityRecord {
  std::size_t case_id = 0;
  int template_id = 1;  // 1-based
  std::string adjective;
  std::string noun;
  StabilityObservation obs;
  std::string error;
};

struct StabilityRun {
  Method method = Method::kXprob;
  std::vector<StabilityCase> cases;
  std::vector<StabilityRecord> records;  // case-major, template-minor
  StabilityStats stats;
  std::size_t failures = 0;
};

inline StabilityRun run_stability(const Explainer& explainer,
                                  const StabilityWords& words, Method method,
                                  int jobs = 1,
                                  std::ostream& warn = std::cerr) {
  StabilityRun run;
  run.method = method;
  run.cases = gen_stability_cases(words.adjectives(), words.nouns);
  run.records.resize(run.cases.size() * kTemplateCount);
  std::vector<std::string> warnings(run.records.size());
  parallel_for(run.records.size(), jobs, [&](std::size_t slot) {
    const auto& c = run.cases[slot / kTemplateCount];
    const std::size_t t = slot % kTemplateCount;
    StabilityRecord& rec = run.records[slot];
    rec.case_id = c.id;
    rec.template_id = static_cast<int>(t) + 1;
    rec.adjective = c.adjective;
    rec.noun = c.noun;
    try {
      const auto result = explainer.explain(c.texts[t], method);
      std::ostringstream w;
      rec.obs.adj_score = word_score(result.attributions, c.adjective, w);
      rec.obs.noun_score = word_score(result.attributions, c.noun, w);
      rec.obs.f_confidence = result.neighborhood.explicand_prediction.confidence();
      warnings[slot] = w.str();
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });
  for (const auto& w : warnings) warn << w;

  std::vector<std::array<StabilityObservation, kTemplateCount>> complete;
  for (std::size_t c = 0; c < run.cases.size(); ++c) {
    std::array<StabilityObservation, kTemplateCount> obs;
    bool ok = true;
    for (std::size_t t = 0; t < kTemplateCount; ++t) {
      const auto& rec = run.records[c * kTemplateCount + t];
      if (!rec.error.empty()) {
        ok = false;
        ++run.failures;
        warn << "warning: case " << c << " template " << (t + 1)
             << " failed: " << rec.error << '\n';
      }
      obs[t] = rec.obs;
    }
    if (ok) complete.push_back(obs);
  }
  run.stats = stability_stats(complete);
  return run;
}

inline void write_stability_csv(std::ostream& out, const StabilityRun& run) {
  out << "case_id,template,adjective,noun,adj_score,noun_score,f_confidence\n";
  for (const auto& r : run.records) {
    if (!r.error.empty()) continue;
    out << r.case_id << ',' << r.template_id << ',' << r.adjective << ','
        << r.noun << ',' << internal::Num(r.obs.adj_score) << ','
        << internal::Num(r.obs.noun_score) << ','
        << internal::Num(r.obs.f_confidence) << '\n';
  }
}

inline void print_stability_summary(std::ostream& out,
                                    std::span<const StabilityRun> runs) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s %-8s %-9s %-9s %-9s %-9s %s\n",
                "sigma_f", "method", "mu_adj", "sigma_adj", "mu_noun",
                "sigma_noun", "cases");
  out << line;
  for (const auto& r : runs) {
    std::snprintf(line, sizeof(line),
                  "%-8.3f %-8s %-9.3f %-9.3f %-9.3f %-10.3f %zu\n",
                  r.stats.sigma_f, method_name(r.method).c_str(), r.stats.mu_adj,
                  r.stats.sigma_adj, r.stats.mu_noun, r.stats.sigma_noun,
                  r.stats.cases);
    out << line;
  }
}

}  // namespace xprob

#endif  // XPROB_HARNESS_HPP_
