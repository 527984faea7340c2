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

// xprob: train | explain | eval | stability

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xprob/xprob.hpp"

namespace {

struct CommonFlags {
  xprob::RunConfig config;
  std::string format = "json";
  std::vector<std::string> methods{"xprob"};
  int jobs = 1;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* f) {
  auto& c = f->config;
  cmd->add_option("--corpus", c.corpus_path, "Corpus file, one document per line")
      ->required();
  cmd->add_option("--classifier", c.classifier_spec,
                  "builtin:<model.json> or cmd:<command line>")
      ->required();
  cmd->add_option("--n", c.n, "n-gram context length")->capture_default_str();
  cmd->add_option("--prototypes", c.prototypes, "Initial prototypes k")
      ->capture_default_str();
  cmd->add_option("--population", c.population, "Neighborhood population p")
      ->capture_default_str();
  cmd->add_option("--sigma", c.sigma, "Kernel width")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "Closeness/diversity balance")
      ->capture_default_str();
  cmd->add_option("--ridge", c.ridge, "Surrogate ridge penalty")
      ->capture_default_str();
  cmd->add_option("--threshold", c.threshold, "Attribution threshold")
      ->capture_default_str();
  cmd->add_option("--instances", c.instances, "Instances per class")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed for word dropping and downsampling")
      ->capture_default_str();
  cmd->add_option("--jobs", f->jobs, "Worker threads")->capture_default_str();
}

void AddMethodFlag(CLI::App* cmd, CommonFlags* f, bool multi) {
  auto* opt = cmd->add_option("--method", f->methods,
                              multi ? "Comma-separated methods: xprob,drop"
                                    : "xprob or drop")
                  ->capture_default_str();
  if (multi) {
    opt->delimiter(',');
  } else {
    opt->expected(1);
  }
}

std::vector<xprob::Method> ParseMethods(const std::vector<std::string>& names) {
  std::vector<xprob::Method> out;
  for (const auto& n : names) out.push_back(xprob::parse_method(n));
  return out;
}

// Builds the session, validating every flag before any data is read.
std::unique_ptr<xprob::Explainer> MakeExplainer(
    const CommonFlags& f, std::optional<std::size_t> corpus_size = {}) {
  f.config.validate();
  if (f.jobs < 1) throw xprob::ConfigError("--jobs must be >= 1");
  xprob::Corpus corpus = xprob::load_corpus(f.config.corpus_path);
  if (corpus_size) corpus = xprob::downsample(corpus, *corpus_size, f.config.seed);
  auto classifier = xprob::make_classifier(f.config.classifier_spec);
  std::cerr << "session: " << corpus.size() << " corpus documents, classifier "
            << classifier->descriptor() << '\n';
  return std::make_unique<xprob::Explainer>(std::move(corpus), std::move(classifier),
                                            f.config);
}

int CmdTrain(const std::string& data, const std::string& out,
             const std::string& valid) {
  const auto examples = xprob::load_labeled_tsv(data);
  const auto model = xprob::NaiveBayesClassifier::train(examples);
  model->save(out);
  std::cerr << "trained on " << examples.size() << " examples; wrote " << out
            << '\n';
  if (!valid.empty()) {
    const auto held_out = xprob::load_labeled_tsv(valid);
    std::size_t correct = 0;
    for (const auto& ex : held_out) {
      correct += model->Predict(ex.tokens).predicted_class() == ex.label;
    }
    std::cout << "validation accuracy: "
              << (held_out.empty() ? 0.0
                                   : static_cast<double>(correct) /
                                         static_cast<double>(held_out.size()))
              << " (" << correct << "/" << held_out.size() << ")\n";
  }
  return 0;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  }
  return out;
}

int CmdExplain(const CommonFlags& f, const std::vector<std::string>& texts_arg,
               const std::string& input, const std::string& out_dir) {
  const auto format = xprob::parse_format(f.format);
  const auto methods = ParseMethods(f.methods);
  std::vector<std::string> raw = texts_arg;
  if (!input.empty()) {
    auto more = ReadLines(input);
    raw.insert(raw.end(), more.begin(), more.end());
  }
  if (raw.empty()) throw xprob::ConfigError("give --text or --input");
  auto explainer = MakeExplainer(f);

  std::vector<xprob::TokenSeq> texts;
  for (const auto& r : raw) texts.push_back(xprob::tokenize(r));
  std::vector<std::string> rendered(texts.size()), errors(texts.size());
  xprob::parallel_for(texts.size(), f.jobs, [&](std::size_t i) {
    try {
      rendered[i] =
          xprob::render(explainer->explain(texts[i], methods.front()).report, format);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::size_t failures = 0;
  const char* ext = format == xprob::ReportFormat::kJson   ? ".json"
                    : format == xprob::ReportFormat::kHtml ? ".html"
                                                           : ".txt";
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      std::cerr << "error: input " << i << ": " << errors[i] << '\n';
      continue;
    }
    if (out_dir.empty()) {
      std::cout << rendered[i];
    } else {
      std::ofstream out(out_dir + "/report_" + std::to_string(i) + ext);
      out << rendered[i];
    }
  }
  std::cerr << "explained " << texts.size() - failures << "/" << texts.size()
            << " inputs";
  if (failures) std::cerr << " (" << failures << " failed)";
  std::cerr << '\n';
  return 0;
}

std::string SuffixedPath(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + suffix +
                             p.extension().string()))
      .string();
}

int CmdEval(const CommonFlags& f, const std::string& test_path,
            const std::string& out_path, const std::vector<std::size_t>& sizes,
            std::size_t limit) {
  const auto methods = ParseMethods(f.methods);
  f.config.validate();
  auto examples = xprob::load_labeled_tsv(test_path);
  std::vector<xprob::TokenSeq> texts;
  for (auto& ex : examples) {
    if (!ex.tokens.empty()) texts.push_back(std::move(ex.tokens));
    if (limit && texts.size() >= limit) break;
  }
  std::vector<std::optional<std::size_t>> blocks;
  if (sizes.empty()) {
    blocks.push_back(std::nullopt);
  } else {
    for (auto s : sizes) blocks.push_back(s);
  }
  for (const auto& size : blocks) {
    auto explainer = MakeExplainer(f, size);
    const auto rows = xprob::run_eval(*explainer, texts, methods, f.jobs);
    const std::string path =
        blocks.size() > 1 ? SuffixedPath(out_path, "n" + std::to_string(*size))
                          : out_path;
    if (!path.empty()) {
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write " + path);
      xprob::write_eval_csv(out, rows);
    } else {
      xprob::write_eval_csv(std::cout, rows);
    }
    std::cout << "== corpus size " << explainer->corpus().size() << ", "
              << texts.size() << " explicands ==\n";
    const auto summary = xprob::summarize(rows, methods);
    xprob::print_summary(std::cout, summary);
    for (const auto& r : rows) {
      if (!r.ok()) {
        std::cerr << "error: explicand " << r.explicand_id << " ("
                  << xprob::method_name(r.method) << "): " << r.error << '\n';
      }
    }
  }
  return 0;
}

int CmdStability(const CommonFlags& f, const std::string& out_path) {
  const auto methods = ParseMethods(f.methods);
  auto explainer = MakeExplainer(f);
  const auto words = xprob::select_stability_words(explainer->classifier(),
                                                   xprob::default_word_pools());
  std::cerr << "adjectives:";
  for (const auto& w : words.adjectives()) std::cerr << ' ' << w;
  std::cerr << "\nnouns:";
  for (const auto& w : words.nouns) std::cerr << ' ' << w;
  std::cerr << '\n';
  std::vector<xprob::StabilityRun> runs;
  for (auto m : methods) {
    runs.push_back(xprob::run_stability(*explainer, words, m, f.jobs));
    const std::string path =
        methods.size() > 1 ? SuffixedPath(out_path, xprob::method_name(m)) : out_path;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    xprob::write_stability_csv(out, runs.back());
    std::cerr << xprob::method_name(m) << ": " << runs.back().cases.size()
              << " cases, " << runs.back().records.size() << " explanations -> "
              << path << '\n';
  }
  xprob::print_stability_summary(std::cout, runs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain text classifiers with probability-based editing"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train the builtin naive-Bayes classifier");
  std::string train_data, train_out, train_valid;
  train->add_option("--data", train_data, "Labeled TSV (label<TAB>text)")->required();
  train->add_option("--out", train_out, "Model file to write")->required();
  train->add_option("--valid", train_valid, "Optional held-out labeled TSV");

  CommonFlags explain_flags;
  auto* explain = app.add_subcommand("explain", "Explain one or more texts");
  AddCommonFlags(explain, &explain_flags);
  AddMethodFlag(explain, &explain_flags, false);
  explain->add_option("--format", explain_flags.format, "json, html or text")
      ->capture_default_str();
  std::vector<std::string> explain_texts;
  std::string explain_input, explain_out_dir;
  explain->add_option("--text", explain_texts, "Text to explain (repeatable)");
  explain->add_option("--input", explain_input, "File with one text per line");
  explain->add_option("--out-dir", explain_out_dir,
                      "Write report_<i>.<ext> files here instead of stdout");

  CommonFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Metric sweep over a labeled test set");
  AddCommonFlags(eval, &eval_flags);
  AddMethodFlag(eval, &eval_flags, true);
  std::string eval_test, eval_out;
  std::vector<std::size_t> eval_sizes;
  std::size_t eval_limit = 0;
  eval->add_option("--test", eval_test, "Labeled TSV of explicands")->required();
  eval->add_option("--out", eval_out, "Metrics CSV (stdout when omitted)");
  eval->add_option("--corpus-size", eval_sizes,
                   "Comma-separated corpus sizes to downsample to")
      ->delimiter(',');
  eval->add_option("--limit", eval_limit, "Use at most this many explicands");

  CommonFlags stab_flags;
  auto* stab = app.add_subcommand("stability", "Template-based stability study");
  AddCommonFlags(stab, &stab_flags);
  AddMethodFlag(stab, &stab_flags, true);
  std::string stab_out = "stability.csv";
  stab->add_option("--out", stab_out, "Stability CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return CmdTrain(train_data, train_out, train_valid);
    if (explain->parsed()) {
      return CmdExplain(explain_flags, explain_texts, explain_input, explain_out_dir);
    }
    if (eval->parsed()) {
      return CmdEval(eval_flags, eval_test, eval_out, eval_sizes, eval_limit);
    }
    if (stab->parsed()) return CmdStability(stab_flags, stab_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
