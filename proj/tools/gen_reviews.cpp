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

// Generates the bundled restaurant-review sample: short reviews built from
// sentence templates, with sentiment carried by adjectives and verbs and
// nouns spread evenly over both classes. Output is a pure function of the
// seed (raw mt19937_64 draws only).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

using Words = std::vector<std::string>;

const Words kPositiveAdjectives = {
    "delicious", "amazing", "excellent", "fantastic", "wonderful", "perfect",
    "fresh",     "great",   "best",      "tasty",     "friendly",  "nice",
    "good",      "awesome", "lovely",    "superb",    "outstanding"};
const Words kNegativeAdjectives = {
    "horrible", "terrible", "wrong", "awful", "poor",   "bland",
    "worst",    "bad",      "cheap", "rude",  "slow",   "cold",
    "dirty",    "stale",    "mediocre", "gross", "overpriced"};
const Words kPositiveVerbs = {"loved", "enjoyed", "liked", "adored"};
const Words kNegativeVerbs = {"hated", "disliked", "regretted"};
const Words kFoodNouns = {"bread",  "soup",   "pizza",  "food",    "meal",
                          "salad",  "drink",  "dessert", "fish",   "steak",
                          "burger", "fries",  "pasta",  "chicken", "coffee",
                          "tacos",  "sushi",  "sandwich"};
const Words kPlaceNouns = {"service", "staff", "waiter", "place",
                           "atmosphere", "menu", "portions", "prices"};
const Words kIntensifiers = {"very", "really", "so", "quite", "super"};
const Words kFillers = {
    "we came here for dinner",     "i came here with my family",
    "we stopped by for lunch",     "it was a busy night",
    "we sat outside on the patio", "i ordered the {food}",
    "my friend got the {food}",    "we shared the {food} and the {food}",
    "this was our first visit",    "we waited for a table"};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::size_t Below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool Chance(double p) {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p;
  }
  const std::string& Pick(const Words& w) { return w[Below(w.size())]; }

  std::string Adjective(bool positive) {
    return Pick(positive ? kPositiveAdjectives : kNegativeAdjectives);
  }

  std::string Fill(std::string s) {
    for (;;) {
      const auto pos = s.find("{food}");
      if (pos == std::string::npos) return s;
      s.replace(pos, 6, Pick(kFoodNouns));
    }
  }

  std::string Opinion(bool positive) {
    const std::string& food = Pick(kFoodNouns);
    const std::string& place = Pick(kPlaceNouns);
    const std::string adj = Adjective(positive);
    switch (Below(14)) {
      case 0: return "the " + food + " was " + adj;
      case 1: return "the " + food + " is " + adj;
      case 2: return adj + " " + food;
      case 3: return "very " + adj + " " + food;
      case 4: return "a very " + adj + " " + food;
      case 5: return "this is a very " + adj + " " + food;
      case 6: return "the " + place + " was " + Pick(kIntensifiers) + " " + adj;
      case 7: return "we had the " + food + " and it was " + adj;
      case 8:
        if (!positive && Chance(0.3)) return "i was disappointed with the " + food;
        return "i " + Pick(positive ? kPositiveVerbs : kNegativeVerbs) +
               " the " + food;
      case 9: return "the " + food + " was " + Pick(kIntensifiers) + " " + adj;
      case 10:
        return adj + " " + food + " and " + Adjective(positive) + " " + place;
      case 11:
        return positive ? "will definitely come back"
                        : "will never come back";
      case 12:
        return positive ? "highly recommend this place"
                        : "would not recommend this place";
      default: return "our " + food + " came out " + adj;
    }
  }

  // A review of 1 to 3 clauses. About one clause in ten carries the
  // opposite sentiment, and some reviews open with a neutral filler.
  std::string Review(bool positive) {
    std::string text;
    auto add = [&](const std::string& clause) {
      if (!text.empty()) text += Chance(0.5) ? " and " : ". ";
      text += clause;
    };
    if (Chance(0.3)) add(Fill(Pick(kFillers)));
    const std::size_t clauses = 1 + Below(3);
    for (std::size_t c = 0; c < clauses; ++c) {
      add(Opinion(Chance(0.9) ? positive : !positive));
    }
    return text;
  }

 private:
  std::mt19937_64 rng_;
};

void WriteLabeled(const std::string& path, std::size_t count,
                  std::uint64_t seed) {
  Generator gen(seed);
  std::ofstream out(path);
  for (std::size_t i = 0; i < count; ++i) {
    const bool positive = gen.Chance(0.5);
    out << (positive ? 1 : 0) << '\t' << gen.Review(positive) << '\n';
  }
}

void WriteCorpus(const std::string& path, std::size_t count,
                 std::uint64_t seed) {
  Generator gen(seed);
  std::ofstream out(path);
  for (std::size_t i = 0; i < count; ++i) {
    out << gen.Review(gen.Chance(0.5)) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic restaurant-review sample"};
  std::string out_dir = "data";
  std::size_t train = 2000, test = 200, corpus = 20000;
  std::uint64_t seed = 7;
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--train", train, "Labeled training lines")->capture_default_str();
  app.add_option("--test", test, "Labeled test lines")->capture_default_str();
  app.add_option("--corpus", corpus, "Unlabeled corpus lines")->capture_default_str();
  app.add_option("--seed", seed, "Base seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  WriteLabeled(out_dir + "/train.tsv", train, seed);
  WriteLabeled(out_dir + "/test.tsv", test, seed + 1);
  WriteCorpus(out_dir + "/corpus.txt", corpus, seed + 2);
  std::cerr << "wrote " << train << " train, " << test << " test, " << corpus
            << " corpus lines to " << out_dir << '\n';
  return 0;
}
