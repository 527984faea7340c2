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

// Minimal external classifier speaking the newline-delimited JSON protocol.
// Answers every text with a fixed probability row; used to exercise the
// engine's subprocess client.
//
//   --probs 0.3,0.7     row to return (also fixes the class count)
//   --drift-every K     every K-th row is scaled to sum to 1 + drift
//   --drift 5e-4
//   --bad-id-every K    every K-th response carries a wrong id
//   --hang-after K      stop answering after K responses
//   --crash-after K     exit after K responses

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fixed-probability external classifier stub"};
  std::vector<double> probs{0.3, 0.7};
  std::uint64_t drift_every = 0, bad_id_every = 0, hang_after = 0,
                crash_after = 0;
  double drift = 5e-4;
  app.add_option("--probs", probs)->delimiter(',');
  app.add_option("--drift-every", drift_every);
  app.add_option("--drift", drift);
  app.add_option("--bad-id-every", bad_id_every);
  app.add_option("--hang-after", hang_after);
  app.add_option("--crash-after", crash_after);
  CLI11_PARSE(app, argc, argv);

  std::cout << nlohmann::json{{"classes", probs.size()}}.dump() << std::endl;

  std::uint64_t responses = 0, rows = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (crash_after && responses >= crash_after) return 3;
    if (hang_after && responses >= hang_after) {
      std::this_thread::sleep_for(std::chrono::hours(1));
    }
    const auto req = nlohmann::json::parse(line);
    nlohmann::json out_rows = nlohmann::json::array();
    for (std::size_t i = 0; i < req.at("texts").size(); ++i) {
      ++rows;
      std::vector<double> row = probs;
      if (drift_every && rows % drift_every == 0) {
        for (double& p : row) p *= 1.0 + drift;
      }
      out_rows.push_back(row);
    }
    ++responses;
    std::uint64_t id = req.at("id").get<std::uint64_t>();
    if (bad_id_every && responses % bad_id_every == 0) id += 1000000;
    std::cout << nlohmann::json{{"id", id}, {"probs", out_rows}}.dump()
              << std::endl;
  }
  return 0;
}
