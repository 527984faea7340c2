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

// Locality-weighted linear surrogate over binary token-presence features.
//
// Minimizes  sum_i w_i (f_i - b - x_i . beta)^2 + ridge * |beta|^2  with
// w_i = exp(-d_i^2 / sigma^2) and an unpenalized intercept b. The intercept
// is eliminated by weighted centering; the remaining ridge system is solved
// in whichever of the primal (features x features) or dual
// (members x members) forms is smaller. Both give the same minimizer.

#ifndef XPROB_SURROGATE_HPP_
#define XPROB_SURROGATE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "xprob/neighborhood.hpp"
#include "xprob/text.hpp"

namespace xprob {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SurrogateModel {
 public:
  SurrogateModel() = default;
  SurrogateModel(std::vector<std::string> feature_space,
                 std::vector<double> coefficients, double intercept,
                 double sigma)
      : feature_space_(std::move(feature_space)),
        coefficients_(std::move(coefficients)),
        intercept_(intercept),
        sigma_(sigma) {
    for (std::size_t k = 0; k < feature_space_.size(); ++k) {
      column_.emplace(feature_space_[k], k);
    }
  }

  // Sorted token list; PAD never appears.
  const std::vector<std::string>& feature_space() const {
    return feature_space_;
  }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double intercept() const { return intercept_; }
  double sigma() const { return sigma_; }

  // Zero for tokens outside the feature space.
  double coefficient(const std::string& token) const {
    auto it = column_.find(token);
    return it == column_.end() ? 0.0 : coefficients_[it->second];
  }

  double predict(const TokenSeq& tokens) const {
    double y = intercept_;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens) {
      if (!seen.insert(t).second) continue;
      y += coefficient(t);
    }
    return y;
  }

 private:
  std::vector<std::string> feature_space_;
  std::vector<double> coefficients_;
  std::unordered_map<std::string, std::size_t> column_;
  double intercept_ = 0.0;
  double sigma_ = 1.0;
};

inline double kernel_weight(double distance, double sigma) {
  return std::exp(-(distance * distance) / (sigma * sigma));
}

inline std::vector<double> compute_weights(const Neighborhood& neighborhood,
                                           double sigma) {
  if (!(sigma > 0.0)) throw ContractViolation("sigma must be positive");
  std::vector<double> w;
  w.reserve(neighborhood.size());
  for (const auto& m : neighborhood.members) {
    w.push_back(kernel_weight(m.distance, sigma));
  }
  return w;
}

// Weighted ridge fit on explicit (text, target, weight) triples.
inline SurrogateModel fit_weighted_ridge(std::span<const TokenSeq> texts,
                                         std::span<const double> targets,
                                         std::span<const double> weights,
                                         double ridge, double sigma = 1.0) {
  const std::size_t n = texts.size();
  if (n < 2) throw ContractViolation("surrogate fit needs at least 2 members");
  if (targets.size() != n || weights.size() != n) {
    throw ContractViolation("texts, targets and weights must align");
  }
  if (!(ridge >= 0.0)) throw ContractViolation("ridge must be non-negative");

  std::vector<std::string> features;
  {
    std::unordered_set<std::string> vocab;
    for (const auto& t : texts) {
      for (const auto& tok : t) {
        if (tok != kPadToken) vocab.insert(tok);
      }
    }
    features.assign(vocab.begin(), vocab.end());
    std::sort(features.begin(), features.end());
  }
  std::unordered_map<std::string, Eigen::Index> col;
  for (std::size_t k = 0; k < features.size(); ++k) {
    col.emplace(features[k], static_cast<Eigen::Index>(k));
  }
  const auto f = static_cast<Eigen::Index>(features.size());
  const auto rows = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, f);
  Eigen::VectorXd y(rows), w(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (const auto& tok : texts[static_cast<std::size_t>(i)]) {
      auto it = col.find(tok);
      if (it != col.end()) x(i, it->second) = 1.0;
    }
    y(i) = targets[static_cast<std::size_t>(i)];
    w(i) = weights[static_cast<std::size_t>(i)];
    if (!(w(i) >= 0.0) || !std::isfinite(y(i))) {
      throw ContractViolation("weights must be non-negative, targets finite");
    }
  }
  const double wsum = w.sum();
  if (!(wsum > 0.0)) throw FitError("all surrogate weights are zero");

  const Eigen::RowVectorXd x_mean = (w.transpose() * x) / wsum;
  const double y_mean = w.dot(y) / wsum;
  const Eigen::VectorXd sqrt_w = w.array().sqrt();
  const Eigen::MatrixXd z =
      sqrt_w.asDiagonal() * (x.rowwise() - x_mean);  // rows x f
  const Eigen::VectorXd yc = sqrt_w.array() * (y.array() - y_mean);

  Eigen::VectorXd beta(f);
  if (f == 0) {
    beta.resize(0);
  } else if (f <= rows) {
    Eigen::MatrixXd a = z.transpose() * z;
    a.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw FitError("surrogate normal equations are singular");
    }
    beta = ldlt.solve(z.transpose() * yc);
  } else {
    Eigen::MatrixXd g = z * z.transpose();
    g.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw FitError("surrogate normal equations are singular");
    }
    beta = z.transpose() * ldlt.solve(yc);
  }
  if (!beta.allFinite()) throw FitError("surrogate fit produced non-finite values");
  const double intercept = y_mean - x_mean.dot(beta);

  return SurrogateModel(std::move(features),
                        std::vector<double>(beta.data(), beta.data() + f),
                        intercept, sigma);
}

// Regression target: black-box probability of the explicand's class.
inline SurrogateModel fit_surrogate(const Neighborhood& neighborhood,
                                    double sigma, double ridge) {
  if (neighborhood.size() < 2) {
    throw ContractViolation("surrogate fit needs at least 2 members");
  }
  std::vector<TokenSeq> texts;
  std::vector<double> targets;
  texts.reserve(neighborhood.size());
  targets.reserve(neighborhood.size());
  for (const auto& m : neighborhood.members) {
    texts.push_back(m.tokens);
    targets.push_back(m.prediction.prob(neighborhood.target_class));
  }
  const auto weights = compute_weights(neighborhood, sigma);
  return fit_weighted_ridge(texts, targets, weights, ridge, sigma);
}

// Weighted ridge objective at an arbitrary parameter point; used by the
// optimality checks.
inline double weighted_ridge_loss(std::span<const TokenSeq> texts,
                                  std::span<const double> targets,
                                  std::span<const double> weights,
                                  const SurrogateModel& model, double ridge) {
  double loss = 0.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const double r = targets[i] - model.predict(texts[i]);
    loss += weights[i] * r * r;
  }
  for (double c : model.coefficients()) loss += ridge * c * c;
  return loss;
}

struct IntrinsicAttribution {
  std::size_t position = 0;
  std::string token;
  double score = 0.0;
  friend bool operator==(const IntrinsicAttribution&,
                         const IntrinsicAttribution&) = default;
};

struct ExtrinsicAttribution {
  std::string token;
  double score = 0.0;
  friend bool operator==(const ExtrinsicAttribution&,
                         const ExtrinsicAttribution&) = default;
};

struct AttributionVector {
  int target_class = 0;
  std::vector<IntrinsicAttribution> intrinsic;  // explicand order
  std::vector<ExtrinsicAttribution> extrinsic;  // all nonzero, |score| desc
  double report_threshold = 0.1;

  // Extrinsic entries with |score| >= report_threshold.
  std::vector<ExtrinsicAttribution> reported_extrinsic() const {
    std::vector<ExtrinsicAttribution> out;
    for (const auto& e : extrinsic) {
      if (std::fabs(e.score) >= report_threshold) out.push_back(e);
    }
    return out;
  }

  // Score of an explicand token; 0 when absent.
  double intrinsic_score(const std::string& token) const {
    for (const auto& a : intrinsic) {
      if (a.token == token) return a.score;
    }
    return 0.0;
  }
};

inline AttributionVector split_attributions(const SurrogateModel& model,
                                            const TokenSeq& explicand,
                                            int target_class,
                                            double report_threshold = 0.1) {
  AttributionVector out;
  out.target_class = target_class;
  out.report_threshold = report_threshold;
  std::unordered_set<std::string> in_explicand(explicand.begin(),
                                               explicand.end());
  for (std::size_t p = 0; p < explicand.size(); ++p) {
    out.intrinsic.push_back({p, explicand[p], model.coefficient(explicand[p])});
  }
  const auto& features = model.feature_space();
  const auto& coef = model.coefficients();
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (in_explicand.count(features[k]) || coef[k] == 0.0) continue;
    out.extrinsic.push_back({features[k], coef[k]});
  }
  std::stable_sort(out.extrinsic.begin(), out.extrinsic.end(),
                   [](const ExtrinsicAttribution& a,
                      const ExtrinsicAttribution& b) {
                     return std::fabs(a.score) > std::fabs(b.score);
                   });
  return out;
}

}  // namespace xprob

#endif  // XPROB_SURROGATE_HPP_
