#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

namespace boxsearch {

enum class PriorKind { custom, uniform, pareto };

// Non-increasing probability vector over boxes 1..M.  masses(x-1) is the
// mass of box x; zero masses may appear only as a trailing suffix.
struct BoxPrior {
  Eigen::ArrayXd masses;
  PriorKind kind = PriorKind::custom;
  double b = 0.0;  // pareto exponent, meaningful only when kind == pareto

  int boxes() const { return static_cast<int>(masses.size()); }

  // Largest x with positive mass.
  int support() const {
    int m = boxes();
    while (m > 0 && masses(m - 1) == 0.0) --m;
    return m;
  }
};

BoxPrior make_uniform(int M);

// masses(x) proportional to x^-b, b in (0,1].
BoxPrior make_pareto(double b, int M);

// Normalizes a raw non-increasing mass vector.  Throws OrderViolation on
// any increasing adjacent pair and std::invalid_argument on empty,
// all-zero, negative or non-finite input.
BoxPrior make_custom(Eigen::ArrayXd raw);

// q(x) = p(x)^(-1/(k-1)), the weight scale the optimal schedule assigns
// each box; +infinity where p(x) = 0.  Non-decreasing.
struct QWeights {
  Eigen::ArrayXd q;
  int k;
};
QWeights q_weights(const BoxPrior& prior, int k);

nlohmann::json prior_to_json(const BoxPrior& prior);
BoxPrior prior_from_json(const nlohmann::json& j);

// Accepts "uniform:M", "pareto:b,M" or "file:path" (a JSON file as
// produced by prior_to_json).
BoxPrior parse_prior_spec(const std::string& spec);

}  // namespace boxsearch
