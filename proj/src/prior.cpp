#include "boxsearch/prior.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "boxsearch/common.hpp"

namespace boxsearch {

namespace {

// Shared by every constructor: scale to unit total in one compensated pass.
void normalize(Eigen::ArrayXd& masses) {
  KahanSum total;
  for (Eigen::Index i = 0; i < masses.size(); ++i) total.add(masses(i));
  masses /= total.value();
}

}  // namespace

BoxPrior make_uniform(int M) {
  if (M < 1) throw std::invalid_argument("uniform prior needs at least one box");
  BoxPrior p;
  p.kind = PriorKind::uniform;
  p.masses = Eigen::ArrayXd::Constant(M, 1.0 / M);
  return p;
}

BoxPrior make_pareto(double b, int M) {
  if (!(b > 0.0) || b > 1.0) throw std::invalid_argument("pareto exponent must lie in (0,1]");
  if (M < 1) throw std::invalid_argument("pareto prior needs at least one box");
  BoxPrior p;
  p.kind = PriorKind::pareto;
  p.b = b;
  p.masses.resize(M);
  for (int x = 1; x <= M; ++x) p.masses(x - 1) = std::pow(static_cast<double>(x), -b);
  normalize(p.masses);
  return p;
}

BoxPrior make_custom(Eigen::ArrayXd raw) {
  if (raw.size() == 0) throw std::invalid_argument("empty mass vector");
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw(i)) || raw(i) < 0.0)
      throw std::invalid_argument("masses must be finite and non-negative");
  }
  for (Eigen::Index i = 0; i + 1 < raw.size(); ++i) {
    if (raw(i + 1) > raw(i))
      throw OrderViolation("masses must be non-increasing (box " + std::to_string(i + 2) +
                           " exceeds box " + std::to_string(i + 1) + ")");
  }
  if ((raw == 0.0).all()) throw std::invalid_argument("masses must not all be zero");
  BoxPrior p;
  p.kind = PriorKind::custom;
  p.masses = std::move(raw);
  normalize(p.masses);
  return p;
}

QWeights q_weights(const BoxPrior& prior, int k) {
  if (k < 2) throw std::invalid_argument("q weights need k >= 2");
  QWeights w;
  w.k = k;
  w.q.resize(prior.boxes());
  double expo = -1.0 / (k - 1);
  for (int i = 0; i < prior.boxes(); ++i) {
    double m = prior.masses(i);
    w.q(i) = m > 0.0 ? std::pow(m, expo) : std::numeric_limits<double>::infinity();
  }
  return w;
}

nlohmann::json prior_to_json(const BoxPrior& prior) {
  nlohmann::json j;
  switch (prior.kind) {
    case PriorKind::uniform: j["kind"] = "uniform"; break;
    case PriorKind::pareto: j["kind"] = "pareto"; break;
    case PriorKind::custom: j["kind"] = "custom"; break;
  }
  j["M"] = prior.boxes();
  if (prior.kind == PriorKind::pareto) j["b"] = prior.b;
  j["masses"] = std::vector<double>(prior.masses.data(), prior.masses.data() + prior.boxes());
  return j;
}

BoxPrior prior_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return make_uniform(j.at("M").get<int>());
  if (kind == "pareto") return make_pareto(j.at("b").get<double>(), j.at("M").get<int>());
  if (kind != "custom") throw std::invalid_argument("unknown prior kind '" + kind + "'");
  auto vals = j.at("masses").get<std::vector<double>>();
  // M is redundant for a custom prior; when present it has to agree.
  if (j.contains("M") && j.at("M").get<int>() != static_cast<int>(vals.size()))
    throw std::invalid_argument("prior JSON: masses length disagrees with M");
  Eigen::ArrayXd raw = Eigen::Map<const Eigen::ArrayXd>(vals.data(), vals.size());
  return make_custom(std::move(raw));
}

BoxPrior parse_prior_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("prior spec must look like uniform:M, pareto:b,M or file:path");
  std::string head = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  try {
    if (head == "uniform") return make_uniform(std::stoi(rest));
    if (head == "pareto") {
      auto comma = rest.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("pareto prior spec needs b and M");
      return make_pareto(std::stod(rest.substr(0, comma)), std::stoi(rest.substr(comma + 1)));
    }
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("prior spec parameter out of range in '" + spec + "'");
  }
  if (head == "file") {
    std::ifstream in(rest);
    if (!in) throw std::invalid_argument("cannot open prior file '" + rest + "'");
    try {
      nlohmann::json j;
      in >> j;
      return prior_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      // A broken prior file is a usage problem, not an internal failure.
      throw std::invalid_argument("prior file '" + rest + "': " + e.what());
    }
  }
  throw std::invalid_argument("unknown prior spec '" + head + "'");
}

}  // namespace boxsearch
