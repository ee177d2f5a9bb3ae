#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace boxsearch {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;  // measured vs required, one line
};

// Gamma-product inequality swept over 1 <= a <= b <= 200 and a phi grid
// in (0,1].
std::vector<Check> verify_gamma();

// Per-box certified upper bounds against the closed-form guarantees for
// k in {2,3,5,10}, x <= 10^4, plus the prior-level consequence against
// the coordinated baseline on the golden priors.
std::vector<Check> verify_bounds();

// Worked 3-box schedule, minimality of the water-filling time against the
// closed-form competitors on random non-increasing priors, agreement of
// the two independent water-filling routes, and the uniform closed forms.
std::vector<Check> verify_optimality(uint64_t seed = 20260815);

// Finite-M ratio convergence toward the asymptotic limit plus the
// continuum identities (closed form vs quadrature, limit reconstruction).
std::vector<Check> verify_pareto();
std::vector<Check> verify_pareto_single(double b, int k, int64_t M);

// Sampled means against exact values on every golden prior, the paired
// fault comparison, thread-count determinism, and k-monotonicity.
std::vector<Check> verify_montecarlo(uint64_t seed = 20260815, int threads = 0);

std::vector<Check> verify_all(uint64_t seed = 20260815, int threads = 0);

// "[PASS]/[FAIL] name: detail" per check; returns the number of failures.
int print_checks(const std::vector<Check>& checks, std::ostream& os);

}  // namespace boxsearch
