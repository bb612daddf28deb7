#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "setsens/hsic.hpp"
#include "setsens/rng.hpp"

namespace setsens {

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random finite joint law on <= max_support points per side. The input kernel
// is a Gaussian kernel made ANOVA w.r.t. the input marginal by the discrete
// analogue of the ANOVA transform.
DiscreteJointModel random_anova_model(Rng& rng, std::size_t max_support = 4);

// Random membership table with rows drawn around a few prototype sets, so
// that symmetric differences cover a range of sizes.
MembershipMatrix random_membership(Rng& rng, std::size_t n, std::size_t m, double volume);

// Invariant suite on built-in cases (ANOVA property, decomposition identity,
// population formulas, Monte-Carlo geometry, set-gram definiteness, ...).
std::vector<ValidationCheck> run_validation(std::uint64_t seed);

}  // namespace setsens
