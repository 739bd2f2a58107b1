#pragma once

#include "jitminer/metrics.hpp"
#include "jitminer/model.hpp"

#include <cstdint>

namespace jitminer::test {

struct GradientCase {
  NetworkParams params;
  Eigen::MatrixXd x; // one column per sample
  Eigen::VectorXd y;
  double beta = 1.0;
};

// Small network of random depth and width with a random batch.
GradientCase random_gradient_case(std::uint64_t seed);

struct GradientCheck {
  std::size_t checked = 0;
  std::size_t skipped = 0; // perturbation crossed a ReLU or Smooth L1 kink
  double max_rel_error = 0;
};

// Central differences against gradients(). Relative error is
// |a - n| / max(|a| + |n|, floor).
GradientCheck check_gradients(const GradientCase &c, double h = 1e-6, double floor = 1e-7);

// Rows whose label is decided by a margin on la and ld; every other feature
// is noise.
FeatureMatrix separable_dataset(std::size_t rows, double defective_share, std::uint64_t seed);

} // namespace jitminer::test
