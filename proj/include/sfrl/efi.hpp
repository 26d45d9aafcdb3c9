#pragma once

// Excess functional information: the exact lower bound for discrete joints,
// a Monte Carlo upper estimate from Poisson functional representations, the
// tightness family Y = X + V mod 2^k, and the maximum-entropy bound for
// positive integer variables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sfrl/probspace.hpp"

namespace sfrl {

/// -sum_y int_0^1 Phi_y(t) log2 Phi_y(t) dt - I(X;Y), with
/// Phi_y(t) = P_X{p(y|X) >= t}, for a joint over axes (x, y).
double psi_lower_bound(const JointDistribution& joint);

/// The integral term for one output symbol: `values[i]` = p(y|x_i) occurs
/// with probability `weights[i]` = p(x_i). Exact sum over segments.
double phi_entropy_integral(const std::vector<double>& values, const std::vector<double>& weights);

struct PsiEstimate {
  double value = 0.0;  // mean H(g(X,z)) - I(X;Y)
  double se = 0.0;
  std::size_t trials = 0;
};

/// Averages the exact entropy of Y = g(X, z) over `trials` codebooks z.
PsiEstimate psi_upper_estimate(const JointDistribution& joint, std::size_t trials, std::uint64_t seed);

/// Upper estimate for the independent pair (X1,X2) -> (Y1,Y2) with one
/// codebook per component in each trial.
PsiEstimate psi_upper_estimate_product(const JointDistribution& first, const JointDistribution& second,
                                       std::size_t trials, std::uint64_t seed);

struct EfiReport {
  double lower_bound = 0.0;
  double upper_estimate = 0.0;
  double upper_se = 0.0;
  double i_xy = 0.0;
  double sfrl_bound = 0.0;  // log2(I+1) + 4
  bool equality_case = false;  // |Y| = 2
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool sandwich_pass = false;
  bool equality_pass = false;  // true when not an equality case
  bool pass = false;
};

EfiReport efi_evaluate(const JointDistribution& joint, std::size_t trials, std::uint64_t seed);

inline constexpr unsigned kLbExampleMaxK = 20;
inline constexpr unsigned kLbExampleJointMaxK = 10;

struct LbExampleFamily {
  unsigned k = 0;
  double gamma = 0.0;
  Distribution p_v = Distribution::uniform(1);
  std::optional<JointDistribution> joint;  // materialized for k <= kLbExampleJointMaxK
  double h_v = 0.0;            // direct
  double h_v_closed = 0.0;     // closed form
  double i_xy = 0.0;           // k - H(V), direct
  double i_closed = 0.0;
  double psi_lb = 0.0;         // exact lower bound
  double tightness_floor = 0.0;  // log2(I+1) - 1
  bool closed_forms_agree = false;
  bool pass = false;           // agreement and psi_lb >= tightness_floor
};

LbExampleFamily lb_example_build(unsigned k);

/// H(Theta) <= E[log2 Theta] + log2(E[log2 Theta] + 1) + 1 for Theta in {1, 2, ...}.
double entropy_bound(double mean_log);

struct EntropyBoundSweep {
  std::size_t pmfs = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;  // min of bound - H
};

/// Random pmfs on {1..support}, mixing Dirichlet(1) and sparse draws.
EntropyBoundSweep entropy_bound_sweep(std::size_t pmfs, std::size_t support, std::uint64_t seed);

}  // namespace sfrl
