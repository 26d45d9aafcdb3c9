#pragma once

// Poisson functional representation. A codebook is a lazily realized marked
// Poisson process {(mark_i, t_i)}: arrival times are cumulative Exp(1)
// increments and marks are i.i.d. uniform on [0, 1). A mark becomes an output
// symbol through the quantile function of a prior, so one codebook can serve
// any prior (and any conditioning value) without being regenerated.
//
// Given a conditional P_{Y|X=x}, the selected index is
//   k = argmin_i t_i * p_Y(y_i) / p_{Y|X}(y_i | x),
// and y_k has law P_{Y|X=x} exactly.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "sfrl/probspace.hpp"

namespace sfrl {

inline constexpr std::size_t kDefaultPointCap = 1'000'000;

struct PoissonPoint {
  double mark;  // uniform on [0, 1)
  double time;  // arrival time, strictly increasing in the index
};

class PfrCodebook {
 public:
  PfrCodebook(std::uint64_t seed, std::uint64_t substream, std::size_t cap = kDefaultPointCap);

  /// Point i (1-based), realized on demand. Throws BudgetError past the cap.
  const PoissonPoint& point(std::size_t i);
  std::size_t realized() const { return points_.size(); }
  /// Realizes points up to index n (clamped to the cap).
  void extend(std::size_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }
  std::size_t cap() const { return cap_; }

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::size_t cap_;
  std::uint64_t counter_ = 0;
  std::vector<PoissonPoint> points_;
};

/// Codebook with `initial_points` already realized.
PfrCodebook build_codebook(std::uint64_t seed, std::uint64_t substream,
                           std::size_t initial_points = 1, std::size_t cap = kDefaultPointCap);

/// A finite prior P_Y together with its cumulative sums for mark mapping.
class DiscretePrior {
 public:
  explicit DiscretePrior(Distribution pmf);

  const Distribution& pmf() const { return pmf_; }
  std::size_t size() const { return pmf_.size(); }
  double operator[](std::size_t y) const { return pmf_[y]; }
  /// Quantile map: the symbol whose CDF interval contains `mark`.
  std::size_t symbol_for(double mark) const;

 private:
  Distribution pmf_;
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

/// One-dimensional continuous prior given by its quantile function and
/// density. `ratio_bound` bounds dP_{Y|X}/dP_Y over every conditional that
/// will be used with it.
struct ContinuousPrior {
  std::function<double(double)> quantile;
  std::function<double(double)> density;
  double ratio_bound = 1.0;
};

/// Numerical mass of the prior density over its quantile range; throws
/// ValidationError if it differs from 1 by more than 1e-6.
double check_density(const ContinuousPrior& prior, std::size_t intervals = 200000);

struct SelectionOutcome {
  std::size_t k = 0;                // winning index, 1-based
  std::size_t y = 0;                // output symbol
  double score = 0.0;               // t_k * p_Y(y) / p_{Y|X}(y|x)
  std::size_t points_examined = 0;
};

struct ContinuousOutcome {
  std::size_t k = 0;
  double y = 0.0;
  double score = 0.0;
  std::size_t points_examined = 0;
};

/// Runs the selection rule on `cb` for the given conditional. Scanning stops
/// at the first point with t_i * r_min > best score, r_min being the smallest
/// ratio p_Y/p_{Y|X} over the conditional's support. Ties go to the smaller
/// index. Throws PreconditionError if the conditional charges a symbol the
/// prior does not, BudgetError if the cap is reached first.
SelectionOutcome select(PfrCodebook& cb, const Distribution& conditional, const DiscretePrior& prior);

/// Continuous counterpart; `conditional_density` is the density of P_{Y|X=x}.
/// Stops once t_i / ratio_bound exceeds the best score.
ContinuousOutcome select_continuous(PfrCodebook& cb,
                                    const std::function<double(double)>& conditional_density,
                                    const ContinuousPrior& prior);

/// z_y = p_Y(y) * (first arrival time with mark symbol y); +inf for
/// zero-mass symbols. argmin_y z_y / p_{Y|X}(y|x) reproduces select().
std::vector<double> collapse_exponentials(PfrCodebook& cb, const DiscretePrior& prior);

/// The map x -> g(x, z) for a fixed codebook z.
struct InducedFunction {
  std::vector<std::size_t> table;
  friend bool operator==(const InducedFunction&, const InducedFunction&) = default;
};

InducedFunction induced_function(PfrCodebook& cb, const Kernel& kernel, const DiscretePrior& prior);

/// Conditional application: the same codebook, with the prior chosen by the
/// conditioning value u. The marks are shared, so the codebook stays
/// independent of u.
SelectionOutcome conditional_select(PfrCodebook& cb, std::size_t u, const Distribution& conditional,
                                    const std::vector<DiscretePrior>& prior_given_u);

/// Base-2 log of e divided by e, the constant in the index bound.
inline constexpr double kLog2eOverE = std::numbers::log2e / std::numbers::e;

}  // namespace sfrl
