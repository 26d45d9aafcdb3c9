#pragma once

// Finite probability distributions, joints, conditional kernels and the
// information measures computed from them. All measures are in bits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sfrl {

/// Construction tolerance on the total mass of a probability vector.
inline constexpr double kNormalizationTolerance = 1e-12;

/// A probability mass function over symbols 0..size()-1.
class Distribution {
 public:
  /// Validates `probs`: entries finite and >= 0, sum within
  /// kNormalizationTolerance of 1. Accepted inputs are renormalized exactly.
  explicit Distribution(std::vector<double> probs);

  /// Normalizes arbitrary nonnegative weights with positive total.
  static Distribution from_weights(std::vector<double> weights);
  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t symbol);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  std::size_t support_size() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  struct Trusted {};
  Distribution(Trusted, std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

/// A joint pmf over a product of finite alphabets, stored row-major
/// (last axis fastest).
class JointDistribution {
 public:
  JointDistribution(std::vector<std::size_t> shape, std::vector<double> probs);

  /// Two-axis joint from a row-major matrix.
  static JointDistribution from_matrix(const std::vector<std::vector<double>>& rows);
  static JointDistribution product(const Distribution& a, const Distribution& b);
  /// Normalizes nonnegative weights of the given shape.
  static JointDistribution from_weights(std::vector<std::size_t> shape, std::vector<double> weights);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::span<const double> probs() const { return probs_; }

  double at(std::span<const std::size_t> index) const;
  double operator()(std::size_t i, std::size_t j) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;

  /// Joint of the listed axes, in the order given.
  JointDistribution marginal(const std::vector<std::size_t>& axes) const;
  Distribution marginal(std::size_t axis) const;

 private:
  struct Trusted {};
  JointDistribution(Trusted, std::vector<std::size_t> shape, std::vector<double> probs)
      : shape_(std::move(shape)), probs_(std::move(probs)) {}

  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

/// A conditional distribution P_{Y|X}: one output distribution per input.
class Kernel {
 public:
  explicit Kernel(std::vector<Distribution> rows);
  static Kernel from_rows(const std::vector<std::vector<double>>& rows);
  /// Every row equal to `row`.
  static Kernel constant(std::size_t inputs, const Distribution& row);
  static Kernel identity(std::size_t n);
  static Kernel binary_symmetric(double crossover);

  std::size_t input_size() const { return rows_.size(); }
  std::size_t output_size() const { return rows_.front().size(); }
  const Distribution& row(std::size_t x) const { return rows_[x]; }
  const std::vector<Distribution>& rows() const { return rows_; }

  Distribution output_marginal(const Distribution& input) const;
  JointDistribution joint(const Distribution& input) const;

 private:
  std::vector<Distribution> rows_;
};

/// Distortion measure d(x, y) with entries in [0, +inf].
class DistortionMatrix {
 public:
  DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static DistortionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DistortionMatrix hamming(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return values_[x * cols_ + y]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

double entropy(const Distribution& d);
double entropy(const JointDistribution& j);
/// Entropy of a nonnegative vector that already sums to one (no validation).
double entropy_of(std::span<const double> probs);
double binary_entropy(double p);

/// D(p || q) in bits; +inf when supp p escapes supp q.
double kl_divergence(const Distribution& p, const Distribution& q);

/// I(X;Y) of a two-axis joint.
double mutual_information(const JointDistribution& j);
/// I(A;B|C) for disjoint axis groups of a joint.
double mutual_information(const JointDistribution& j, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b,
                          const std::vector<std::size_t>& given = {});

/// H(joint) - H(marginal on given_axis).
double conditional_entropy(const JointDistribution& j, std::size_t given_axis);
/// H(target | given) for axis groups.
double conditional_entropy(const JointDistribution& j, const std::vector<std::size_t>& target,
                           const std::vector<std::size_t>& given);

/// Half the L1 distance.
double total_variation(const Distribution& p, const Distribution& q);

/// Empirical pmf from counts.
Distribution empirical(std::span<const std::uint64_t> counts);

/// n-fold i.i.d. product; symbol index of (s_1..s_n) is row-major.
Distribution power(const Distribution& d, unsigned n);
/// n-fold memoryless product kernel.
Kernel power(const Kernel& k, unsigned n);

/// P(target | given) for every assignment of the given axes, indexed by the
/// row-major flat index over `given`. Zero-mass assignments map to nullopt.
std::vector<std::optional<Distribution>> conditionals(const JointDistribution& j,
                                                      std::size_t target,
                                                      const std::vector<std::size_t>& given);

}  // namespace sfrl
