#include "sfrl/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sfrl/error.hpp"

namespace sfrl {

namespace {

void check_entries(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string(what) + ": entries must be finite and nonnegative");
    }
  }
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

std::size_t product_of(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

// --- Distribution ----------------------------------------------------------

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("distribution: empty alphabet");
  check_entries(probs_, "distribution");
  double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw ValidationError("distribution: total mass " + std::to_string(total) +
                          " is not within tolerance of 1");
  }
  for (double& p : probs_) p /= total;
}

Distribution Distribution::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw ValidationError("distribution: empty alphabet");
  check_entries(weights, "weights");
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("weights: total must be positive");
  for (double& w : weights) w /= total;
  return Distribution(Trusted{}, std::move(weights));
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("distribution: empty alphabet");
  return Distribution(Trusted{}, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t symbol) {
  if (symbol >= n) throw ShapeError("point_mass: symbol out of range");
  std::vector<double> p(n, 0.0);
  p[symbol] = 1.0;
  return Distribution(Trusted{}, std::move(p));
}

std::size_t Distribution::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
}

// --- JointDistribution -----------------------------------------------------

JointDistribution::JointDistribution(std::vector<std::size_t> shape, std::vector<double> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
  if (shape_.empty()) throw ShapeError("joint: empty shape");
  for (auto s : shape_) {
    if (s == 0) throw ShapeError("joint: zero-size axis");
  }
  if (product_of(shape_) != probs_.size()) throw ShapeError("joint: shape does not match data");
  check_entries(probs_, "joint");
  double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw ValidationError("joint: total mass " + std::to_string(total) +
                          " is not within tolerance of 1");
  }
  for (double& p : probs_) p /= total;
}

JointDistribution JointDistribution::from_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeError("joint: empty matrix");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw ShapeError("joint: ragged matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return JointDistribution({rows.size(), cols}, std::move(flat));
}

JointDistribution JointDistribution::product(const Distribution& a, const Distribution& b) {
  std::vector<double> flat(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) flat[i * b.size() + j] = a[i] * b[j];
  }
  return from_weights({a.size(), b.size()}, std::move(flat));
}

JointDistribution JointDistribution::from_weights(std::vector<std::size_t> shape,
                                                  std::vector<double> weights) {
  if (product_of(shape) != weights.size()) throw ShapeError("joint: shape does not match data");
  check_entries(weights, "joint weights");
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("joint weights: total must be positive");
  for (double& w : weights) w /= total;
  return JointDistribution(Trusted{}, std::move(shape), std::move(weights));
}

std::size_t JointDistribution::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw ShapeError("joint: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (index[a] >= shape_[a]) throw ShapeError("joint: index out of range");
    flat = flat * shape_[a] + index[a];
  }
  return flat;
}

double JointDistribution::at(std::span<const std::size_t> index) const {
  return probs_[flat_index(index)];
}

double JointDistribution::operator()(std::size_t i, std::size_t j) const {
  const std::size_t idx[2] = {i, j};
  return at(idx);
}

JointDistribution JointDistribution::marginal(const std::vector<std::size_t>& axes) const {
  if (axes.empty()) throw ShapeError("marginal: no axes");
  std::vector<std::size_t> out_shape;
  std::vector<bool> seen(shape_.size(), false);
  for (auto a : axes) {
    if (a >= shape_.size()) throw ShapeError("marginal: axis out of range");
    if (seen[a]) throw ShapeError("marginal: repeated axis");
    seen[a] = true;
    out_shape.push_back(shape_[a]);
  }
  // Stride of each source axis inside the output array (0 when summed out).
  std::vector<std::size_t> out_stride(shape_.size(), 0);
  std::size_t stride = 1;
  for (std::size_t i = axes.size(); i-- > 0;) {
    out_stride[axes[i]] = stride;
    stride *= shape_[axes[i]];
  }
  std::vector<double> out(stride, 0.0);
  std::vector<std::size_t> idx(shape_.size(), 0);
  std::size_t out_pos = 0;
  for (double p : probs_) {
    out[out_pos] += p;
    for (std::size_t a = shape_.size(); a-- > 0;) {
      out_pos += out_stride[a];
      if (++idx[a] < shape_[a]) break;
      out_pos -= out_stride[a] * shape_[a];
      idx[a] = 0;
    }
  }
  return from_weights(std::move(out_shape), std::move(out));
}

Distribution JointDistribution::marginal(std::size_t axis) const {
  auto m = marginal(std::vector<std::size_t>{axis});
  return Distribution::from_weights(std::vector<double>(m.probs().begin(), m.probs().end()));
}

// --- Kernel ----------------------------------------------------------------

Kernel::Kernel(std::vector<Distribution> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ShapeError("kernel: no rows");
  for (const auto& r : rows_) {
    if (r.size() != rows_.front().size()) throw ShapeError("kernel: rows differ in size");
  }
}

Kernel Kernel::from_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<Distribution> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(r);
  return Kernel(std::move(out));
}

Kernel Kernel::constant(std::size_t inputs, const Distribution& row) {
  return Kernel(std::vector<Distribution>(inputs, row));
}

Kernel Kernel::identity(std::size_t n) {
  std::vector<Distribution> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(Distribution::point_mass(n, i));
  return Kernel(std::move(rows));
}

Kernel Kernel::binary_symmetric(double crossover) {
  return from_rows({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

Distribution Kernel::output_marginal(const Distribution& input) const {
  if (input.size() != input_size()) throw ShapeError("kernel: input alphabet mismatch");
  std::vector<double> out(output_size(), 0.0);
  for (std::size_t x = 0; x < input_size(); ++x) {
    if (input[x] == 0.0) continue;
    for (std::size_t y = 0; y < output_size(); ++y) out[y] += input[x] * rows_[x][y];
  }
  return Distribution::from_weights(std::move(out));
}

JointDistribution Kernel::joint(const Distribution& input) const {
  if (input.size() != input_size()) throw ShapeError("kernel: input alphabet mismatch");
  std::vector<double> flat(input_size() * output_size());
  for (std::size_t x = 0; x < input_size(); ++x) {
    for (std::size_t y = 0; y < output_size(); ++y) {
      flat[x * output_size() + y] = input[x] * rows_[x][y];
    }
  }
  return JointDistribution::from_weights({input_size(), output_size()}, std::move(flat));
}

// --- DistortionMatrix ------------------------------------------------------

DistortionMatrix::DistortionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) throw ShapeError("distortion: empty matrix");
  if (values_.size() != rows_ * cols_) throw ShapeError("distortion: shape does not match data");
  for (double v : values_) {
    if (std::isnan(v) || v < 0.0) throw ValidationError("distortion: entries must lie in [0, inf]");
  }
}

DistortionMatrix DistortionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeError("distortion: empty matrix");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ShapeError("distortion: ragged matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return DistortionMatrix(rows.size(), rows.front().size(), std::move(flat));
}

DistortionMatrix DistortionMatrix::hamming(std::size_t n) {
  std::vector<double> v(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 0.0;
  return DistortionMatrix(n, n, std::move(v));
}

// --- information measures --------------------------------------------------

double entropy_of(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h -= plogp(p);
  return std::max(h, 0.0);
}

double entropy(const Distribution& d) { return entropy_of(d.probs()); }

double entropy(const JointDistribution& j) { return entropy_of(j.probs()); }

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binary_entropy: p outside [0,1]");
  return -plogp(p) - plogp(1.0 - p);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("kl_divergence: alphabet sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double mutual_information(const JointDistribution& j) {
  if (j.rank() != 2) throw ShapeError("mutual_information: joint must have two axes");
  return mutual_information(j, {0}, {1});
}

namespace {

double entropy_of_axes(const JointDistribution& j, std::vector<std::size_t> axes) {
  if (axes.empty()) return 0.0;
  std::sort(axes.begin(), axes.end());
  return entropy(j.marginal(axes));
}

std::vector<std::size_t> join(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

double mutual_information(const JointDistribution& j, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b,
                          const std::vector<std::size_t>& given) {
  if (a.empty() || b.empty()) throw ShapeError("mutual_information: empty axis group");
  auto all = join(join(a, b), given);
  std::vector<bool> seen(j.rank(), false);
  for (auto ax : all) {
    if (ax >= j.rank()) throw ShapeError("mutual_information: axis out of range");
    if (seen[ax]) throw ShapeError("mutual_information: axis groups overlap");
    seen[ax] = true;
  }
  double i = entropy_of_axes(j, join(a, given)) + entropy_of_axes(j, join(b, given)) -
             entropy_of_axes(j, all) - entropy_of_axes(j, given);
  return std::max(i, 0.0);
}

double conditional_entropy(const JointDistribution& j, std::size_t given_axis) {
  if (given_axis >= j.rank()) throw ShapeError("conditional_entropy: axis out of range");
  return std::max(entropy(j) - entropy(j.marginal(given_axis)), 0.0);
}

double conditional_entropy(const JointDistribution& j, const std::vector<std::size_t>& target,
                           const std::vector<std::size_t>& given) {
  for (auto ax : join(target, given)) {
    if (ax >= j.rank()) throw ShapeError("conditional_entropy: axis out of range");
  }
  return std::max(entropy_of_axes(j, join(target, given)) - entropy_of_axes(j, given), 0.0);
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("total_variation: alphabet sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

Distribution empirical(std::span<const std::uint64_t> counts) {
  std::vector<double> w(counts.begin(), counts.end());
  return Distribution::from_weights(std::move(w));
}

Distribution power(const Distribution& d, unsigned n) {
  if (n == 0) throw ValidationError("power: n must be positive");
  std::vector<double> cur(d.probs().begin(), d.probs().end());
  for (unsigned r = 1; r < n; ++r) {
    std::vector<double> next;
    next.reserve(cur.size() * d.size());
    for (double a : cur) {
      for (double b : d.probs()) next.push_back(a * b);
    }
    cur = std::move(next);
  }
  return Distribution::from_weights(std::move(cur));
}

Kernel power(const Kernel& k, unsigned n) {
  if (n == 0) throw ValidationError("power: n must be positive");
  Kernel cur = k;
  for (unsigned r = 1; r < n; ++r) {
    std::vector<Distribution> rows;
    rows.reserve(cur.input_size() * k.input_size());
    for (std::size_t a = 0; a < cur.input_size(); ++a) {
      for (std::size_t b = 0; b < k.input_size(); ++b) {
        std::vector<double> row;
        row.reserve(cur.output_size() * k.output_size());
        for (double pa : cur.row(a).probs()) {
          for (double pb : k.row(b).probs()) row.push_back(pa * pb);
        }
        rows.push_back(Distribution::from_weights(std::move(row)));
      }
    }
    cur = Kernel(std::move(rows));
  }
  return cur;
}

std::vector<std::optional<Distribution>> conditionals(const JointDistribution& j,
                                                      std::size_t target,
                                                      const std::vector<std::size_t>& given) {
  for (auto ax : given) {
    if (ax == target) throw ShapeError("conditionals: target axis also conditioned on");
  }
  auto axes = given;
  axes.push_back(target);
  auto m = given.empty() ? j.marginal(std::vector<std::size_t>{target}) : j.marginal(axes);
  const std::size_t width = j.shape()[target];
  const std::size_t cells = m.probs().size() / width;
  std::vector<std::optional<Distribution>> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    auto begin = m.probs().begin() + static_cast<std::ptrdiff_t>(c * width);
    std::vector<double> row(begin, begin + static_cast<std::ptrdiff_t>(width));
    double mass = std::accumulate(row.begin(), row.end(), 0.0);
    if (mass > 0.0) out[c] = Distribution::from_weights(std::move(row));
  }
  return out;
}

}  // namespace sfrl
