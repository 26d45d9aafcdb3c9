#pragma once

// Helpers shared by the Gray-Wyner and multiple-description code builders.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "sfrl/error.hpp"
#include "sfrl/huffman.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl::detail {

/// Entropy of a probability table laid out as `cells` rows of `width`,
/// conditioned on the row: H(row, col) - H(row).
inline double row_conditional_entropy(const std::vector<double>& table, std::size_t width) {
  double h_joint = entropy_of(table);
  std::vector<double> rows(table.size() / width, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) rows[i / width] += table[i];
  return std::max(0.0, h_joint - entropy_of(rows));
}

/// One Huffman code per row of a probability table; rows without mass get
/// no code.
inline std::vector<std::optional<HuffmanCode>> row_codes(const std::vector<double>& table,
                                                         std::size_t width) {
  std::vector<std::optional<HuffmanCode>> codes(table.size() / width);
  for (std::size_t r = 0; r < codes.size(); ++r) {
    std::vector<double> row(table.begin() + static_cast<std::ptrdiff_t>(r * width),
                            table.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    double mass = 0.0;
    for (double v : row) mass += v;
    if (mass > 0.0) codes[r].emplace(Distribution::from_weights(std::move(row)));
  }
  return codes;
}

inline const HuffmanCode& code_for(const std::vector<std::optional<HuffmanCode>>& codes,
                                   std::size_t cell) {
  if (cell >= codes.size() || !codes[cell]) {
    throw DomainError("no Huffman code for an unreachable conditioning value");
  }
  return *codes[cell];
}

/// Branch index from a uniform coin by inverting the weight CDF.
inline std::size_t branch_from_coin(const std::vector<double>& weights, double coin) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t q = 0; q < weights.size(); ++q) {
    if (weights[q] <= 0.0) continue;
    last = q;
    acc += weights[q];
    if (coin < acc) return q;
  }
  return last;
}

/// Priors P(target | given) as DiscretePriors; cells without mass get a
/// uniform placeholder that is never used.
inline std::vector<DiscretePrior> conditional_priors(const JointDistribution& j, std::size_t target,
                                                     const std::vector<std::size_t>& given) {
  std::vector<DiscretePrior> out;
  for (auto& c : conditionals(j, target, given)) {
    out.emplace_back(c ? *c : Distribution::uniform(j.shape()[target]));
  }
  return out;
}

inline double log_term(double info) { return std::log2(info + 1.0); }

}  // namespace sfrl::detail
