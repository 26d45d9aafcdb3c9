#pragma once

// Blahut-Arimoto solvers for channel capacity and the rate-distortion
// function, and a small simplex routine that finds convex mixtures of
// candidate points dominating a target vector.

#include <cstddef>
#include <optional>
#include <vector>

#include "sfrl/probspace.hpp"

namespace sfrl {

struct CapacitySolution {
  double capacity;             // bits
  Distribution input;          // capacity-achieving input pmf
  Distribution output;         // induced output marginal
  std::size_t iterations;
  double gap;                  // certified upper minus lower bound, bits
};

/// Capacity of `channel` within `tol` bits. The iteration starts at the
/// uniform input and stops once max_x D(W_x || q) - I(p, W) <= tol.
CapacitySolution blahut_arimoto_capacity(const Kernel& channel, double tol = 1e-9,
                                         std::size_t max_iter = 100000);

struct RdSolution {
  Kernel kernel;        // optimizing P_{Y|X}
  double rate;          // I(X;Y) of `kernel`, bits
  double distortion;    // E d(X,Y) under `kernel`
  std::size_t iterations;
  double gap;           // bound on rate - R(D), bits
  double slope;         // Lagrange parameter (nats per distortion unit); inf at D_min
};

/// Smallest and largest distortions of interest: D_min = E min_y d(X,y) and
/// D_max = min_y E d(X,y), past which R(D) = 0.
double min_distortion(const Distribution& source, const DistortionMatrix& d);
double zero_rate_distortion(const Distribution& source, const DistortionMatrix& d);

/// R(D) and an optimizing kernel. Infinite distortion entries are excluded
/// transitions. Throws InfeasibleError when D < D_min.
RdSolution blahut_arimoto_rate_distortion(const Distribution& source, const DistortionMatrix& d,
                                          double target_distortion, double tol = 1e-9,
                                          std::size_t max_iter = 200000);

struct MixtureSolution {
  std::vector<double> weights;        // one per support point, sum to 1
  std::vector<std::size_t> support;   // indices into the candidate list
  std::vector<double> achieved;       // mixed coordinates
};

/// Convex combination of `points` whose every coordinate is <= target + tol,
/// supported on at most dim + 1 points (a basic feasible solution).
MixtureSolution caratheodory_mix(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& target, double tol = 1e-9);

/// As caratheodory_mix, but coordinate `objective` is minimized instead of
/// constrained, so the support has at most dim points. Throws InfeasibleError
/// when the remaining coordinates cannot be met or the minimized coordinate
/// still exceeds its target + tol.
MixtureSolution minimizing_mix(const std::vector<std::vector<double>>& points,
                               const std::vector<double>& target, std::size_t objective,
                               double tol = 1e-9);

}  // namespace sfrl
