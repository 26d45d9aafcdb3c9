#pragma once

// Gray-Wyner and multiple-description coding from nested conditional Poisson
// representations. Each scheme samples candidate codebook tuples, mixes at
// most (dimension) of them with a small LP, and sends a 3-bit branch index Q
// followed by Huffman codewords for the induced auxiliaries.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfrl/bitstream.hpp"
#include "sfrl/huffman.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl {

inline constexpr unsigned kBranchHeaderBits = 3;

struct RateLine {
  std::string name;
  double measured;
  double bound;
  bool pass;
};

struct RateReport {
  std::string scheme;
  std::vector<RateLine> lines;
  double slack = 0.0;
  std::size_t support = 0;  // |Q|
  bool pass = false;
};

// --- Gray-Wyner ------------------------------------------------------------

struct GrayWynerInstance {
  JointDistribution source;  // P(x1, x2)
  Kernel u_given_x1x2;       // rows x1 * |X2| + x2
  Kernel y1_given_x1u;       // rows x1 * |U| + u
  Kernel y2_given_x2u;       // rows x2 * |U| + u
  DistortionMatrix d1;
  DistortionMatrix d2;
};

/// Joint over (x1, x2, u, y1, y2).
JointDistribution gw_full_joint(const GrayWynerInstance& inst);

struct GwTargets {
  double i_u;   // I(X1,X2; U)
  double i_1;   // I(X1; Y1 | U)
  double i_2;   // I(X2; Y2 | U)
  double r0;    // i_u + log2(i_u + 1) + 8
  double r1;    // i_1 + log2(i_1 + 1) + 5
  double r2;
  double d1;    // E d1(X1, Y1) under the kernels
  double d2;
};

GwTargets gw_targets(const GrayWynerInstance& inst);

struct GwBranch {
  double weight;
  std::uint64_t candidate;
  std::vector<std::size_t> u_table;   // x1 * |X2| + x2
  std::vector<std::size_t> y1_table;  // x1 * |U| + u
  std::vector<std::size_t> y2_table;  // x2 * |U| + u
  std::vector<double> coords;         // H(U), H(Y1|U), H(Y2|U), E d1, E d2
  HuffmanCode u_code;
  std::vector<std::optional<HuffmanCode>> y1_codes;  // per u
  std::vector<std::optional<HuffmanCode>> y2_codes;
};

struct GwCode {
  GrayWynerInstance instance;
  std::uint64_t seed;
  std::size_t candidates;
  std::size_t distinct_candidates;
  double slack;
  GwTargets targets;
  std::vector<GwBranch> branches;  // at most 5
};

GwCode gw_design(const GrayWynerInstance& inst, std::uint64_t seed, std::size_t candidates,
                 double slack = 0.05);

struct GwDescriptions {
  std::size_t q, u, y1, y2;
  BitString m0, m1, m2;
};

/// `coin` uniform on [0, 1) selects Q by the branch weights.
GwDescriptions gw_encode(const GwCode& code, std::size_t x1, std::size_t x2, double coin);

struct GwDecoded {
  std::size_t q, u, y;
};

GwDecoded gw_decode1(const GwCode& code, const BitString& m0, const BitString& m1);
GwDecoded gw_decode2(const GwCode& code, const BitString& m0, const BitString& m2);

/// Exact expected lengths and distortions by enumeration over (q, x1, x2).
RateReport gw_evaluate(const GwCode& code);

// --- Multiple descriptions -------------------------------------------------

struct MdcInstance {
  JointDistribution joint;  // P(x, u, y0, y1, y2)
  DistortionMatrix d0;
  DistortionMatrix d1;
  DistortionMatrix d2;
};

/// Builds the joint from P_X and nested kernels with rows ordered row-major
/// over the conditioning variables as named.
MdcInstance mdc_instance(const Distribution& px, const Kernel& u_given_x, const Kernel& y1_given_xu,
                         const Kernel& y2_given_xuy1, const Kernel& y0_given_xuy1y2,
                         DistortionMatrix d0, DistortionMatrix d1, DistortionMatrix d2);

/// The same system with the roles of (Y1, d1) and (Y2, d2) exchanged.
MdcInstance mdc_swap_roles(const MdcInstance& inst);

struct MdcRegion {
  double eta;
  double i_xu;           // I(X;U)
  double i_x_y1_u;       // I(X;Y1|U)
  double i_xy1_y2_u;     // I(X,Y1;Y2|U)
  double i_x_y0_y1y2u;   // I(X;Y0|Y1,Y2,U)
  double i_y1_y2_u;      // I(Y1;Y2|U)
  double i_x_all;        // I(X;Y0,Y1,Y2,U)
  double corner_r1;      // first corner point
  double corner_r2;
  double swapped_r1;     // corner with Y1, Y2 exchanged
  double swapped_r2;
  double r1_min;         // region: R1 >= I(X;Y1,U) + 2 eta
  double r2_min;
  double sum_min;
  double d0, d1, d2;     // E d_i(X, Y_i)
  std::vector<double> stage_info;  // I of the four nested stages
  std::vector<bool> stage_absorbed;  // log2(I_stage+1) + 4 <= eta - 3
};

MdcRegion mdc_region(const MdcInstance& inst);

/// Rates of the time-sharing code that uses the first corner with
/// probability alpha, including the 1-bit corner flag in each description.
std::pair<double, double> mdc_time_sharing_rates(const MdcRegion& region, double alpha);
bool mdc_region_contains(const MdcRegion& region, double r1, double r2, double tol = 1e-9);

struct MdcBranch {
  double weight;
  std::uint64_t candidate;
  std::vector<std::size_t> u_table;   // x
  std::vector<std::size_t> y1_table;  // x * |U| + u
  std::vector<std::size_t> y2_table;  // (x * |U| + u) * |Y1| + y1
  std::vector<std::size_t> y0_table;  // ((x * |U| + u) * |Y1| + y1) * |Y2| + y2
  std::vector<double> coords;         // H(U), H(Y1|U), H(Y2|U), H(Y0|Y1Y2U), E d0, E d1, E d2
  HuffmanCode u_code;
  std::vector<std::optional<HuffmanCode>> y1_codes;  // per u
  std::vector<std::optional<HuffmanCode>> y2_codes;  // per u
  std::vector<std::optional<HuffmanCode>> y0_codes;  // per (u * |Y1| + y1) * |Y2| + y2
};

struct MdcCode {
  MdcInstance instance;  // as supplied
  bool swapped;          // second corner: designed on the role-swapped system
  bool flag;             // prepend the 1-bit corner flag to each description
  std::uint64_t seed;
  std::size_t candidates;
  std::size_t distinct_candidates;
  double slack;
  MdcRegion region;              // of the supplied instance
  MdcRegion working_region;      // of the system the code was designed on
  std::vector<double> targets;   // the 7 coordinate targets
  std::vector<MdcBranch> branches;  // at most 7, in the working orientation
};

MdcCode mdc_design(const MdcInstance& inst, std::uint64_t seed, std::size_t candidates,
                   bool swapped = false, bool flag = false, double slack = 0.05);

struct MdcDescriptions {
  std::size_t q, u, y0, y1, y2;
  BitString m1, m2;
};

MdcDescriptions mdc_encode(const MdcCode& code, std::size_t x, double coin);

struct MdcDecoded {
  std::size_t q, u;
  std::optional<std::size_t> y0, y1, y2;
};

MdcDecoded mdc_decode1(const MdcCode& code, const BitString& m1);
MdcDecoded mdc_decode2(const MdcCode& code, const BitString& m2);
MdcDecoded mdc_decode0(const MdcCode& code, const BitString& m1, const BitString& m2);

RateReport mdc_evaluate(const MdcCode& code);

}  // namespace sfrl
