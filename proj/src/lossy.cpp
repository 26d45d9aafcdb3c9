#include "sfrl/lossy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sfrl/error.hpp"
#include "sfrl/rng.hpp"

namespace sfrl {

namespace {

constexpr std::uint64_t kMixtureDomain = 0x4c4f535359ULL;  // candidate codebooks

// Rows of zero-probability inputs may charge symbols outside the
// reconstruction marginal; they are replaced by the marginal itself.
Kernel coding_kernel(const Distribution& source, const Kernel& k, const Distribution& marginal) {
  std::vector<Distribution> rows = k.rows();
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (source[x] == 0.0) rows[x] = marginal;
  }
  return Kernel(std::move(rows));
}

RdSolution design_rd(const Distribution& source, const DistortionMatrix& d, double target) {
  if (d.rows() != source.size()) throw ShapeError("distortion rows must match the source alphabet");
  RdSolution rd = blahut_arimoto_rate_distortion(source, d, target);
  Distribution marginal = rd.kernel.output_marginal(source);
  rd.kernel = coding_kernel(source, rd.kernel, marginal);
  return rd;
}

double branch_distortion(const Distribution& source, const DistortionMatrix& d,
                         const InducedFunction& f) {
  double e = 0.0;
  for (std::size_t x = 0; x < source.size(); ++x) {
    if (source[x] > 0.0) e += source[x] * d(x, f.table[x]);
  }
  return e;
}

Distribution pushforward(const Distribution& source, const InducedFunction& f, std::size_t ny) {
  std::vector<double> w(ny, 0.0);
  for (std::size_t x = 0; x < source.size(); ++x) w[f.table[x]] += source[x];
  return Distribution::from_weights(std::move(w));
}

}  // namespace

SoftLossyCode design_soft(const Distribution& source, const DistortionMatrix& d, double target,
                          std::uint64_t seed, std::uint64_t codebook_stream) {
  RdSolution rd = design_rd(source, d, target);
  DiscretePrior prior(rd.kernel.output_marginal(source));
  ZipfCode zipf = zipf_build(zipf_params(rd.rate));
  return SoftLossyCode{source, d, target, std::move(rd), std::move(prior), seed, codebook_stream,
                       std::move(zipf)};
}

SoftEncoding soft_encode_detail(const SoftLossyCode& code, std::size_t x) {
  if (x >= code.source.size()) throw DomainError("soft_encode: source symbol out of range");
  PfrCodebook cb(code.seed, code.codebook_stream);
  const SelectionOutcome sel = select(cb, code.rd.kernel.row(x), code.prior);
  SoftEncoding e{sel.k, sel.y, {}};
  code.zipf.encode_to(sel.k, e.bits);
  return e;
}

BitString soft_encode(const SoftLossyCode& code, std::size_t x) {
  return soft_encode_detail(code, x).bits;
}

std::size_t soft_decode(const SoftLossyCode& code, BitReader& in) {
  const std::uint64_t k = code.zipf.decode(in);
  PfrCodebook cb(code.seed, code.codebook_stream);
  return code.prior.symbol_for(cb.point(k).mark);
}

std::size_t soft_decode(const SoftLossyCode& code, const BitString& bits) {
  BitReader in(bits);
  return soft_decode(code, in);
}

CodebookStats soft_codebook_stats(const SoftLossyCode& code, std::uint64_t codebook_stream) {
  PfrCodebook cb(code.seed, codebook_stream);
  CodebookStats s{0.0, 0.0};
  for (std::size_t x = 0; x < code.source.size(); ++x) {
    if (code.source[x] == 0.0) continue;
    const SelectionOutcome sel = select(cb, code.rd.kernel.row(x), code.prior);
    s.expected_length += code.source[x] * code.zipf.length_of(sel.k);
    s.expected_distortion += code.source[x] * code.distortion(x, sel.y);
  }
  return s;
}

MixtureLossyCode design_mixture(const Distribution& source, const DistortionMatrix& d, double target,
                                std::uint64_t seed, std::size_t candidates, double slack) {
  if (candidates < 2) throw ValidationError("design_mixture: at least two candidates required");
  RdSolution rd = design_rd(source, d, target);
  const Distribution marginal = rd.kernel.output_marginal(source);
  const DiscretePrior prior(marginal);
  const std::size_t ny = d.cols();

  // Candidate codebooks, deduplicated by their induced function.
  std::map<std::vector<std::size_t>, std::size_t> seen;
  std::vector<std::uint64_t> streams;
  std::vector<InducedFunction> functions;
  std::vector<std::vector<double>> points;
  for (std::size_t j = 0; j < candidates; ++j) {
    const std::uint64_t stream = derive_stream(kMixtureDomain, j);
    PfrCodebook cb(seed, stream);
    InducedFunction f = induced_function(cb, rd.kernel, prior);
    if (!seen.emplace(f.table, functions.size()).second) continue;
    const Distribution rec = pushforward(source, f, ny);
    points.push_back({entropy(rec), branch_distortion(source, d, f)});
    streams.push_back(stream);
    functions.push_back(std::move(f));
  }

  const double info = rd.rate;
  const double eta = std::log2(info + 1.0) + 4.0;
  const double d_target = std::min(target, rd.distortion);
  MixtureSolution mix;
  try {
    mix = minimizing_mix(points, {info + eta + slack, d_target}, 0, 1e-9);
  } catch (const InfeasibleError& e) {
    throw DesignError(std::string("design_mixture: no mixture of the ") +
                      std::to_string(candidates) + " candidates meets the targets; " +
                      "increase the candidate count (" + e.what() + ")");
  }

  MixtureLossyCode code{source, d, target, std::move(rd), seed, candidates, functions.size(),
                        eta, slack, {}, 0.0, 0.0, 0.0, 0.0};
  std::vector<std::size_t> idx = mix.support;
  std::vector<double> w = mix.weights;
  if (idx.size() == 1) {
    idx.push_back(idx.front());
    w = {1.0, 0.0};
  }
  for (std::size_t q = 0; q < 2; ++q) {
    const InducedFunction& f = functions[idx[q]];
    Distribution rec = pushforward(source, f, ny);
    HuffmanCode h(rec);
    code.branches.push_back(LossyBranch{streams[idx[q]], f, rec, points[idx[q]][0],
                                        points[idx[q]][1], std::move(h)});
  }
  code.lambda_mix = w[1];
  code.design_length = 1.0;
  for (std::size_t q = 0; q < 2; ++q) {
    const double wq = q == 0 ? 1.0 - code.lambda_mix : code.lambda_mix;
    code.design_length += wq * code.branches[q].huffman.expected_length();
    code.design_distortion += wq * code.branches[q].distortion;
    code.design_entropy += wq * code.branches[q].entropy;
  }
  return code;
}

BitString mixture_encode(const MixtureLossyCode& code, std::size_t x, double coin) {
  if (x >= code.source.size()) throw DomainError("mixture_encode: source symbol out of range");
  const std::size_t q = coin < code.lambda_mix ? 1 : 0;
  const LossyBranch& b = code.branches[q];
  BitString out;
  out.push_back(q == 1);
  b.huffman.encode_to(b.function.table[x], out);
  return out;
}

std::size_t mixture_decode(const MixtureLossyCode& code, BitReader& in) {
  const std::size_t q = in.read_bit() ? 1 : 0;
  return code.branches[q].huffman.decode(in);
}

std::size_t mixture_decode(const MixtureLossyCode& code, const BitString& bits) {
  BitReader in(bits);
  return mixture_decode(code, in);
}

LossyReport evaluate_soft(const SoftLossyCode& code, std::size_t codebooks) {
  if (codebooks < 2) throw ValidationError("evaluate_soft: at least two codebooks required");
  double sl = 0.0, sl2 = 0.0, sd = 0.0, sd2 = 0.0;
  for (std::uint64_t s = 0; s < codebooks; ++s) {
    const CodebookStats st = soft_codebook_stats(code, s);
    sl += st.expected_length;
    sl2 += st.expected_length * st.expected_length;
    sd += st.expected_distortion;
    sd2 += st.expected_distortion * st.expected_distortion;
  }
  const double n = static_cast<double>(codebooks);
  auto se = [n](double s, double s2) {
    const double m = s / n;
    return std::sqrt(std::max(0.0, (s2 - n * m * m) / (n - 1.0)) / n);
  };
  LossyReport r;
  r.mixture = false;
  r.rate = code.rd.rate;
  r.target_distortion = code.target_distortion;
  r.expected_length = sl / n;
  r.expected_length_se = se(sl, sl2);
  r.expected_distortion = sd / n;
  r.expected_distortion_se = se(sd, sd2);
  r.length_bound = r.rate + std::log2(r.rate + 1.0) + 6.0;
  r.codebooks = codebooks;
  r.pass = r.expected_length <= r.length_bound + 3.0 * r.expected_length_se &&
           r.expected_distortion <= r.target_distortion + 3.0 * r.expected_distortion_se + 1e-9;
  return r;
}

LossyReport evaluate_mixture(const MixtureLossyCode& code) {
  LossyReport r;
  r.mixture = true;
  r.rate = code.rd.rate;
  r.target_distortion = code.target_distortion;
  r.expected_length = code.design_length;
  r.expected_distortion = code.design_distortion;
  r.length_bound = r.rate + std::log2(r.rate + 1.0) + 6.0;
  r.slack = code.slack;
  r.codebooks = code.candidates;
  r.pass = r.expected_length <= r.length_bound && r.expected_distortion <= r.target_distortion + 1e-9;
  return r;
}

DistortionMatrix block_distortion(const DistortionMatrix& d, unsigned n) {
  if (n == 0) throw ValidationError("block_distortion: n must be positive");
  std::size_t rows = 1, cols = 1;
  for (unsigned i = 0; i < n; ++i) {
    rows *= d.rows();
    cols *= d.cols();
  }
  std::vector<double> v(rows * cols, 0.0);
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) {
      double total = 0.0;
      std::size_t xr = x, yr = y;
      for (unsigned i = 0; i < n; ++i) {
        total += d(xr % d.rows(), yr % d.cols());
        xr /= d.rows();
        yr /= d.cols();
      }
      v[x * cols + y] = total / n;
    }
  }
  return DistortionMatrix(rows, cols, std::move(v));
}

}  // namespace sfrl
