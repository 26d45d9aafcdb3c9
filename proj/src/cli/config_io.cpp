#include <fstream>
#include <iterator>
#include <sstream>

#include "cli_internal.hpp"

namespace sfrl::cli {

namespace fs = std::filesystem;

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> load_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string config_digest(const json& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << h;
  return s.str();
}

namespace {

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<std::vector<double>> matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a non-empty matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(numbers(r, what));
  return rows;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Distribution parse_distribution(const json& j) {
  if (j.is_array()) return Distribution(numbers(j, "pmf"));
  if (j.is_object()) {
    if (j.contains("pmf")) return Distribution(numbers(j.at("pmf"), "pmf"));
    if (j.contains("weights")) return Distribution::from_weights(numbers(j.at("weights"), "weights"));
    if (j.contains("uniform")) return Distribution::uniform(j.at("uniform").get<std::size_t>());
    if (j.contains("bernoulli")) {
      const double p = j.at("bernoulli").get<double>();
      return Distribution({1.0 - p, p});
    }
  }
  throw ConfigError("distribution must be an array or an object with pmf, weights, uniform or bernoulli");
}

Kernel parse_kernel(const json& j) {
  if (j.is_array()) return Kernel::from_rows(matrix(j, "kernel"));
  if (j.is_object()) {
    if (j.contains("rows")) return Kernel::from_rows(matrix(j.at("rows"), "kernel rows"));
    if (j.contains("bsc")) return Kernel::binary_symmetric(j.at("bsc").get<double>());
    if (j.contains("z")) {
      const double p = j.at("z").get<double>();
      return Kernel::from_rows({{1.0, 0.0}, {p, 1.0 - p}});
    }
    if (j.contains("identity")) return Kernel::identity(j.at("identity").get<std::size_t>());
  }
  throw ConfigError("kernel must be a matrix or an object with rows, bsc, z or identity");
}

DistortionMatrix parse_distortion(const json& j, std::size_t rows, std::size_t cols) {
  if (j.is_string() && j.get<std::string>() == "hamming") {
    std::vector<double> v(rows * cols);
    for (std::size_t x = 0; x < rows; ++x) {
      for (std::size_t y = 0; y < cols; ++y) v[x * cols + y] = x == y ? 0.0 : 1.0;
    }
    return DistortionMatrix(rows, cols, std::move(v));
  }
  DistortionMatrix d = DistortionMatrix::from_rows(matrix(j, "distortion"));
  if (d.rows() != rows || d.cols() != cols) throw ConfigError("distortion matrix has the wrong shape");
  return d;
}

JointDistribution parse_joint(const json& j) {
  if (j.is_object() && j.contains("matrix")) return JointDistribution::from_matrix(matrix(j.at("matrix"), "joint"));
  if (j.is_object() && j.contains("source") && j.contains("kernel")) {
    return parse_kernel(j.at("kernel")).joint(parse_distribution(j.at("source")));
  }
  throw ConfigError("joint must have 'matrix' or both 'source' and 'kernel'");
}

GrayWynerInstance parse_gray_wyner(const json& j) {
  JointDistribution src = JointDistribution::from_matrix(matrix(field(j, "source"), "source"));
  Kernel u = parse_kernel(field(j, "u_given_x1x2"));
  Kernel y1 = parse_kernel(field(j, "y1_given_x1u"));
  Kernel y2 = parse_kernel(field(j, "y2_given_x2u"));
  const auto& s = src.shape();
  DistortionMatrix d1 = parse_distortion(field(j, "d1"), s[0], y1.output_size());
  DistortionMatrix d2 = parse_distortion(field(j, "d2"), s[1], y2.output_size());
  return GrayWynerInstance{std::move(src), std::move(u), std::move(y1), std::move(y2), std::move(d1),
                           std::move(d2)};
}

MdcInstance parse_mdc(const json& j) {
  Distribution px = parse_distribution(field(j, "px"));
  Kernel u = parse_kernel(field(j, "u_given_x"));
  Kernel y1 = parse_kernel(field(j, "y1_given_xu"));
  Kernel y2 = parse_kernel(field(j, "y2_given_xuy1"));
  Kernel y0 = parse_kernel(field(j, "y0_given_xuy1y2"));
  const std::size_t nx = px.size();
  DistortionMatrix d0 = parse_distortion(field(j, "d0"), nx, y0.output_size());
  DistortionMatrix d1 = parse_distortion(field(j, "d1"), nx, y1.output_size());
  DistortionMatrix d2 = parse_distortion(field(j, "d2"), nx, y2.output_size());
  return mdc_instance(px, u, y1, y2, y0, std::move(d0), std::move(d1), std::move(d2));
}

GpSetup parse_gp(const json& j) {
  GpSetup s{parse_distribution(field(j, "p_s")), parse_kernel(field(j, "u_given_s")), {},
            field(j, "x_size").get<std::size_t>(), parse_kernel(field(j, "y_given_xs"))};
  // x_map rows are indexed by u, columns by s.
  for (const auto& row : field(j, "x_map")) {
    if (row.size() != s.p_s.size()) throw ConfigError("x_map rows must have one entry per state");
    for (const auto& x : row) s.x_map.push_back(x.get<std::size_t>());
  }
  validate(s);
  return s;
}

json to_json(const SubstreamClaim& c) {
  return json{{"domain", c.domain}, {"seed", c.seed},     {"begin", c.begin},
              {"end", c.end},       {"replayable", c.replayable}, {"config_digest", c.digest}};
}

SessionLedger SessionLedger::load(const fs::path& path) {
  SessionLedger l;
  if (!fs::exists(path)) return l;
  const json j = load_json(path);
  for (const auto& c : field(j, "claims")) {
    l.claims_.push_back(SubstreamClaim{c.at("domain").get<std::string>(), c.at("seed").get<std::uint64_t>(),
                                       c.at("begin").get<std::uint64_t>(), c.at("end").get<std::uint64_t>(),
                                       c.at("replayable").get<bool>(), c.at("config_digest").get<std::string>()});
  }
  return l;
}

void SessionLedger::claim(const SubstreamClaim& c) {
  for (const auto& e : claims_) {
    if (e.domain != c.domain || e.seed != c.seed) continue;
    if (c.end <= e.begin || e.end <= c.begin) continue;
    if (c.replayable && e.replayable && c.begin == e.begin && c.end == e.end && c.digest == e.digest) return;
    throw SessionReuseError("substreams [" + std::to_string(c.begin) + ", " + std::to_string(c.end) +
                            ") of '" + c.domain + "' under seed " + std::to_string(c.seed) +
                            " were already used");
  }
  claims_.push_back(c);
}

json SessionLedger::to_json() const {
  json arr = json::array();
  for (const auto& c : claims_) arr.push_back(cli::to_json(c));
  return json{{"claims", arr}};
}

void SessionLedger::save(const fs::path& path) const { write_atomic(path, to_json().dump(2) + "\n"); }

}  // namespace sfrl::cli
