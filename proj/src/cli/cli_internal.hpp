#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sfrl/bitstream.hpp"
#include "sfrl/chansim.hpp"
#include "sfrl/efi.hpp"
#include "sfrl/error.hpp"
#include "sfrl/gp.hpp"
#include "sfrl/lossy.hpp"
#include "sfrl/multiterminal.hpp"
#include "sfrl/numopt.hpp"
#include "sfrl/probspace.hpp"

namespace sfrl::cli {

using json = nlohmann::json;

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A substream range was claimed twice inside one session ledger.
class SessionReuseError : public Error {
 public:
  using Error::Error;
};

// --- config_io ---------------------------------------------------------------

json load_json(const std::filesystem::path& path);
std::vector<std::uint8_t> load_bytes(const std::filesystem::path& path);
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64 over the canonical dump (object keys sorted), as 16 hex digits.
std::string config_digest(const json& config);

Distribution parse_distribution(const json& j);
Kernel parse_kernel(const json& j);
DistortionMatrix parse_distortion(const json& j, std::size_t rows, std::size_t cols);
JointDistribution parse_joint(const json& j);
GrayWynerInstance parse_gray_wyner(const json& j);
MdcInstance parse_mdc(const json& j);
GpSetup parse_gp(const json& j);

struct SubstreamClaim {
  std::string domain;
  std::uint64_t seed;
  std::uint64_t begin;
  std::uint64_t end;  // exclusive
  bool replayable;    // evaluations may be repeated with the same config
  std::string digest;
};

json to_json(const SubstreamClaim& c);

class SessionLedger {
 public:
  static SessionLedger load(const std::filesystem::path& path);
  /// Throws SessionReuseError on an overlap; an identical replayable claim
  /// with the same config digest is accepted as a replay.
  void claim(const SubstreamClaim& c);
  json to_json() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<SubstreamClaim> claims_;
};

// --- reports -----------------------------------------------------------------

json to_json(const Distribution& d);
json to_json(const Kernel& k);
json to_json(const CapacitySolution& s);
json to_json(const RdSolution& s);
json to_json(const SimReport& r);
json to_json(const LossyReport& r);
json to_json(const RateReport& r);
json to_json(const GwTargets& t);
json to_json(const MdcRegion& r);
json to_json(const EfiReport& r);
json to_json(const LbExampleFamily& f);
json to_json(const GpReport& r);

/// Flattens nested objects and arrays into "path,value" rows.
std::string to_csv(const json& payload);

struct Artifact {
  std::string name;     // file stem
  std::string command;  // e.g. "chansim eval"
  json config;
  std::uint64_t seed = 0;
  std::vector<SubstreamClaim> substreams;
  json payload;
  bool pass = true;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> binaries;  // fixtures
  std::optional<std::string> csv;  // extra plot-ready table
};

/// Deterministic document: everything except the wall-clock timestamp.
json report_document(const Artifact& a);

/// Writes <stem>.report.json (or .csv), <stem>.record.json with a timestamp,
/// fixtures and any CSV table. Flags an existing report whose config digest
/// differs from the new one; returns the stale digest if any.
std::optional<std::string> persist(const std::filesystem::path& out_dir, const Artifact& a,
                                   const std::string& format);

// --- runners -----------------------------------------------------------------

struct RunOptions {
  std::uint64_t seed = 1;
  std::optional<std::size_t> trials;
};

Artifact run_capacity(const json& cfg, const RunOptions& o);
Artifact run_rd(const json& cfg, const RunOptions& o);
Artifact run_chansim_eval(const json& cfg, const RunOptions& o, std::uint64_t first_session);
Artifact run_chansim_encode(const json& cfg, const RunOptions& o, const std::vector<std::size_t>& xs,
                            std::uint64_t session);
Artifact run_chansim_decode(const json& cfg, const RunOptions& o, const std::vector<std::uint8_t>& container,
                            std::uint64_t session);
Artifact run_lossy_design(const json& cfg, const RunOptions& o);
Artifact run_lossy_encode(const json& cfg, const RunOptions& o, const std::vector<std::size_t>& xs,
                          std::uint64_t session);
Artifact run_lossy_decode(const json& cfg, const RunOptions& o, const std::vector<std::uint8_t>& container);
Artifact run_lossy_eval(const json& cfg, const RunOptions& o, bool soft);
Artifact run_gw(const json& cfg, const RunOptions& o);
Artifact run_mdc(const json& cfg, const RunOptions& o, int corner, bool flag, double alpha);
Artifact run_efi_lb(const json& cfg, const RunOptions& o);
Artifact run_efi_ub(const json& cfg, const RunOptions& o);
Artifact run_efi_example(unsigned k_lo, unsigned k_hi, const RunOptions& o);
Artifact run_gp(const json& cfg, const RunOptions& o);

/// Runs the built-in suite into `out_dir`; returns 0 if every item passes.
int verify_all(const std::filesystem::path& out_dir, const RunOptions& o, std::ostream& log);

}  // namespace sfrl::cli
