#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>

#include "cli_internal.hpp"
#include "sfrl/cli.hpp"

namespace sfrl::cli {

namespace fs = std::filesystem;

json to_json(const Distribution& d) { return json(std::vector<double>(d.probs().begin(), d.probs().end())); }

json to_json(const Kernel& k) {
  json rows = json::array();
  for (const auto& r : k.rows()) rows.push_back(to_json(r));
  return rows;
}

json to_json(const CapacitySolution& s) {
  return json{{"capacity", s.capacity}, {"input", to_json(s.input)}, {"output", to_json(s.output)},
              {"iterations", s.iterations}, {"gap", s.gap}};
}

json to_json(const RdSolution& s) {
  return json{{"rate", s.rate},   {"distortion", s.distortion}, {"iterations", s.iterations},
              {"gap", s.gap},     {"slope", s.slope},           {"kernel", to_json(s.kernel)}};
}

json to_json(const SimReport& r) {
  json j{{"mode", to_string(r.mode)},
         {"trials", r.trials},
         {"info_bits", r.info_bits},
         {"expected_length", r.expected_length},
         {"expected_length_se", r.expected_length_se},
         {"length_bound", r.length_bound},
         {"length_per_input", r.length_per_input},
         {"length_se_per_input", r.length_se_per_input},
         {"tv_per_input", r.tv_per_input},
         {"tv_threshold", r.tv_threshold},
         {"mean_log2_k", r.mean_log2_k},
         {"mean_log2_k_se", r.mean_log2_k_se},
         {"kl_per_input", r.kl_per_input},
         {"index_bound_constant", kIndexBoundConstant},
         {"mean_log2_k_avg", r.mean_log2_k_avg},
         {"mean_log2_k_avg_se", r.mean_log2_k_avg_se},
         {"entropy_k_bound", r.entropy_k_bound},
         {"decode_mismatches", r.decode_mismatches},
         {"length_pass", r.length_pass},
         {"tv_pass", r.tv_pass},
         {"index_pass", r.index_pass},
         {"entropy_pass", r.entropy_pass},
         {"pass", r.pass}};
  j["entropy_k"] = r.entropy_k ? json(*r.entropy_k) : json(nullptr);
  return j;
}

json to_json(const LossyReport& r) {
  return json{{"mixture", r.mixture},
              {"rate", r.rate},
              {"target_distortion", r.target_distortion},
              {"expected_length", r.expected_length},
              {"expected_length_se", r.expected_length_se},
              {"expected_distortion", r.expected_distortion},
              {"expected_distortion_se", r.expected_distortion_se},
              {"length_bound", r.length_bound},
              {"slack", r.slack},
              {"codebooks", r.codebooks},
              {"pass", r.pass}};
}

json to_json(const RateReport& r) {
  json lines = json::array();
  for (const auto& l : r.lines) {
    lines.push_back(json{{"name", l.name}, {"measured", l.measured}, {"bound", l.bound}, {"pass", l.pass}});
  }
  return json{{"scheme", r.scheme}, {"lines", lines}, {"slack", r.slack}, {"support", r.support}, {"pass", r.pass}};
}

json to_json(const GwTargets& t) {
  return json{{"i_u", t.i_u}, {"i_1", t.i_1}, {"i_2", t.i_2}, {"r0", t.r0},
              {"r1", t.r1},   {"r2", t.r2},   {"d1", t.d1},   {"d2", t.d2}};
}

json to_json(const MdcRegion& r) {
  return json{{"eta", r.eta},
              {"i_xu", r.i_xu},
              {"i_x_y1_u", r.i_x_y1_u},
              {"i_xy1_y2_u", r.i_xy1_y2_u},
              {"i_x_y0_y1y2u", r.i_x_y0_y1y2u},
              {"i_y1_y2_u", r.i_y1_y2_u},
              {"i_x_all", r.i_x_all},
              {"corner_r1", r.corner_r1},
              {"corner_r2", r.corner_r2},
              {"swapped_r1", r.swapped_r1},
              {"swapped_r2", r.swapped_r2},
              {"r1_min", r.r1_min},
              {"r2_min", r.r2_min},
              {"sum_min", r.sum_min},
              {"d0", r.d0},
              {"d1", r.d1},
              {"d2", r.d2},
              {"stage_info", r.stage_info},
              {"stage_absorbed", r.stage_absorbed}};
}

json to_json(const EfiReport& r) {
  return json{{"lower_bound", r.lower_bound},   {"upper_estimate", r.upper_estimate},
              {"upper_se", r.upper_se},         {"i_xy", r.i_xy},
              {"sfrl_bound", r.sfrl_bound},     {"equality_case", r.equality_case},
              {"trials", r.trials},             {"seed", r.seed},
              {"sandwich_pass", r.sandwich_pass}, {"equality_pass", r.equality_pass},
              {"pass", r.pass}};
}

json to_json(const LbExampleFamily& f) {
  json j{{"k", f.k},
         {"gamma", f.gamma},
         {"h_v", f.h_v},
         {"h_v_closed", f.h_v_closed},
         {"i_xy", f.i_xy},
         {"i_closed", f.i_closed},
         {"psi_lb", f.psi_lb},
         {"tightness_floor", f.tightness_floor},
         {"closed_forms_agree", f.closed_forms_agree},
         {"pass", f.pass}};
  if (f.k <= 4) j["p_v"] = to_json(f.p_v);
  return j;
}

json to_json(const GpReport& r) {
  return json{{"i_uy", r.i_uy},
              {"i_us", r.i_us},
              {"h_y", r.h_y},
              {"h_u_given_v", r.h_u_given_v},
              {"h_u_given_v_se", r.h_u_given_v_se},
              {"i_vy", r.i_vy},
              {"i_vy_se", r.i_vy_se},
              {"h_u_given_v_plugin", r.h_u_given_v_plugin},
              {"i_vy_plugin", r.i_vy_plugin},
              {"reduction_bound", r.reduction_bound},
              {"h_bound", r.h_bound},
              {"trials", r.trials},
              {"distinct_tables", r.distinct_tables},
              {"seed", r.seed},
              {"chain_pass", r.chain_pass},
              {"bound_pass", r.bound_pass},
              {"pass", r.pass}};
}

namespace {

void flatten(const json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << path << "," << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

std::string to_csv(const json& payload) {
  std::ostringstream out;
  out << "key,value\n";
  flatten(payload, "", out);
  return out.str();
}

json report_document(const Artifact& a) {
  json subs = json::array();
  for (const auto& c : a.substreams) subs.push_back(to_json(c));
  return json{{"command", a.command},         {"config", a.config},
              {"config_digest", config_digest(a.config)},
              {"seed", a.seed},               {"substreams", subs},
              {"tool_version", kToolVersion}, {"payload", a.payload},
              {"pass", a.pass}};
}

std::optional<std::string> persist(const fs::path& out_dir, const Artifact& a, const std::string& format) {
  const json doc = report_document(a);
  const fs::path report = out_dir / "reports" / (a.name + ".json");
  std::optional<std::string> stale;
  if (fs::exists(report)) {
    try {
      const json old = load_json(report);
      const std::string d = old.value("config_digest", "");
      if (old.value("command", "") == a.command && d != doc["config_digest"].get<std::string>()) stale = d;
    } catch (const Error&) {
      stale = "unreadable";
    }
  }
  write_atomic(report, doc.dump(2) + "\n");
  if (format == "csv") write_atomic(out_dir / "reports" / (a.name + ".csv"), to_csv(doc));

  json record = doc;
  record["timestamp"] = utc_timestamp();
  if (stale) record["replaced_stale_digest"] = *stale;
  write_atomic(out_dir / "records" / (a.name + ".json"), record.dump(2) + "\n");

  for (const auto& [file, bytes] : a.binaries) {
    write_atomic(out_dir / "fixtures" / file, std::string(bytes.begin(), bytes.end()));
  }
  if (a.csv) write_atomic(out_dir / "tables" / (a.name + ".csv"), *a.csv);
  return stale;
}

}  // namespace sfrl::cli
