#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentsim/audit.hpp"
#include "sentsim/config.hpp"
#include "sentsim/cps.hpp"
#include "sentsim/envs.hpp"

namespace sentsim::harness {

struct Series {
  std::vector<long long> t;
  Vec v;
  bool operator==(const Series&) const = default;
};

struct Metrics {
  std::optional<double> tagger_auc;
  std::optional<double> final_reality_error;
  std::optional<double> final_percept_bias;
  Series reality_error;
  Series conflict;
  Series reliability;
  std::map<std::string, long long> decision_counts;
  bool operator==(const Metrics&) const = default;
};

// Rank-based AUC with midrank tie handling; nullopt unless both classes
// are present. labels are 1 for positives.
std::optional<double> auc_score(const Vec& scores,
                                const std::vector<int>& labels);

// All per-channel series are computed on the metrics channel; decision
// counts cover every trace. AUC scores the combined tag reliability as a
// predictor of externally-caused frames, over steps where a tagger fired.
Metrics compute_metrics(const std::vector<cps::StepTrace>& traces,
                        const envs::Episode& episode,
                        const config::MetricsSpec& spec);

struct RunRecord {
  std::string version;
  std::string timestamp;  // ISO 8601 UTC; ignored by equality checks
  nlohmann::json config;
  std::string config_hash;  // fnv1a64 of the dumped config, 16 hex digits
  envs::Episode episode;
  std::vector<cps::StepTrace> traces;
  Metrics metrics;
  nlohmann::json audit;  // audit::result_to_json output, or null
};

std::string now_iso8601();
std::string config_hash(const nlohmann::json& doc);

nlohmann::json episode_to_json(const envs::Episode& ep);
envs::Episode episode_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const cps::StepTrace& tr);
cps::StepTrace trace_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const RunRecord& rec);
RunRecord record_from_json(const nlohmann::json& j);

bool records_equal_modulo_timestamp(const RunRecord& a, const RunRecord& b);

// Builds the agent (running the audit first when enabled), rolls the
// generated episode through cps::step, and computes metrics. Does not
// touch the filesystem; pair with write_record.
RunRecord run(const config::RunConfig& cfg);

void write_record(const RunRecord& rec, const std::string& dir);
RunRecord read_record(const std::string& path);

using GridAxis = std::pair<std::string, std::vector<nlohmann::json>>;

// Cartesian product of overrides; cell i runs with seed base_seed + i and
// writes <out_root>/cell_<i>/record.json. Cells run concurrently. An empty
// grid degenerates to a single cell.
std::vector<RunRecord> sweep(const config::RunConfig& base,
                             const std::vector<GridAxis>& grid,
                             const std::string& out_root);

extern const char* kMetricsCsvHeader;

std::string svg_line_plot(const std::string& title, const Series& s);

// Scans dir recursively for record.json files, writes <dir>/metrics.csv
// (one row per record, sorted by file path) and three SVG line plots per
// record under <dir>/plots/. Returns the CSV text.
std::string report(const std::string& dir);

}  // namespace sentsim::harness
