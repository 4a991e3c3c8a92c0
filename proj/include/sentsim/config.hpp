#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sentsim/audit.hpp"
#include "sentsim/cps.hpp"
#include "sentsim/envs.hpp"

namespace sentsim::config {

// A run configuration is a validated JSON document; sweeps override dotted
// paths in the document and re-validate. Schema documented in the README.
struct RunConfig {
  nlohmann::json doc;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

std::uint64_t run_seed(const RunConfig& cfg);
std::string scenario(const RunConfig& cfg);
envs::EnvSpec env_spec(const RunConfig& cfg);

bool audit_enabled(const RunConfig& cfg);
std::string audit_channel(const RunConfig& cfg);
audit::AuditConfig audit_config(const RunConfig& cfg);

// Network spec: {"type": "identity"|"linear"|"init"|"explicit", ...}.
perception::EncoderParams net_from_json(const nlohmann::json& j,
                                        std::uint64_t seed,
                                        const std::string& who);

// Which channel/variable the scalar run metrics are reported against, and
// the map from environment latent to the true variable value.
struct MetricsSpec {
  std::string channel;
  std::string variable;
  perception::EncoderParams truth;
};

MetricsSpec metrics_spec(const RunConfig& cfg);

// Builds the agent, training any decoder/tagger networks that declare a
// calibration environment. Deterministic given the document.
cps::Agent build_agent(const RunConfig& cfg);

// Dotted-path override for sweeps; every path segment must already exist.
void apply_override(nlohmann::json& doc, const std::string& key,
                    const nlohmann::json& value);

}  // namespace sentsim::config
