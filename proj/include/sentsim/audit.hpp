#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sentsim/cps.hpp"

namespace sentsim::audit {

struct AuditConfig {
  double epsilon = 0.5;       // non-ignorability threshold
  double delta = 1.0;         // distinctiveness threshold
  double r_assertoric = 10.0; // required alpha-to-epsilon dominance ratio
  int probe_count = 100;
  std::uint64_t seed = 13;
};

void validate_config(const AuditConfig& cfg);

struct SubResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive iff pass, distance to the threshold
  std::string detail;
};

struct AssertoricResult {
  SubResult alpha;    // gate priority clears epsilon * r_assertoric
  SubResult persist;  // survives injected maximal contradictions
  bool pass() const { return alpha.pass && persist.pass; }
};

struct QualitativeResult {
  SubResult immediate;      // profile present in the same step's trace
  SubResult self_grounded;  // profile moves when the encoder is perturbed
  SubResult metric_valid;   // the channel's space satisfies the axioms
  SubResult distinctive;    // prototype is far from every other channel's
  bool pass() const {
    return immediate.pass && self_grounded.pass && metric_valid.pass &&
           distinctive.pass;
  }
};

struct AuditResult {
  std::string channel;
  AssertoricResult assertoric;
  QualitativeResult qualitative;
  bool verdict = false;
};

AssertoricResult check_assertoric(const cps::Agent& agent,
                                  const std::string& channel,
                                  const AuditConfig& cfg);

QualitativeResult check_qualitative(const cps::Agent& agent,
                                    const std::string& channel,
                                    const AuditConfig& cfg);

AuditResult audit_sentience(const cps::Agent& agent,
                            const std::string& channel,
                            const AuditConfig& cfg);

enum class Ablation {
  FlattenGate,           // alpha = beta: gate dominance removed
  TagSilencing,          // contradicted percepts are muted before decide
  ExternalProfileTable,  // profiles served from a frozen lookup table
  CollapseSpace,         // every prototype collapses onto the channel's
};

const char* ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& s);

cps::Agent apply_ablation(const cps::Agent& agent, Ablation what,
                          const std::string& channel);

nlohmann::json result_to_json(const AuditResult& r);
std::string result_csv_header();
std::string result_to_csv(const std::string& agent_id, const AuditResult& r);

}  // namespace sentsim::audit
