#include "sentsim/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sentsim::audit {

using cps::Agent;
using cps::ChannelConfig;

void validate_config(const AuditConfig& cfg) {
  require(std::isfinite(cfg.epsilon) && cfg.epsilon > 0.0, Err::ConfigInvalid,
          "audit epsilon");
  require(std::isfinite(cfg.delta) && cfg.delta > 0.0, Err::ConfigInvalid,
          "audit delta");
  require(std::isfinite(cfg.r_assertoric) && cfg.r_assertoric > 0.0,
          Err::ConfigInvalid, "audit r_assertoric");
  require(cfg.probe_count > 0, Err::ConfigInvalid, "audit probe_count");
}

namespace {

std::size_t channel_index(const Agent& agent, const std::string& channel) {
  for (std::size_t i = 0; i < agent.cfg.channels.size(); ++i)
    if (agent.cfg.channels[i].channel_id == channel) return i;
  raise(Err::UnknownChannel, "'" + channel + "'");
}

// Probes cluster around the channel prototype when the raw signal shares
// its dimension, otherwise around the origin.
core::SensorySignal make_probe(const ChannelConfig& ch, long long t,
                               core::RngStream& rng) {
  int dim = perception::input_dim(ch.encoder);
  Vec v(static_cast<std::size_t>(dim));
  bool centered = static_cast<int>(ch.prototype.size()) == dim;
  for (int i = 0; i < dim; ++i)
    v[static_cast<std::size_t>(i)] =
        (centered ? ch.prototype[static_cast<std::size_t>(i)] : 0.0) +
        0.5 * rng.normal();
  return core::SensorySignal{ch.channel_id, t, std::move(v),
                             core::Origin::Unknown};
}

double best_channel_weight(const cps::StepTrace& tr,
                           const std::string& channel) {
  double best = 0.0;
  const std::string prefix = channel + "/";
  for (std::size_t i = 0; i < tr.decision.trace.size(); ++i)
    if (tr.decision.trace[i].input_id.rfind(prefix, 0) == 0)
      best = std::max(best, tr.decision.weighted_scores[i]);
  return best;
}

}  // namespace

AssertoricResult check_assertoric(const Agent& agent,
                                  const std::string& channel,
                                  const AuditConfig& cfg) {
  validate_config(cfg);
  const ChannelConfig& ch = agent.cfg.channels[channel_index(agent, channel)];

  AssertoricResult r;
  double bound = cfg.epsilon * cfg.r_assertoric;
  double measured = ch.gate.alpha;
  r.alpha.name = "assertoric_alpha";
  r.alpha.pass = measured > bound;
  r.alpha.margin = measured - bound;
  r.alpha.detail = "alpha " + std::to_string(measured) + " vs bound " +
                   std::to_string(bound);

  core::RngStream rng(cfg.seed, "audit/" + channel + "/probes");
  std::vector<core::ConflictInput> injected;
  for (const auto& src : ch.conflict_sources)
    injected.push_back(core::ConflictInput{src, {-1e6}, 0.0});
  int held = 0;
  for (int i = 0; i < cfg.probe_count; ++i) {
    auto probe = make_probe(ch, i, rng);
    auto base = cps::step(agent, probe);
    auto hit = cps::step_with_conflicts(agent, probe, injected);
    bool ok = best_channel_weight(hit.trace, channel) > 0.0 &&
              hit.trace.percept_choice == base.trace.percept_choice;
    if (ok) ++held;
  }
  double rate = static_cast<double>(held) / cfg.probe_count;
  r.persist.name = "assertoric_persist";
  r.persist.pass = rate >= 0.95;
  r.persist.margin = rate - 0.95;
  r.persist.detail = std::to_string(held) + "/" +
                     std::to_string(cfg.probe_count) + " probes held";
  return r;
}

QualitativeResult check_qualitative(const Agent& agent,
                                    const std::string& channel,
                                    const AuditConfig& cfg) {
  validate_config(cfg);
  std::size_t idx = channel_index(agent, channel);
  const ChannelConfig& ch = agent.cfg.channels[idx];

  QualitativeResult r;
  core::RngStream rng(cfg.seed, "audit/" + channel + "/qual");
  auto probe = make_probe(ch, 0, rng);
  auto base = cps::step(agent, probe);

  r.immediate.name = "immediate";
  r.immediate.pass =
      !base.trace.profile_deferred && !base.trace.profile.distances.empty();
  r.immediate.margin = r.immediate.pass ? 1.0 : -1.0;
  r.immediate.detail = base.trace.profile_deferred
                           ? "profile computation deferred"
                           : "profile present in the step trace";

  Agent bent = agent;
  for (double& w : bent.cfg.channels[idx].encoder.weights[0]) w += 1e-3;
  auto moved = cps::step(bent, probe);
  double shift = 0.0;
  if (moved.trace.profile.distances.size() ==
      base.trace.profile.distances.size())
    shift = vecmath::l2_dist(moved.trace.profile.distances,
                             base.trace.profile.distances);
  r.self_grounded.name = "self_grounded";
  r.self_grounded.pass = shift > 0.0;
  r.self_grounded.margin = shift;
  r.self_grounded.detail =
      "profile shift " + std::to_string(shift) + " under encoder perturbation";

  core::RngStream mrng(cfg.seed, "audit/" + channel + "/metric");
  auto report = simspace::validate_metric(ch.space, 1000, mrng);
  double worst = std::max({report.max_identity_violation,
                           report.max_symmetry_violation,
                           report.max_triangle_violation});
  r.metric_valid.name = "metric_valid";
  r.metric_valid.pass = report.clean(1e-9);
  r.metric_valid.margin = 1e-9 - worst;
  r.metric_valid.detail = "worst axiom violation " + std::to_string(worst) +
                          " over " + std::to_string(report.n_triples) +
                          " triples";

  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < agent.cfg.channels.size(); ++j) {
    if (j == idx) continue;
    const auto& other = agent.cfg.channels[j];
    if (other.prototype.size() != ch.prototype.size()) continue;
    min_dist = std::min(
        min_dist, simspace::distance(ch.space, ch.prototype, other.prototype));
  }
  r.distinctive.name = "distinctive";
  r.distinctive.pass = min_dist > cfg.delta;
  r.distinctive.margin =
      std::isinf(min_dist) ? cfg.delta : min_dist - cfg.delta;
  r.distinctive.detail =
      std::isinf(min_dist)
          ? "no comparable channel prototypes"
          : "min prototype distance " + std::to_string(min_dist);
  return r;
}

AuditResult audit_sentience(const Agent& agent, const std::string& channel,
                            const AuditConfig& cfg) {
  AuditResult r;
  r.channel = channel;
  r.assertoric = check_assertoric(agent, channel, cfg);
  r.qualitative = check_qualitative(agent, channel, cfg);
  r.verdict = r.assertoric.pass() && r.qualitative.pass();
  return r;
}

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::FlattenGate: return "flatten_gate";
    case Ablation::TagSilencing: return "tag_silencing";
    case Ablation::ExternalProfileTable: return "external_profile_table";
    case Ablation::CollapseSpace: return "collapse_space";
  }
  return "flatten_gate";
}

Ablation ablation_from_name(const std::string& s) {
  if (s == "flatten_gate") return Ablation::FlattenGate;
  if (s == "tag_silencing") return Ablation::TagSilencing;
  if (s == "external_profile_table") return Ablation::ExternalProfileTable;
  if (s == "collapse_space") return Ablation::CollapseSpace;
  raise(Err::ConfigInvalid, "unknown ablation '" + s + "'");
}

cps::Agent apply_ablation(const Agent& agent, Ablation what,
                          const std::string& channel) {
  Agent out = agent;
  std::size_t idx = channel_index(agent, channel);
  ChannelConfig& ch = out.cfg.channels[idx];
  switch (what) {
    case Ablation::FlattenGate:
      ch.gate.alpha = 1.0;
      for (double& b : ch.gate.betas) b = 1.0;
      break;
    case Ablation::TagSilencing:
      out.cfg.silencing.enabled = true;
      out.cfg.silencing.threshold = 100.0;
      break;
    case Ablation::ExternalProfileTable: {
      perception::PerceptualRepresentation at_proto{
          "table", ch.prototype, ch.channel_id, 0};
      ch.external_profile_table =
          simspace::similarity_profile(ch.space, at_proto, ch.references);
      break;
    }
    case Ablation::CollapseSpace:
      for (auto& other : out.cfg.channels)
        if (other.prototype.size() == ch.prototype.size())
          other.prototype = ch.prototype;
      break;
  }
  return out;
}

namespace {

nlohmann::json sub_to_json(const SubResult& s) {
  return nlohmann::json{{"name", s.name},
                        {"pass", s.pass},
                        {"margin", s.margin},
                        {"detail", s.detail}};
}

}  // namespace

nlohmann::json result_to_json(const AuditResult& r) {
  return nlohmann::json{
      {"channel", r.channel},
      {"assertoric",
       {{"alpha", sub_to_json(r.assertoric.alpha)},
        {"persist", sub_to_json(r.assertoric.persist)},
        {"pass", r.assertoric.pass()}}},
      {"qualitative",
       {{"immediate", sub_to_json(r.qualitative.immediate)},
        {"self_grounded", sub_to_json(r.qualitative.self_grounded)},
        {"metric_valid", sub_to_json(r.qualitative.metric_valid)},
        {"distinctive", sub_to_json(r.qualitative.distinctive)},
        {"pass", r.qualitative.pass()}}},
      {"verdict", r.verdict}};
}

std::string result_csv_header() {
  return "agent,channel,assertoric_alpha,assertoric_persist,immediate,"
         "self_grounded,metric_valid,distinctive,verdict";
}

std::string result_to_csv(const std::string& agent_id, const AuditResult& r) {
  auto flag = [](bool b) { return b ? "1" : "0"; };
  std::string row = agent_id;
  row += "," + r.channel;
  row += ",";
  row += flag(r.assertoric.alpha.pass);
  row += ",";
  row += flag(r.assertoric.persist.pass);
  row += ",";
  row += flag(r.qualitative.immediate.pass);
  row += ",";
  row += flag(r.qualitative.self_grounded.pass);
  row += ",";
  row += flag(r.qualitative.metric_valid.pass);
  row += ",";
  row += flag(r.qualitative.distinctive.pass);
  row += ",";
  row += flag(r.verdict);
  return row;
}

}  // namespace sentsim::audit
