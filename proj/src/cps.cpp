#include "sentsim/cps.hpp"

#include <algorithm>
#include <cmath>

namespace sentsim::cps {

double assertoric_priority(double s_strength,
                           const std::vector<ConflictInput>& conflicts,
                           const GateParams& g) {
  core::validate_gate(g);
  require(std::isfinite(s_strength), Err::NonFiniteValues, "signal strength");
  require(conflicts.size() == g.betas.size(), Err::ShapeMismatch,
          std::to_string(conflicts.size()) + " conflicts vs " +
              std::to_string(g.betas.size()) + " betas");
  double raw = g.alpha * s_strength;
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    core::validate_conflict(conflicts[i]);
    raw += g.betas[i] * vecmath::mean(conflicts[i].values);
  }
  return g.clamp_mode == core::ClampMode::FloorOne ? std::max(raw, 1.0)
                                                   : std::min(raw, 1.0);
}

DecisionOutcome decide(const std::vector<Competitor>& competitors) {
  require(!competitors.empty(), Err::EmptyCompetitors, "");
  DecisionOutcome out;
  bool any = false;
  double best = 0.0;
  std::string best_key;
  for (const auto& c : competitors) {
    require(c.scores.hypothesis_ids.size() == c.scores.scores.size(),
            Err::ShapeMismatch, "source '" + c.source_id + "'");
    for (std::size_t i = 0; i < c.scores.scores.size(); ++i) {
      double w = c.scores.scores[i] * c.tag.reliability;
      require(std::isfinite(w), Err::NonFiniteValues,
              "source '" + c.source_id + "'");
      TraceEntry e{c.source_id + "/" + c.scores.hypothesis_ids[i],
                   c.scores.scores[i], c.tag.reliability};
      if (!any || w > best || (w == best && e.input_id < best_key)) {
        any = true;
        best = w;
        best_key = e.input_id;
        out.chosen = c.scores.hypothesis_ids[i];
        out.chosen_source = c.source_id;
      }
      out.weighted_scores.push_back(w);
      out.trace.push_back(std::move(e));
    }
  }
  require(any, Err::EmptyCompetitors, "no hypotheses offered");
  return out;
}

void validate_utility(const UtilitySpec& u) {
  require(!u.action_ids.empty(), Err::ConfigInvalid, "no actions");
  for (std::size_t i = 0; i < u.action_ids.size(); ++i) {
    require(!u.action_ids[i].empty(), Err::ConfigInvalid, "empty action id");
    for (std::size_t j = i + 1; j < u.action_ids.size(); ++j)
      require(u.action_ids[i] != u.action_ids[j], Err::ConfigInvalid,
              "duplicate action '" + u.action_ids[i] + "'");
  }
  require(!u.utility.empty(), Err::ConfigInvalid, "no utility buckets");
  for (const auto& [bucket, row] : u.utility) {
    require(row.size() == u.action_ids.size(), Err::ConfigInvalid,
            "bucket '" + bucket + "' does not cover the action set");
    for (const auto& a : u.action_ids) {
      auto it = row.find(a);
      require(it != row.end(), Err::ConfigInvalid,
              "bucket '" + bucket + "' missing action '" + a + "'");
      require(std::isfinite(it->second), Err::NonFiniteValues,
              "utility of '" + a + "' in '" + bucket + "'");
    }
  }
}

std::string select_action(const UtilitySpec& u, const std::string& bucket,
                          const DecisionOutcome& inputs) {
  (void)inputs;
  validate_utility(u);
  auto it = u.utility.find(bucket);
  require(it != u.utility.end(), Err::UnknownBucket, "'" + bucket + "'");
  std::string best = u.action_ids.front();
  double best_u = it->second.at(best);
  for (const auto& a : u.action_ids) {
    double v = it->second.at(a);
    if (v > best_u || (v == best_u && a < best)) {
      best = a;
      best_u = v;
    }
  }
  return best;
}

ProxyObject bind_proxy(const PerceptualRepresentation& rep,
                       const EpistemicTag& tag, const std::string& label,
                       const SimilarityProfile& profile) {
  require(!rep.rep_id.empty(), Err::DanglingReference, "representation id");
  require(!label.empty(), Err::DanglingReference, "label");
  require(tag.subject == rep.rep_id, Err::DanglingReference,
          "tag subject '" + tag.subject + "' vs rep '" + rep.rep_id + "'");
  require(profile.subject == rep.rep_id, Err::DanglingReference,
          "profile subject '" + profile.subject + "' vs rep '" + rep.rep_id +
              "'");
  ProxyObject p;
  p.label_ = label;
  p.tag_ = tag;
  p.profile_ = profile;
  p.rep_ref_ = rep.rep_id;
  return p;
}

const char* tag_combine_name(TagCombine c) {
  switch (c) {
    case TagCombine::Product: return "product";
    case TagCombine::Min: return "min";
    case TagCombine::Mean: return "mean";
  }
  return "product";
}

TagCombine tag_combine_from_name(const std::string& s) {
  if (s == "product") return TagCombine::Product;
  if (s == "min") return TagCombine::Min;
  if (s == "mean") return TagCombine::Mean;
  raise(Err::ConfigInvalid, "unknown tag combine rule '" + s + "'");
}

namespace {

double combine_tags(TagCombine rule, const std::vector<double>& vals) {
  if (vals.empty()) return 1.0;
  switch (rule) {
    case TagCombine::Product: {
      double p = 1.0;
      for (double v : vals) p *= v;
      return p;
    }
    case TagCombine::Min: return *std::min_element(vals.begin(), vals.end());
    case TagCombine::Mean: return vecmath::mean(vals);
  }
  return 1.0;
}

void validate_channel(const ChannelConfig& ch) {
  require(!ch.channel_id.empty(), Err::ConfigInvalid, "empty channel id");
  const std::string who = "channel '" + ch.channel_id + "'";
  perception::validate_params(ch.encoder);
  perception::validate_params(ch.head);
  perception::validate_params(ch.decoder);
  int rep_dim = perception::output_dim(ch.encoder);
  require(perception::input_dim(ch.head) == rep_dim, Err::ConfigInvalid,
          who + ": head input dim");
  require(perception::input_dim(ch.decoder) == rep_dim, Err::ConfigInvalid,
          who + ": decoder input dim");
  require(!ch.hypotheses.empty(), Err::ConfigInvalid, who + ": no hypotheses");
  require(static_cast<int>(ch.hypotheses.size()) ==
              perception::output_dim(ch.head),
          Err::ConfigInvalid, who + ": head output vs hypothesis count");
  for (std::size_t i = 0; i < ch.hypotheses.size(); ++i) {
    require(!ch.hypotheses[i].empty(), Err::ConfigInvalid,
            who + ": empty hypothesis id");
    for (std::size_t j = i + 1; j < ch.hypotheses.size(); ++j)
      require(ch.hypotheses[i] != ch.hypotheses[j], Err::ConfigInvalid,
              who + ": duplicate hypothesis '" + ch.hypotheses[i] + "'");
  }
  require(!ch.variable_id.empty(), Err::ConfigInvalid, who + ": variable id");
  core::validate_gate(ch.gate);
  require(ch.gate.betas.size() == ch.conflict_sources.size(),
          Err::ConfigInvalid, who + ": betas vs conflict sources");
  for (const auto& src : ch.conflict_sources)
    require(src == "reality", Err::ConfigInvalid,
            who + ": unknown conflict source '" + src + "'");
  simspace::validate_space(ch.space);
  if (ch.space.kind == simspace::SpaceKind::Continuous)
    require(ch.space.dim == rep_dim, Err::ConfigInvalid,
            who + ": space dim vs representation dim");
  require(!ch.references.empty(), Err::ConfigInvalid,
          who + ": empty reference set");
  require(!ch.prototype.empty(), Err::ConfigInvalid, who + ": no prototype");
  if (ch.space.kind == simspace::SpaceKind::Continuous)
    require(static_cast<int>(ch.prototype.size()) == ch.space.dim,
            Err::ConfigInvalid, who + ": prototype dim");
  const auto& tg = ch.taggers;
  if (tg.supervised) {
    perception::validate_params(*tg.supervised);
    require(perception::input_dim(*tg.supervised) == rep_dim &&
                perception::output_dim(*tg.supervised) == 1,
            Err::ConfigInvalid, who + ": supervised tagger dims");
  }
  if (tg.temporal) {
    taggers::validate_predictor(*tg.temporal);
    require(perception::input_dim(tg.temporal->params) ==
                    tg.temporal->k * rep_dim &&
                perception::output_dim(tg.temporal->params) == rep_dim,
            Err::ConfigInvalid, who + ": temporal predictor dims");
  }
  if (tg.bayes) taggers::validate_scorer(*tg.bayes);
  require(std::isfinite(tg.repair_threshold) && tg.repair_threshold >= 0.0 &&
              tg.repair_threshold <= 1.0,
          Err::ConfigInvalid, who + ": repair threshold");
}

}  // namespace

void validate_agent_config(const AgentConfig& cfg) {
  require(!cfg.channels.empty(), Err::ConfigInvalid, "no channels");
  for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
    validate_channel(cfg.channels[i]);
    for (std::size_t j = i + 1; j < cfg.channels.size(); ++j)
      require(cfg.channels[i].channel_id != cfg.channels[j].channel_id,
              Err::ConfigInvalid,
              "duplicate channel '" + cfg.channels[i].channel_id + "'");
  }
  reality::validate_policy(cfg.fusion);
  validate_utility(cfg.utility);
  const auto& rc = cfg.reality_competitor;
  if (rc.enabled) {
    require(!rc.variable_id.empty(), Err::ConfigInvalid,
            "reality competitor variable");
    require(rc.hypotheses.size() == 2 && rc.hypotheses[0] != rc.hypotheses[1] &&
                !rc.hypotheses[0].empty() && !rc.hypotheses[1].empty(),
            Err::ConfigInvalid, "reality competitor needs two hypotheses");
    require(std::isfinite(rc.threshold) && rc.threshold >= 0.0,
            Err::ConfigInvalid, "reality competitor threshold");
    require(std::isfinite(rc.width) && rc.width > 0.0, Err::ConfigInvalid,
            "reality competitor width");
    require(std::isfinite(rc.reliability) && rc.reliability >= 0.0 &&
                rc.reliability <= 1.0,
            Err::ConfigInvalid, "reality competitor reliability");
  }
  require(std::isfinite(cfg.silencing.threshold) &&
              cfg.silencing.threshold >= 0.0,
          Err::ConfigInvalid, "silencing threshold");
  require(std::isfinite(cfg.r_assertoric) && cfg.r_assertoric > 0.0,
          Err::ConfigInvalid, "r_assertoric");
  for (const auto& ch : cfg.channels)
    for (const auto& h : ch.hypotheses)
      require(cfg.utility.utility.count(h) != 0, Err::ConfigInvalid,
              "no utility bucket for hypothesis '" + h + "'");
  if (rc.enabled)
    for (const auto& h : rc.hypotheses)
      require(cfg.utility.utility.count(h) != 0, Err::ConfigInvalid,
              "no utility bucket for hypothesis '" + h + "'");
}

Agent make_agent(AgentConfig cfg) {
  validate_agent_config(cfg);
  Agent a;
  a.cfg = std::move(cfg);
  return a;
}

const ChannelConfig& channel_of(const Agent& agent,
                                const std::string& channel_id) {
  for (const auto& ch : agent.cfg.channels)
    if (ch.channel_id == channel_id) return ch;
  raise(Err::UnknownChannel, "'" + channel_id + "'");
}

namespace {

StepOutcome step_impl(const Agent& agent, const SensorySignal& obs,
                      const std::vector<ConflictInput>* injected) {
  core::validate_signal(obs);
  const ChannelConfig& ch = channel_of(agent, obs.channel_id);
  StepTrace tr;
  tr.t = obs.t;
  tr.channel = ch.channel_id;

  auto rep = perception::encode(ch.encoder, obs);
  tr.rep_id = rep.rep_id;
  tr.rep = rep.vector;

  if (ch.external_profile_table) {
    // the table serves its canned distances for whatever rep asks
    tr.profile = *ch.external_profile_table;
    tr.profile.subject = rep.rep_id;
  } else {
    tr.profile = simspace::similarity_profile(ch.space, rep, ch.references);
  }

  Agent next = agent;
  auto& hist = next.history[ch.channel_id];
  const auto& tg = ch.taggers;
  std::vector<double> fired;
  std::optional<perception::PredictedRepresentation> predicted;
  if (tg.supervised) {
    auto tag = taggers::tag_supervised(*tg.supervised, rep);
    tr.tagger_reliabilities["supervised"] = tag.reliability;
    fired.push_back(tag.reliability);
  }
  if (tg.temporal &&
      static_cast<int>(hist.size()) >= tg.temporal->k) {
    std::vector<PerceptualRepresentation> window(hist.end() - tg.temporal->k,
                                                 hist.end());
    predicted = taggers::predict_next(*tg.temporal, window);
    auto tag = taggers::tag_temporal(*tg.temporal, window, rep);
    tr.tagger_reliabilities["temporal"] = tag.reliability;
    fired.push_back(tag.reliability);
  }
  if (tg.bayes && reality::has_variable(agent.belief, ch.variable_id)) {
    const Vec& latent = agent.belief.estimates.at(ch.variable_id).mean;
    auto [total, tag] = taggers::tag_bayesian(*tg.bayes, latent, rep);
    (void)total;
    tr.tagger_reliabilities["bayes"] = tag.reliability;
    fired.push_back(tag.reliability);
  }
  tr.combined_reliability = combine_tags(tg.combine, fired);
  auto combined_tag =
      core::make_tag(tr.combined_reliability, "combined", rep.rep_id);

  tr.decoded = perception::forward(ch.decoder, rep.vector);
  tr.conflict_measure =
      reality::has_variable(agent.belief, ch.variable_id)
          ? reality::conflict(agent.belief, ch.variable_id, tr.decoded)
          : 0.0;

  tr.s_strength = vecmath::rms(obs.values);
  if (injected) {
    tr.conflicts = *injected;
  } else {
    for (const auto& src : ch.conflict_sources) {
      ConflictInput c;
      c.source_id = src;
      c.values = {src == "reality" ? -tr.conflict_measure : 0.0};
      tr.conflicts.push_back(std::move(c));
    }
  }
  tr.priority = assertoric_priority(tr.s_strength, tr.conflicts, ch.gate);

  reality::Percept percept{ch.variable_id, tr.decoded, combined_tag};
  next.belief = reality::update(agent.belief, {percept}, agent.cfg.fusion);
  tr.belief_after = next.belief.estimates;

  auto scores = perception::interpret(rep, ch.hypotheses, ch.head);
  std::size_t pick = 0;
  for (std::size_t i = 1; i < scores.scores.size(); ++i) {
    if (scores.scores[i] > scores.scores[pick] ||
        (scores.scores[i] == scores.scores[pick] &&
         scores.hypothesis_ids[i] < scores.hypothesis_ids[pick]))
      pick = i;
  }
  tr.percept_choice = scores.hypothesis_ids[pick];

  Vec scaled = vecmath::scale(scores.scores, tr.priority);
  if (agent.cfg.silencing.enabled) {
    double magnitude = 0.0;
    for (const auto& c : tr.conflicts)
      magnitude = std::max(magnitude, std::abs(vecmath::mean(c.values)));
    if (magnitude > agent.cfg.silencing.threshold) {
      std::fill(scaled.begin(), scaled.end(), 0.0);
      tr.percept_silenced = true;
    }
  }

  std::vector<Competitor> comps;
  comps.push_back(Competitor{ch.channel_id,
                             InterpretationScores{scores.hypothesis_ids,
                                                  std::move(scaled)},
                             combined_tag});
  const auto& rc = agent.cfg.reality_competitor;
  if (rc.enabled && rc.variable_id == ch.variable_id &&
      reality::has_variable(next.belief, rc.variable_id)) {
    const auto& est = next.belief.estimates.at(rc.variable_id);
    double s = vecmath::sigmoid(
        (vecmath::l2_norm(est.mean) - rc.threshold) / rc.width);
    comps.push_back(Competitor{
        "reality", InterpretationScores{rc.hypotheses, {1.0 - s, s}},
        core::make_tag(rc.reliability, "reality", rc.variable_id)});
  }
  tr.decision = decide(comps);
  tr.action = select_action(agent.cfg.utility, tr.decision.chosen, tr.decision);

  auto proxy = bind_proxy(rep, combined_tag, tr.percept_choice, tr.profile);
  tr.proxy_label = proxy.label();

  if (tg.temporal) {
    auto stored = rep;
    auto it = tr.tagger_reliabilities.find("temporal");
    if (tg.history_repair && predicted &&
        it != tr.tagger_reliabilities.end() &&
        it->second < tg.repair_threshold)
      stored.vector = predicted->vector;
    hist.push_back(std::move(stored));
    while (static_cast<int>(hist.size()) > tg.temporal->k) hist.pop_front();
  }

  StepOutcome out;
  out.agent = std::move(next);
  out.action = tr.action;
  out.trace = std::move(tr);
  return out;
}

}  // namespace

StepOutcome step(const Agent& agent, const SensorySignal& obs) {
  return step_impl(agent, obs, nullptr);
}

StepOutcome step_with_conflicts(const Agent& agent, const SensorySignal& obs,
                                const std::vector<ConflictInput>& injected) {
  return step_impl(agent, obs, &injected);
}

}  // namespace sentsim::cps
