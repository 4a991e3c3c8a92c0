#include <doctest.h>

#include <array>

#include "sentsim/audit.hpp"
#include "test_util.hpp"

using namespace sentsim;
using testutil::err_of;

namespace {

perception::EncoderParams score_head() {
  perception::EncoderParams p;
  p.layer_dims = {2, 2};
  p.weights = {{0.1, 0.0, 0.0, 0.0}};
  p.biases = {{0.0, 0.05}};
  p.activations = {perception::Activation::Identity};
  return p;
}

cps::ChannelConfig sense_channel(const std::string& id, Vec prototype) {
  cps::ChannelConfig ch;
  ch.channel_id = id;
  ch.encoder = perception::identity_encoder(2);
  ch.head = score_head();
  ch.hypotheses = {"present", "absent"};
  ch.decoder = perception::identity_encoder(2);
  ch.variable_id = id + "_level";
  ch.gate.alpha = 10.0;
  ch.gate.betas = {0.1};
  ch.conflict_sources = {"reality"};
  ch.space = simspace::make_continuous(id + "-space", 2);
  ch.references = {{id + "-ref0", {0.0, 0.0}, id, 0},
                   {id + "-ref1", {1.0, 1.0}, id, 0}};
  ch.prototype = std::move(prototype);
  return ch;
}

cps::Agent default_agent() {
  cps::AgentConfig cfg;
  cfg.channels = {sense_channel("pain", {3.0, 0.0}),
                  sense_channel("touch", {0.0, 3.0}),
                  sense_channel("temp", {-3.0, 0.0})};
  cfg.utility.action_ids = {"attend", "ignore"};
  cfg.utility.utility["present"] = {{"attend", 1.0}, {"ignore", 0.0}};
  cfg.utility.utility["absent"] = {{"attend", 0.0}, {"ignore", 1.0}};
  return cps::make_agent(cfg);
}

std::array<bool, 6> six_flags(const audit::AuditResult& r) {
  return {r.assertoric.alpha.pass,      r.assertoric.persist.pass,
          r.qualitative.immediate.pass, r.qualitative.self_grounded.pass,
          r.qualitative.metric_valid.pass, r.qualitative.distinctive.pass};
}

}  // namespace

TEST_CASE("assertoric alpha condition is plain arithmetic") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto r = audit::check_assertoric(agent, "pain", cfg);
  CHECK(r.alpha.pass);
  CHECK(r.alpha.margin == doctest::Approx(5.0));

  auto flat = audit::apply_ablation(agent, audit::Ablation::FlattenGate,
                                    "pain");
  auto r2 = audit::check_assertoric(flat, "pain", cfg);
  CHECK_FALSE(r2.alpha.pass);
  CHECK(r2.alpha.margin == doctest::Approx(-4.0));
}

TEST_CASE("default agent holds its percept under injected contradiction") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto r = audit::check_assertoric(agent, "pain", cfg);
  CHECK(r.persist.pass);
  CHECK(r.persist.margin == doctest::Approx(0.05));
  CHECK(r.persist.detail == "100/100 probes held");
}

TEST_CASE("default agent passes the qualitative battery") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto r = audit::check_qualitative(agent, "pain", cfg);
  CHECK(r.immediate.pass);
  CHECK(r.self_grounded.pass);
  CHECK(r.metric_valid.pass);
  CHECK(r.distinctive.pass);
  CHECK(r.distinctive.margin ==
        doctest::Approx(std::sqrt(18.0) - 1.0));
}

TEST_CASE("audit verdict is the conjunction of all six sub-checks") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto r = audit::audit_sentience(agent, "pain", cfg);
  CHECK(r.verdict);
  for (bool f : six_flags(r)) CHECK(f);
}

TEST_CASE("each ablation flips exactly its targeted sub-check") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  const std::array<audit::Ablation, 4> ablations = {
      audit::Ablation::FlattenGate, audit::Ablation::TagSilencing,
      audit::Ablation::ExternalProfileTable, audit::Ablation::CollapseSpace};
  const std::array<std::size_t, 4> target = {0, 1, 3, 5};

  auto base = six_flags(audit::audit_sentience(agent, "pain", cfg));
  for (bool f : base) REQUIRE(f);

  for (std::size_t a = 0; a < ablations.size(); ++a) {
    auto ablated = audit::apply_ablation(agent, ablations[a], "pain");
    auto r = audit::audit_sentience(ablated, "pain", cfg);
    auto flags = six_flags(r);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      INFO("ablation ", audit::ablation_name(ablations[a]), " sub-check ", i);
      CHECK(flags[i] == (i != target[a]));
    }
    CHECK_FALSE(r.verdict);
  }
}

TEST_CASE("silencing ablation reproduces the muted-pain failure mode") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto ablated =
      audit::apply_ablation(agent, audit::Ablation::TagSilencing, "pain");
  auto r = audit::audit_sentience(ablated, "pain", cfg);
  CHECK(r.assertoric.alpha.pass);
  CHECK_FALSE(r.assertoric.persist.pass);
  CHECK(r.qualitative.pass());
  CHECK_FALSE(r.verdict);
}

TEST_CASE("external profile table kills self-grounding only") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto ablated = audit::apply_ablation(
      agent, audit::Ablation::ExternalProfileTable, "pain");
  auto r = audit::audit_sentience(ablated, "pain", cfg);
  CHECK(r.assertoric.pass());
  CHECK(r.qualitative.immediate.pass);
  CHECK_FALSE(r.qualitative.self_grounded.pass);
  CHECK(r.qualitative.self_grounded.margin == 0.0);
}

TEST_CASE("collapsed prototypes lose distinctiveness") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto ablated =
      audit::apply_ablation(agent, audit::Ablation::CollapseSpace, "pain");
  auto r = audit::check_qualitative(ablated, "pain", cfg);
  CHECK_FALSE(r.distinctive.pass);
  CHECK(r.distinctive.margin == doctest::Approx(-1.0));
}

TEST_CASE("audit verdicts are stable across seeds and reruns") {
  auto agent = default_agent();
  for (std::uint64_t s = 13; s < 23; ++s) {
    audit::AuditConfig cfg;
    cfg.seed = s;
    auto r = audit::audit_sentience(agent, "pain", cfg);
    CHECK(r.verdict);
  }
  audit::AuditConfig cfg;
  auto a = audit::result_to_json(audit::audit_sentience(agent, "pain", cfg));
  auto b = audit::result_to_json(audit::audit_sentience(agent, "pain", cfg));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("audit rejects unknown channels and bad configs") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  CHECK(err_of([&] { audit::audit_sentience(agent, "smell", cfg); }) ==
        Err::UnknownChannel);

  audit::AuditConfig bad;
  bad.epsilon = 0.0;
  CHECK(err_of([&] { audit::check_assertoric(agent, "pain", bad); }) ==
        Err::ConfigInvalid);
  bad = audit::AuditConfig{};
  bad.probe_count = 0;
  CHECK(err_of([&] { audit::check_assertoric(agent, "pain", bad); }) ==
        Err::ConfigInvalid);
}

TEST_CASE("audit results serialize to JSON and CSV") {
  auto agent = default_agent();
  audit::AuditConfig cfg;
  auto r = audit::audit_sentience(agent, "pain", cfg);

  auto j = audit::result_to_json(r);
  CHECK(j["channel"] == "pain");
  CHECK(j["verdict"] == true);
  CHECK(j["assertoric"]["alpha"]["pass"] == true);
  CHECK(j["qualitative"]["distinctive"]["margin"].get<double>() > 0.0);

  CHECK(audit::result_csv_header() ==
        "agent,channel,assertoric_alpha,assertoric_persist,immediate,"
        "self_grounded,metric_valid,distinctive,verdict");
  CHECK(audit::result_to_csv("default", r) ==
        "default,pain,1,1,1,1,1,1,1");
}

TEST_CASE("ablation names round-trip") {
  for (auto a : {audit::Ablation::FlattenGate, audit::Ablation::TagSilencing,
                 audit::Ablation::ExternalProfileTable,
                 audit::Ablation::CollapseSpace})
    CHECK(audit::ablation_from_name(audit::ablation_name(a)) == a);
  CHECK(err_of([] { audit::ablation_from_name("melt"); }) ==
        Err::ConfigInvalid);
}
