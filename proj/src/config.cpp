#include "sentsim/config.hpp"

#include <fstream>

namespace sentsim::config {

using nlohmann::json;
using perception::EncoderParams;

namespace {

const json& need(const json& j, const char* key, const std::string& who) {
  auto it = j.find(key);
  require(it != j.end(), Err::ConfigInvalid, who + ": missing '" + key + "'");
  return *it;
}

double as_num(const json& j, const std::string& who) {
  require(j.is_number(), Err::ConfigInvalid, who + ": expected a number");
  return j.get<double>();
}

std::string as_str(const json& j, const std::string& who) {
  require(j.is_string(), Err::ConfigInvalid, who + ": expected a string");
  return j.get<std::string>();
}

double get_num(const json& j, const char* key, double def,
               const std::string& who) {
  auto it = j.find(key);
  return it == j.end() ? def : as_num(*it, who + "." + key);
}

long long get_int(const json& j, const char* key, long long def,
                  const std::string& who) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_number_integer(), Err::ConfigInvalid,
          who + "." + key + ": expected an integer");
  return it->get<long long>();
}

bool get_bool(const json& j, const char* key, bool def,
              const std::string& who) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_boolean(), Err::ConfigInvalid,
          who + "." + key + ": expected a boolean");
  return it->get<bool>();
}

Vec as_vec(const json& j, const std::string& who) {
  require(j.is_array(), Err::ConfigInvalid, who + ": expected an array");
  Vec v;
  for (const auto& x : j) v.push_back(as_num(x, who));
  return v;
}

std::vector<std::string> as_str_vec(const json& j, const std::string& who) {
  require(j.is_array(), Err::ConfigInvalid, who + ": expected an array");
  std::vector<std::string> v;
  for (const auto& x : j) v.push_back(as_str(x, who));
  return v;
}

envs::EnvSpec env_from_json(const json& j, std::uint64_t fallback_seed,
                            const std::string& who) {
  require(j.is_object(), Err::ConfigInvalid, who + ": expected an object");
  envs::EnvSpec e;
  e.kind = envs::env_kind_from_name(as_str(need(j, "kind", who), who));
  e.horizon = get_int(j, "horizon", e.horizon, who);
  e.seed = static_cast<std::uint64_t>(
      get_int(j, "seed", static_cast<long long>(fallback_seed), who));
  e.sigma = get_num(j, "sigma", e.sigma, who);
  e.bias = get_num(j, "bias", e.bias, who);
  e.rate = get_num(j, "rate", e.rate, who);
  e.measure_sigma = get_num(j, "measure_sigma", e.measure_sigma, who);
  if (j.contains("latent")) e.latent = as_vec(j.at("latent"), who + ".latent");
  envs::validate_spec(e);
  return e;
}

int latent_dim_of(const envs::EnvSpec& e) {
  switch (e.kind) {
    case envs::EnvKind::Noisy: return static_cast<int>(e.latent.size());
    case envs::EnvKind::Illusion: return 2;
    case envs::EnvKind::Hallucination: return 2;
    case envs::EnvKind::CrossModal: return 2;
  }
  return static_cast<int>(e.latent.size());
}

EncoderParams truth_from_json(const json& parent, const envs::EnvSpec& env,
                              std::uint64_t seed, const std::string& who) {
  auto it = parent.find("truth");
  if (it == parent.end() || (it->is_string() && *it == "identity"))
    return perception::identity_encoder(latent_dim_of(env));
  return net_from_json(*it, seed, who + ".truth");
}

struct TrainHp {
  double lr = 0.05;
  int epochs = 200;
  int batch = 16;
  std::string stream;
  std::vector<int> hidden;
};

TrainHp hp_from_json(const json& j, const std::string& def_stream,
                     const std::string& who) {
  TrainHp h;
  h.lr = get_num(j, "learning_rate", h.lr, who);
  h.epochs = static_cast<int>(get_int(j, "epochs", h.epochs, who));
  h.batch = static_cast<int>(get_int(j, "batch", h.batch, who));
  h.stream = j.contains("stream") ? as_str(j.at("stream"), who + ".stream")
                                  : def_stream;
  if (j.contains("hidden"))
    for (double d : as_vec(j.at("hidden"), who + ".hidden"))
      h.hidden.push_back(static_cast<int>(d));
  require(h.lr > 0.0 && h.epochs > 0 && h.batch > 0, Err::ConfigInvalid,
          who + ": bad training hyperparameters");
  return h;
}

EncoderParams fresh_mlp(int in, const std::vector<int>& hidden, int out,
                        core::RngStream& rng) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  std::vector<perception::Activation> acts(
      hidden.size(), perception::Activation::Tanh);
  acts.push_back(perception::Activation::Identity);
  return perception::init_encoder(dims, acts, rng);
}

std::vector<std::pair<long long, perception::PerceptualRepresentation>>
channel_reps(const envs::Episode& ep, const EncoderParams& enc,
             const std::string& channel) {
  std::vector<std::pair<long long, perception::PerceptualRepresentation>> out;
  for (std::size_t t = 0; t < ep.observations.size(); ++t)
    for (const auto& sig : ep.observations[t])
      if (sig.channel_id == channel)
        out.emplace_back(static_cast<long long>(t),
                         perception::encode(enc, sig));
  return out;
}

perception::TrainConfig train_cfg(const TrainHp& hp, std::uint64_t seed,
                                  perception::LossKind loss) {
  perception::TrainConfig tc;
  tc.learning_rate = hp.lr;
  tc.epochs = hp.epochs;
  tc.batch = hp.batch;
  tc.seed = seed;
  tc.loss = loss;
  tc.stream_id = "sgd/" + hp.stream;
  return tc;
}

EncoderParams train_decoder(const json& j, const cps::ChannelConfig& ch,
                            std::uint64_t seed, const std::string& who) {
  envs::EnvSpec cal = env_from_json(need(j, "env", who), seed, who + ".env");
  auto ep = envs::gen_episode(cal);
  auto truth = truth_from_json(j, cal, seed, who);
  auto hp = hp_from_json(j, "dec/" + ch.channel_id, who);
  perception::Dataset data;
  for (const auto& [t, rep] : channel_reps(ep, ch.encoder, ch.channel_id))
    data.push_back({rep.vector, perception::forward(
                                    truth, ep.ground_truth[t].latent)});
  require(!data.empty(), Err::ConfigInvalid,
          who + ": calibration env emits nothing on '" + ch.channel_id + "'");
  core::RngStream rng(seed, "init/" + hp.stream);
  auto net = fresh_mlp(perception::output_dim(ch.encoder), hp.hidden,
                       perception::output_dim(truth), rng);
  return perception::train_encoder(
             net, data, train_cfg(hp, seed, perception::LossKind::SquaredError))
      .params;
}

EncoderParams train_supervised(const json& j, const cps::ChannelConfig& ch,
                               std::uint64_t seed, const std::string& who) {
  if (j.contains("type")) return net_from_json(j, seed, who);
  envs::EnvSpec cal = env_from_json(need(j, "env", who), seed, who + ".env");
  auto ep = envs::gen_episode(cal);
  auto truth = truth_from_json(j, cal, seed, who);
  double tol = get_num(j, "tolerance", 0.15, who);
  require(tol > 0.0, Err::ConfigInvalid, who + ": tolerance must be positive");
  auto hp = hp_from_json(j, "sup/" + ch.channel_id, who);
  perception::Dataset data;
  for (const auto& [t, rep] : channel_reps(ep, ch.encoder, ch.channel_id)) {
    Vec decoded = perception::forward(ch.decoder, rep.vector);
    Vec target = perception::forward(truth, ep.ground_truth[t].latent);
    double label = vecmath::l2_dist(decoded, target) <= tol ? 1.0 : 0.0;
    data.push_back({rep.vector, {label}});
  }
  require(!data.empty(), Err::ConfigInvalid,
          who + ": calibration env emits nothing on '" + ch.channel_id + "'");
  core::RngStream rng(seed, "init/" + hp.stream);
  auto net = fresh_mlp(perception::output_dim(ch.encoder), hp.hidden, 1, rng);
  return perception::train_encoder(
             net, data, train_cfg(hp, seed, perception::LossKind::LogisticBce))
      .params;
}

taggers::TemporalPredictor train_temporal(const json& j,
                                          const cps::ChannelConfig& ch,
                                          std::uint64_t seed,
                                          const std::string& who) {
  taggers::TemporalPredictor p;
  p.k = static_cast<int>(get_int(j, "k", 1, who));
  p.tau = get_num(j, "tau", 1.0, who);
  if (j.contains("net")) {
    p.params = net_from_json(j.at("net"), seed, who + ".net");
    taggers::validate_predictor(p);
    return p;
  }
  envs::EnvSpec cal = env_from_json(need(j, "env", who), seed, who + ".env");
  auto ep = envs::gen_episode(cal);
  auto hp = hp_from_json(j, "tmp/" + ch.channel_id, who);
  auto reps = channel_reps(ep, ch.encoder, ch.channel_id);
  int d = perception::output_dim(ch.encoder);
  require(static_cast<int>(reps.size()) > p.k, Err::ConfigInvalid,
          who + ": calibration horizon shorter than the window");
  perception::Dataset data;
  for (std::size_t i = static_cast<std::size_t>(p.k); i < reps.size(); ++i) {
    Vec x;
    for (std::size_t w = i - static_cast<std::size_t>(p.k); w < i; ++w)
      x = vecmath::concat(x, reps[w].second.vector);
    data.push_back({std::move(x), reps[i].second.vector});
  }
  core::RngStream rng(seed, "init/" + hp.stream);
  auto net = fresh_mlp(p.k * d, hp.hidden, d, rng);
  p.params = perception::train_encoder(
                 net, data,
                 train_cfg(hp, seed, perception::LossKind::SquaredError))
                 .params;
  taggers::validate_predictor(p);
  return p;
}

taggers::BayesianScorer bayes_from_json(const json& j, std::uint64_t seed,
                                        const std::string& who) {
  taggers::BayesianScorer b;
  b.prior_mean = as_vec(need(j, "prior_mean", who), who + ".prior_mean");
  b.prior_precision =
      as_vec(need(j, "prior_precision", who), who + ".prior_precision");
  b.likelihood_model =
      net_from_json(need(j, "likelihood", who), seed, who + ".likelihood");
  b.noise_precision = get_num(j, "noise_precision", 1.0, who);
  b.calib_mid = get_num(j, "calib_mid", 0.0, who);
  b.calib_scale = get_num(j, "calib_scale", 1.0, who);
  taggers::validate_scorer(b);
  return b;
}

void parse_taggers(const json& j, cps::ChannelConfig& ch, std::uint64_t seed,
                   const std::string& who) {
  require(j.is_object(), Err::ConfigInvalid, who + ": expected an object");
  for (const auto& [key, val] : j.items()) {
    (void)val;
    require(key == "combine" || key == "history_repair" ||
                key == "repair_threshold" || key == "supervised" ||
                key == "temporal" || key == "bayes",
            Err::ConfigInvalid, who + ": unknown tagger id '" + key + "'");
  }
  auto& tg = ch.taggers;
  if (j.contains("combine"))
    tg.combine =
        cps::tag_combine_from_name(as_str(j.at("combine"), who + ".combine"));
  tg.history_repair = get_bool(j, "history_repair", tg.history_repair, who);
  tg.repair_threshold =
      get_num(j, "repair_threshold", tg.repair_threshold, who);
  if (j.contains("supervised"))
    tg.supervised =
        train_supervised(j.at("supervised"), ch, seed, who + ".supervised");
  if (j.contains("temporal"))
    tg.temporal =
        train_temporal(j.at("temporal"), ch, seed, who + ".temporal");
  if (j.contains("bayes"))
    tg.bayes = bayes_from_json(j.at("bayes"), seed, who + ".bayes");
}

cps::ChannelConfig build_channel(const json& j, std::uint64_t seed) {
  require(j.is_object(), Err::ConfigInvalid, "channel: expected an object");
  cps::ChannelConfig ch;
  ch.channel_id = as_str(need(j, "id", "channel"), "channel.id");
  const std::string who = "channel '" + ch.channel_id + "'";

  ch.encoder = net_from_json(need(j, "encoder", who), seed, who + ".encoder");
  const json& jdec = need(j, "decoder", who);
  if (jdec.is_object() && jdec.value("type", "") == "train")
    ch.decoder = train_decoder(jdec, ch, seed, who + ".decoder");
  else
    ch.decoder = net_from_json(jdec, seed, who + ".decoder");
  ch.head = net_from_json(need(j, "head", who), seed, who + ".head");
  ch.hypotheses =
      as_str_vec(need(j, "hypotheses", who), who + ".hypotheses");
  ch.variable_id = as_str(need(j, "variable", who), who + ".variable");

  const json& jg = need(j, "gate", who);
  ch.gate.alpha = as_num(need(jg, "alpha", who + ".gate"), who + ".gate.alpha");
  if (jg.contains("betas"))
    ch.gate.betas = as_vec(jg.at("betas"), who + ".gate.betas");
  std::string clamp = jg.contains("clamp")
                          ? as_str(jg.at("clamp"), who + ".gate.clamp")
                          : "floor_one";
  if (clamp == "floor_one") ch.gate.clamp_mode = core::ClampMode::FloorOne;
  else if (clamp == "cap_one") ch.gate.clamp_mode = core::ClampMode::CapOne;
  else raise(Err::ConfigInvalid, who + ": unknown clamp '" + clamp + "'");
  if (jg.contains("conflict_sources"))
    ch.conflict_sources =
        as_str_vec(jg.at("conflict_sources"), who + ".gate.conflict_sources");

  const json& js = need(j, "space", who);
  int dim = static_cast<int>(as_num(need(js, "dim", who + ".space"),
                                    who + ".space.dim"));
  ch.space = simspace::make_continuous(ch.channel_id + "-space", dim);

  const json& jr = need(j, "references", who);
  require(jr.is_array(), Err::ConfigInvalid,
          who + ".references: expected an array");
  int idx = 0;
  for (const auto& r : jr) {
    ch.references.push_back(perception::PerceptualRepresentation{
        ch.channel_id + "-ref" + std::to_string(idx), as_vec(r, who + ".references"),
        ch.channel_id, 0});
    ++idx;
  }
  ch.prototype = as_vec(need(j, "prototype", who), who + ".prototype");

  if (j.contains("taggers"))
    parse_taggers(j.at("taggers"), ch, seed, who + ".taggers");
  return ch;
}

}  // namespace

EncoderParams net_from_json(const json& j, std::uint64_t seed,
                            const std::string& who) {
  require(j.is_object(), Err::ConfigInvalid, who + ": expected an object");
  std::string type = as_str(need(j, "type", who), who + ".type");
  if (type == "identity") {
    int dim = static_cast<int>(as_num(need(j, "dim", who), who + ".dim"));
    return perception::identity_encoder(dim);
  }
  if (type == "linear") {
    const json& rows = need(j, "weights", who);
    require(rows.is_array() && !rows.empty(), Err::ConfigInvalid,
            who + ".weights: expected a non-empty array of rows");
    std::vector<double> flat;
    std::size_t in = 0;
    for (const auto& r : rows) {
      Vec row = as_vec(r, who + ".weights");
      if (in == 0) in = row.size();
      require(row.size() == in && in > 0, Err::ConfigInvalid,
              who + ".weights: ragged rows");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    std::size_t out = rows.size();
    Vec bias(out, 0.0);
    if (j.contains("bias")) bias = as_vec(j.at("bias"), who + ".bias");
    require(bias.size() == out, Err::ConfigInvalid, who + ".bias: size");
    EncoderParams p;
    p.layer_dims = {static_cast<int>(in), static_cast<int>(out)};
    p.weights = {std::move(flat)};
    p.biases = {std::move(bias)};
    p.activations = {perception::Activation::Identity};
    perception::validate_params(p);
    return p;
  }
  if (type == "init") {
    const json& jd = need(j, "layer_dims", who);
    std::vector<int> dims;
    for (double d : as_vec(jd, who + ".layer_dims"))
      dims.push_back(static_cast<int>(d));
    std::vector<perception::Activation> acts;
    for (const auto& name :
         as_str_vec(need(j, "activations", who), who + ".activations"))
      acts.push_back(perception::activation_from_name(name));
    std::string stream =
        j.contains("stream") ? as_str(j.at("stream"), who + ".stream") : "net";
    core::RngStream rng(seed, "net/" + stream);
    return perception::init_encoder(dims, acts, rng);
  }
  if (type == "explicit")
    return perception::params_from_json(need(j, "params", who));
  raise(Err::ConfigInvalid, who + ": unknown net type '" + type + "'");
}

RunConfig parse_config(const json& doc) {
  require(doc.is_object(), Err::ConfigInvalid, "config root must be an object");
  require(doc.contains("seed"), Err::ConfigInvalid,
          "config: missing 'seed' (wall-clock seeding is not supported)");
  require(doc.at("seed").is_number_integer(), Err::ConfigInvalid,
          "config.seed: expected an integer");
  const json& env = need(doc, "env", "config");
  env_from_json(env, static_cast<std::uint64_t>(doc.at("seed").get<long long>()),
                "config.env");
  const json& channels = need(doc, "channels", "config");
  require(channels.is_array() && !channels.empty(), Err::ConfigInvalid,
          "config.channels: expected a non-empty array");
  need(doc, "utility", "config");
  return RunConfig{doc};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::ConfigInvalid, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    raise(Err::ConfigInvalid, "parse error in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

std::uint64_t run_seed(const RunConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.doc.at("seed").get<long long>());
}

std::string scenario(const RunConfig& cfg) {
  if (cfg.doc.contains("scenario"))
    return as_str(cfg.doc.at("scenario"), "config.scenario");
  return envs::env_kind_name(env_spec(cfg).kind);
}

envs::EnvSpec env_spec(const RunConfig& cfg) {
  return env_from_json(cfg.doc.at("env"), run_seed(cfg), "config.env");
}

bool audit_enabled(const RunConfig& cfg) {
  if (!cfg.doc.contains("audit")) return false;
  return get_bool(cfg.doc.at("audit"), "enabled", false, "config.audit");
}

std::string audit_channel(const RunConfig& cfg) {
  return as_str(need(need(cfg.doc, "audit", "config"), "channel",
                     "config.audit"),
                "config.audit.channel");
}

audit::AuditConfig audit_config(const RunConfig& cfg) {
  audit::AuditConfig a;
  if (!cfg.doc.contains("audit")) return a;
  const json& j = cfg.doc.at("audit");
  a.epsilon = get_num(j, "epsilon", a.epsilon, "config.audit");
  a.delta = get_num(j, "delta", a.delta, "config.audit");
  a.r_assertoric = get_num(j, "r_assertoric", a.r_assertoric, "config.audit");
  a.probe_count = static_cast<int>(
      get_int(j, "probe_count", a.probe_count, "config.audit"));
  a.seed = static_cast<std::uint64_t>(
      get_int(j, "seed", static_cast<long long>(a.seed), "config.audit"));
  audit::validate_config(a);
  return a;
}

MetricsSpec metrics_spec(const RunConfig& cfg) {
  auto env = env_spec(cfg);
  const json& channels = cfg.doc.at("channels");
  json m = cfg.doc.value("metrics", json::object());
  MetricsSpec s;
  s.channel = m.contains("channel")
                  ? as_str(m.at("channel"), "config.metrics.channel")
                  : as_str(need(channels.at(0), "id", "channel"), "channel.id");
  const json* chosen = nullptr;
  for (const auto& ch : channels)
    if (ch.is_object() && ch.value("id", "") == s.channel) chosen = &ch;
  require(chosen != nullptr, Err::ConfigInvalid,
          "config.metrics: unknown channel '" + s.channel + "'");
  s.variable = m.contains("variable")
                   ? as_str(m.at("variable"), "config.metrics.variable")
                   : as_str(need(*chosen, "variable", "channel"),
                            "channel.variable");
  s.truth = truth_from_json(m, env, run_seed(cfg), "config.metrics");
  return s;
}

cps::Agent build_agent(const RunConfig& cfg) {
  const json& doc = cfg.doc;
  std::uint64_t seed = run_seed(cfg);
  cps::AgentConfig ac;

  if (doc.contains("fusion")) {
    const json& f = doc.at("fusion");
    ac.fusion.adopt_threshold =
        get_num(f, "adopt_threshold", ac.fusion.adopt_threshold, "config.fusion");
    ac.fusion.ignore_threshold = get_num(f, "ignore_threshold",
                                         ac.fusion.ignore_threshold,
                                         "config.fusion");
    ac.fusion.reliability_to_precision_gain =
        get_num(f, "gain", ac.fusion.reliability_to_precision_gain,
                "config.fusion");
  }

  const json& ju = doc.at("utility");
  ac.utility.action_ids =
      as_str_vec(need(ju, "actions", "config.utility"), "config.utility.actions");
  const json& table = need(ju, "table", "config.utility");
  require(table.is_object(), Err::ConfigInvalid,
          "config.utility.table: expected an object");
  for (const auto& [bucket, row] : table.items()) {
    require(row.is_object(), Err::ConfigInvalid,
            "config.utility.table." + bucket + ": expected an object");
    for (const auto& [action, u] : row.items())
      ac.utility.utility[bucket][action] =
          as_num(u, "config.utility.table." + bucket + "." + action);
  }

  if (doc.contains("reality_competitor")) {
    const json& r = doc.at("reality_competitor");
    auto& rc = ac.reality_competitor;
    rc.enabled = get_bool(r, "enabled", false, "config.reality_competitor");
    if (rc.enabled) {
      rc.variable_id = as_str(need(r, "variable", "config.reality_competitor"),
                              "config.reality_competitor.variable");
      rc.hypotheses = as_str_vec(
          need(r, "hypotheses", "config.reality_competitor"),
          "config.reality_competitor.hypotheses");
      rc.threshold =
          get_num(r, "threshold", rc.threshold, "config.reality_competitor");
      rc.width = get_num(r, "width", rc.width, "config.reality_competitor");
      rc.reliability = get_num(r, "reliability", rc.reliability,
                               "config.reality_competitor");
    }
  }

  if (doc.contains("silencing")) {
    const json& s = doc.at("silencing");
    ac.silencing.enabled = get_bool(s, "enabled", false, "config.silencing");
    ac.silencing.threshold =
        get_num(s, "threshold", ac.silencing.threshold, "config.silencing");
  }
  ac.r_assertoric =
      get_num(doc, "r_assertoric", ac.r_assertoric, "config");

  for (const auto& jch : doc.at("channels"))
    ac.channels.push_back(build_channel(jch, seed));

  return cps::make_agent(std::move(ac));
}

void apply_override(json& doc, const std::string& key, const json& value) {
  require(!key.empty(), Err::BadGridKey, "empty key");
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  json* node = &doc;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& seg = parts[i];
    require(!seg.empty(), Err::BadGridKey, "'" + key + "'");
    if (node->is_object()) {
      require(node->contains(seg), Err::BadGridKey,
              "'" + key + "' (no member '" + seg + "')");
      if (i + 1 == parts.size()) {
        (*node)[seg] = value;
        return;
      }
      node = &(*node)[seg];
    } else if (node->is_array()) {
      require(!seg.empty() &&
                  seg.find_first_not_of("0123456789") == std::string::npos,
              Err::BadGridKey, "'" + key + "' (non-numeric index '" + seg + "')");
      std::size_t idx = static_cast<std::size_t>(std::stoull(seg));
      require(idx < node->size(), Err::BadGridKey,
              "'" + key + "' (index " + seg + " out of range)");
      if (i + 1 == parts.size()) {
        (*node)[idx] = value;
        return;
      }
      node = &(*node)[idx];
    } else {
      raise(Err::BadGridKey, "'" + key + "' (segment '" + seg +
                                 "' is not an object or array)");
    }
  }
}

}  // namespace sentsim::config
