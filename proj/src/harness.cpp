#include "sentsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>

#include "sentsim/version.hpp"

namespace sentsim::harness {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kMetricsCsvHeader =
    "config_hash,scenario,seed,horizon,tagger_auc,final_reality_error,"
    "final_percept_bias,audit_assertoric,audit_qualitative,audit_verdict";

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_opt(const std::optional<double>& x) {
  return x ? fmt_double(*x) : "na";
}

std::string fmt_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

json series_to_json(const Series& s) { return json{{"t", s.t}, {"v", s.v}}; }

Series series_from_json(const json& j) {
  Series s;
  s.t = j.at("t").get<std::vector<long long>>();
  s.v = j.at("v").get<Vec>();
  return s;
}

json opt_to_json(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

std::optional<double> opt_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json metrics_to_json(const Metrics& m) {
  return json{{"tagger_auc", opt_to_json(m.tagger_auc)},
              {"final_reality_error", opt_to_json(m.final_reality_error)},
              {"final_percept_bias", opt_to_json(m.final_percept_bias)},
              {"reality_error", series_to_json(m.reality_error)},
              {"conflict", series_to_json(m.conflict)},
              {"reliability", series_to_json(m.reliability)},
              {"decision_counts", m.decision_counts}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.tagger_auc = opt_from_json(j.at("tagger_auc"));
  m.final_reality_error = opt_from_json(j.at("final_reality_error"));
  m.final_percept_bias = opt_from_json(j.at("final_percept_bias"));
  m.reality_error = series_from_json(j.at("reality_error"));
  m.conflict = series_from_json(j.at("conflict"));
  m.reliability = series_from_json(j.at("reliability"));
  m.decision_counts =
      j.at("decision_counts").get<std::map<std::string, long long>>();
  return m;
}

json signal_to_json(const core::SensorySignal& s) {
  return json{{"channel", s.channel_id},
              {"t", s.t},
              {"values", s.values},
              {"origin", core::origin_name(s.origin)}};
}

core::SensorySignal signal_from_json(const json& j) {
  core::SensorySignal s;
  s.channel_id = j.at("channel").get<std::string>();
  s.t = j.at("t").get<long long>();
  s.values = j.at("values").get<Vec>();
  s.origin = core::origin_from_name(j.at("origin").get<std::string>());
  return s;
}

json profile_to_json(const simspace::SimilarityProfile& p) {
  return json{{"subject", p.subject},
              {"reference_ids", p.reference_ids},
              {"distances", p.distances}};
}

simspace::SimilarityProfile profile_from_json(const json& j) {
  simspace::SimilarityProfile p;
  p.subject = j.at("subject").get<std::string>();
  p.reference_ids = j.at("reference_ids").get<std::vector<std::string>>();
  p.distances = j.at("distances").get<Vec>();
  return p;
}

json decision_to_json(const cps::DecisionOutcome& d) {
  json entries = json::array();
  for (const auto& e : d.trace)
    entries.push_back(json{
        {"input_id", e.input_id}, {"score", e.score}, {"tag", e.tag}});
  return json{{"chosen", d.chosen},
              {"chosen_source", d.chosen_source},
              {"weighted_scores", d.weighted_scores},
              {"trace", entries}};
}

cps::DecisionOutcome decision_from_json(const json& j) {
  cps::DecisionOutcome d;
  d.chosen = j.at("chosen").get<std::string>();
  d.chosen_source = j.at("chosen_source").get<std::string>();
  d.weighted_scores = j.at("weighted_scores").get<Vec>();
  for (const auto& e : j.at("trace"))
    d.trace.push_back(cps::TraceEntry{e.at("input_id").get<std::string>(),
                                      e.at("score").get<double>(),
                                      e.at("tag").get<double>()});
  return d;
}

std::vector<const cps::ChannelConfig*> agent_channels(const cps::Agent& a) {
  std::vector<const cps::ChannelConfig*> out;
  for (const auto& ch : a.cfg.channels) out.push_back(&ch);
  return out;
}

}  // namespace

std::optional<double> auc_score(const Vec& scores,
                                const std::vector<int>& labels) {
  require(scores.size() == labels.size(), Err::SizeMismatch,
          "auc: scores vs labels");
  std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int l : labels) pos += l != 0 ? 1 : 0;
  std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] != 0) rank_sum_pos += midrank;
    i = j;
  }
  double u = rank_sum_pos -
             static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

Metrics compute_metrics(const std::vector<cps::StepTrace>& traces,
                        const envs::Episode& episode,
                        const config::MetricsSpec& spec) {
  Metrics m;
  Vec auc_scores;
  std::vector<int> auc_labels;
  const cps::StepTrace* last_on_channel = nullptr;
  auto truth_at = [&](long long t) {
    return perception::forward(
        spec.truth, episode.ground_truth[static_cast<std::size_t>(t)].latent);
  };
  for (const auto& tr : traces) {
    ++m.decision_counts[tr.decision.chosen];
    if (tr.channel != spec.channel) continue;
    bool in_episode =
        tr.t >= 0 &&
        static_cast<std::size_t>(tr.t) < episode.ground_truth.size();
    m.conflict.t.push_back(tr.t);
    m.conflict.v.push_back(tr.conflict_measure);
    m.reliability.t.push_back(tr.t);
    m.reliability.v.push_back(tr.combined_reliability);
    if (in_episode) {
      auto it = tr.belief_after.find(spec.variable);
      if (it != tr.belief_after.end()) {
        Vec target = truth_at(tr.t);
        if (it->second.mean.size() == target.size()) {
          m.reality_error.t.push_back(tr.t);
          m.reality_error.v.push_back(
              vecmath::l2_dist(it->second.mean, target));
        }
      }
      if (!tr.tagger_reliabilities.empty()) {
        const auto& origins =
            episode.ground_truth[static_cast<std::size_t>(tr.t)].origins;
        auto o = origins.find(tr.channel);
        if (o != origins.end() && o->second != core::Origin::Unknown) {
          auc_scores.push_back(tr.combined_reliability);
          auc_labels.push_back(o->second == core::Origin::External ? 1 : 0);
        }
      }
      last_on_channel = &tr;
    }
  }
  if (!m.reality_error.v.empty())
    m.final_reality_error = m.reality_error.v.back();
  if (last_on_channel != nullptr) {
    Vec target = truth_at(last_on_channel->t);
    if (last_on_channel->decoded.size() == target.size())
      m.final_percept_bias = vecmath::l2_dist(last_on_channel->decoded, target);
  }
  m.tagger_auc = auc_score(auc_scores, auc_labels);
  return m;
}

std::string now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string config_hash(const json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(core::fnv1a64(doc.dump())));
  return buf;
}

json episode_to_json(const envs::Episode& ep) {
  json spec{{"kind", envs::env_kind_name(ep.spec.kind)},
            {"horizon", ep.spec.horizon},
            {"seed", ep.spec.seed},
            {"sigma", ep.spec.sigma},
            {"bias", ep.spec.bias},
            {"rate", ep.spec.rate},
            {"measure_sigma", ep.spec.measure_sigma},
            {"latent", ep.spec.latent}};
  json obs = json::array();
  for (const auto& step : ep.observations) {
    json row = json::array();
    for (const auto& s : step) row.push_back(signal_to_json(s));
    obs.push_back(std::move(row));
  }
  json truth = json::array();
  for (const auto& g : ep.ground_truth) {
    json origins = json::object();
    for (const auto& [ch, o] : g.origins) origins[ch] = core::origin_name(o);
    truth.push_back(json{{"latent", g.latent}, {"origins", origins}});
  }
  return json{{"spec", spec}, {"observations", obs}, {"ground_truth", truth}};
}

envs::Episode episode_from_json(const json& j) {
  envs::Episode ep;
  const json& s = j.at("spec");
  ep.spec.kind = envs::env_kind_from_name(s.at("kind").get<std::string>());
  ep.spec.horizon = s.at("horizon").get<long long>();
  ep.spec.seed = s.at("seed").get<std::uint64_t>();
  ep.spec.sigma = s.at("sigma").get<double>();
  ep.spec.bias = s.at("bias").get<double>();
  ep.spec.rate = s.at("rate").get<double>();
  ep.spec.measure_sigma = s.at("measure_sigma").get<double>();
  ep.spec.latent = s.at("latent").get<Vec>();
  for (const auto& row : j.at("observations")) {
    std::vector<core::SensorySignal> step;
    for (const auto& sig : row) step.push_back(signal_from_json(sig));
    ep.observations.push_back(std::move(step));
  }
  for (const auto& g : j.at("ground_truth")) {
    envs::StepTruth t;
    t.latent = g.at("latent").get<Vec>();
    for (const auto& [ch, o] : g.at("origins").items())
      t.origins[ch] = core::origin_from_name(o.get<std::string>());
    ep.ground_truth.push_back(std::move(t));
  }
  return ep;
}

json trace_to_json(const cps::StepTrace& tr) {
  json conflicts = json::array();
  for (const auto& c : tr.conflicts)
    conflicts.push_back(json{{"source", c.source_id},
                             {"values", c.values},
                             {"weight_hint", c.weight_hint}});
  json belief = json::object();
  for (const auto& [var, est] : tr.belief_after)
    belief[var] = json{{"mean", est.mean}, {"precision", est.precision}};
  return json{{"t", tr.t},
              {"channel", tr.channel},
              {"rep_id", tr.rep_id},
              {"rep", tr.rep},
              {"profile", profile_to_json(tr.profile)},
              {"profile_deferred", tr.profile_deferred},
              {"tagger_reliabilities", tr.tagger_reliabilities},
              {"combined_reliability", tr.combined_reliability},
              {"s_strength", tr.s_strength},
              {"conflicts", conflicts},
              {"priority", tr.priority},
              {"decoded", tr.decoded},
              {"conflict_measure", tr.conflict_measure},
              {"percept_choice", tr.percept_choice},
              {"percept_silenced", tr.percept_silenced},
              {"decision", decision_to_json(tr.decision)},
              {"action", tr.action},
              {"proxy_label", tr.proxy_label},
              {"belief_after", belief}};
}

cps::StepTrace trace_from_json(const json& j) {
  cps::StepTrace tr;
  tr.t = j.at("t").get<long long>();
  tr.channel = j.at("channel").get<std::string>();
  tr.rep_id = j.at("rep_id").get<std::string>();
  tr.rep = j.at("rep").get<Vec>();
  tr.profile = profile_from_json(j.at("profile"));
  tr.profile_deferred = j.at("profile_deferred").get<bool>();
  tr.tagger_reliabilities =
      j.at("tagger_reliabilities").get<std::map<std::string, double>>();
  tr.combined_reliability = j.at("combined_reliability").get<double>();
  tr.s_strength = j.at("s_strength").get<double>();
  for (const auto& c : j.at("conflicts"))
    tr.conflicts.push_back(core::ConflictInput{
        c.at("source").get<std::string>(), c.at("values").get<Vec>(),
        c.at("weight_hint").get<double>()});
  tr.priority = j.at("priority").get<double>();
  tr.decoded = j.at("decoded").get<Vec>();
  tr.conflict_measure = j.at("conflict_measure").get<double>();
  tr.percept_choice = j.at("percept_choice").get<std::string>();
  tr.percept_silenced = j.at("percept_silenced").get<bool>();
  tr.decision = decision_from_json(j.at("decision"));
  tr.action = j.at("action").get<std::string>();
  tr.proxy_label = j.at("proxy_label").get<std::string>();
  for (const auto& [var, est] : j.at("belief_after").items())
    tr.belief_after[var] = core::Estimate{est.at("mean").get<Vec>(),
                                          est.at("precision").get<double>()};
  return tr;
}

json record_to_json(const RunRecord& rec) {
  json traces = json::array();
  for (const auto& tr : rec.traces) traces.push_back(trace_to_json(tr));
  return json{{"version", rec.version},
              {"timestamp", rec.timestamp},
              {"config", rec.config},
              {"config_hash", rec.config_hash},
              {"episode", episode_to_json(rec.episode)},
              {"traces", traces},
              {"metrics", metrics_to_json(rec.metrics)},
              {"audit", rec.audit}};
}

RunRecord record_from_json(const json& j) {
  RunRecord rec;
  rec.version = j.at("version").get<std::string>();
  rec.timestamp = j.at("timestamp").get<std::string>();
  rec.config = j.at("config");
  rec.config_hash = j.at("config_hash").get<std::string>();
  rec.episode = episode_from_json(j.at("episode"));
  for (const auto& tr : j.at("traces"))
    rec.traces.push_back(trace_from_json(tr));
  rec.metrics = metrics_from_json(j.at("metrics"));
  rec.audit = j.at("audit");
  return rec;
}

bool records_equal_modulo_timestamp(const RunRecord& a, const RunRecord& b) {
  json ja = record_to_json(a);
  json jb = record_to_json(b);
  ja.erase("timestamp");
  jb.erase("timestamp");
  return ja == jb;
}

RunRecord run(const config::RunConfig& cfg) {
  auto env = config::env_spec(cfg);
  auto ep = envs::gen_episode(env);
  auto agent = config::build_agent(cfg);
  json audit_j = nullptr;
  if (config::audit_enabled(cfg)) {
    auto res = audit::audit_sentience(agent, config::audit_channel(cfg),
                                      config::audit_config(cfg));
    audit_j = audit::result_to_json(res);
  }
  auto channels = agent_channels(agent);
  for (const auto& step : ep.observations)
    for (const auto& sig : step)
      require(std::any_of(channels.begin(), channels.end(),
                          [&](const cps::ChannelConfig* ch) {
                            return ch->channel_id == sig.channel_id;
                          }),
              Err::ConfigInvalid,
              "environment emits channel '" + sig.channel_id +
                  "' but no channel config matches");
  std::vector<cps::StepTrace> traces;
  for (const auto& step : ep.observations)
    for (const auto& sig : step) {
      auto out = cps::step(agent, sig);
      agent = std::move(out.agent);
      traces.push_back(std::move(out.trace));
    }
  RunRecord rec;
  rec.version = kVersion;
  rec.timestamp = now_iso8601();
  rec.config = cfg.doc;
  rec.config_hash = config_hash(cfg.doc);
  rec.episode = std::move(ep);
  rec.metrics = compute_metrics(traces, rec.episode, config::metrics_spec(cfg));
  rec.traces = std::move(traces);
  rec.audit = std::move(audit_j);
  return rec;
}

void write_record(const RunRecord& rec, const std::string& dir) {
  fs::create_directories(dir);
  const std::string path = dir + "/record.json";
  std::ofstream out(path);
  require(out.good(), Err::ComponentFailure, "cannot write '" + path + "'");
  out << record_to_json(rec).dump(2) << "\n";
  require(out.good(), Err::ComponentFailure, "write failed for '" + path + "'");
}

RunRecord read_record(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::ConfigInvalid, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(Err::ConfigInvalid,
          "parse error in '" + path + "': " + e.what());
  }
  try {
    return record_from_json(j);
  } catch (const json::exception& e) {
    raise(Err::ConfigInvalid, "bad record '" + path + "': " + e.what());
  }
}

std::vector<RunRecord> sweep(const config::RunConfig& base,
                             const std::vector<GridAxis>& grid,
                             const std::string& out_root) {
  for (const auto& [key, values] : grid)
    require(!values.empty(), Err::BadGridKey, "'" + key + "' has no values");
  std::size_t cells = 1;
  for (const auto& axis : grid) cells *= axis.second.size();
  std::uint64_t base_seed = config::run_seed(base);
  std::vector<config::RunConfig> cfgs;
  for (std::size_t i = 0; i < cells; ++i) {
    json doc = base.doc;
    std::size_t rem = i;
    for (const auto& [key, values] : grid) {
      config::apply_override(doc, key, values[rem % values.size()]);
      rem /= values.size();
    }
    doc["seed"] = base_seed + i;
    cfgs.push_back(config::parse_config(doc));
  }
  std::vector<std::future<RunRecord>> futures;
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    futures.push_back(std::async(std::launch::async, [&cfgs, &out_root, i] {
      RunRecord rec = run(cfgs[i]);
      write_record(rec, out_root + "/cell_" + std::to_string(i));
      return rec;
    }));
  std::vector<RunRecord> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

std::string svg_line_plot(const std::string& title, const Series& s) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"320\" "
      "viewBox=\"0 0 640 320\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"320\" fill=\"white\"/>\n";
  out += "<text x=\"12\" y=\"20\" font-family=\"monospace\" font-size=\"13\">" +
         xml_escape(title) + "</text>\n";
  out += "<line x1=\"50\" y1=\"300\" x2=\"620\" y2=\"300\" stroke=\"black\"/>\n";
  out += "<line x1=\"50\" y1=\"30\" x2=\"50\" y2=\"300\" stroke=\"black\"/>\n";
  if (s.t.empty()) {
    out +=
        "<text x=\"280\" y=\"168\" font-family=\"monospace\" "
        "font-size=\"13\">no data</text>\n";
  } else {
    long long tmin = *std::min_element(s.t.begin(), s.t.end());
    long long tmax = *std::max_element(s.t.begin(), s.t.end());
    double vmin = *std::min_element(s.v.begin(), s.v.end());
    double vmax = *std::max_element(s.v.begin(), s.v.end());
    auto sx = [&](long long t) {
      if (tmax == tmin) return 335.0;
      return 50.0 + static_cast<double>(t - tmin) * 570.0 /
                        static_cast<double>(tmax - tmin);
    };
    auto sy = [&](double v) {
      if (vmax == vmin) return 165.0;
      return 300.0 - (v - vmin) * 270.0 / (vmax - vmin);
    };
    std::string pts;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!pts.empty()) pts += " ";
      pts += fmt_coord(sx(s.t[i])) + "," + fmt_coord(sy(s.v[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" "
           "points=\"" + pts + "\"/>\n";
    out += "<text x=\"8\" y=\"304\" font-family=\"monospace\" font-size=\"11\">" +
           xml_escape(fmt_coord(vmin)) + "</text>\n";
    out += "<text x=\"8\" y=\"34\" font-family=\"monospace\" font-size=\"11\">" +
           xml_escape(fmt_coord(vmax)) + "</text>\n";
    out += "<text x=\"50\" y=\"316\" font-family=\"monospace\" font-size=\"11\">t=" +
           std::to_string(tmin) + "</text>\n";
    out += "<text x=\"580\" y=\"316\" font-family=\"monospace\" font-size=\"11\">t=" +
           std::to_string(tmax) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string report(const std::string& dir) {
  require(fs::exists(dir), Err::EmptyRecords, "'" + dir + "' does not exist");
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "record.json")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  require(!paths.empty(), Err::EmptyRecords,
          "no record.json under '" + dir + "'");
  fs::create_directories(dir + "/plots");
  std::string csv = std::string(kMetricsCsvHeader) + "\n";
  for (const auto& path : paths) {
    RunRecord rec = read_record(path);
    auto cfg = config::parse_config(rec.config);
    auto env = config::env_spec(cfg);
    std::string row = rec.config_hash + "," + config::scenario(cfg) + "," +
                      std::to_string(config::run_seed(cfg)) + "," +
                      std::to_string(env.horizon) + "," +
                      fmt_opt(rec.metrics.tagger_auc) + "," +
                      fmt_opt(rec.metrics.final_reality_error) + "," +
                      fmt_opt(rec.metrics.final_percept_bias) + ",";
    if (rec.audit.is_null()) {
      row += "na,na,na";
    } else {
      auto flag = [](bool b) { return b ? std::string("1") : std::string("0"); };
      row += flag(rec.audit.at("assertoric").at("pass").get<bool>()) + "," +
             flag(rec.audit.at("qualitative").at("pass").get<bool>()) + "," +
             flag(rec.audit.at("verdict").get<bool>());
    }
    csv += row + "\n";

    const std::string prefix =
        rec.config_hash + "_" + std::to_string(config::run_seed(cfg));
    struct PlotSpec {
      const char* name;
      const Series* series;
    };
    const PlotSpec plots[] = {
        {"reality_error", &rec.metrics.reality_error},
        {"conflict", &rec.metrics.conflict},
        {"reliability", &rec.metrics.reliability},
    };
    for (const auto& p : plots) {
      const std::string out_path =
          dir + "/plots/" + prefix + "_" + p.name + ".svg";
      std::ofstream out(out_path);
      require(out.good(), Err::ComponentFailure,
              "cannot write '" + out_path + "'");
      out << svg_line_plot(prefix + " " + p.name, *p.series);
    }
  }
  std::ofstream out(dir + "/metrics.csv");
  require(out.good(), Err::ComponentFailure,
          "cannot write '" + dir + "/metrics.csv'");
  out << csv;
  return csv;
}

}  // namespace sentsim::harness
