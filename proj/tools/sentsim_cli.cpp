#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sentsim/harness.hpp"
#include "sentsim/version.hpp"

namespace {

using nlohmann::json;

// Relative output paths are anchored at SENTSIM_OUT_ROOT when it is set.
std::string resolve_out(const std::string& path) {
  const char* root = std::getenv("SENTSIM_OUT_ROOT");
  if (root == nullptr || *root == '\0' || path.empty() || path.front() == '/')
    return path;
  return std::string(root) + "/" + path;
}

json parse_grid_value(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::exception&) {
    return json(s);
  }
}

std::vector<sentsim::harness::GridAxis> parse_grid(
    const std::vector<std::string>& specs) {
  std::vector<sentsim::harness::GridAxis> grid;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    sentsim::require(eq != std::string::npos && eq > 0,
                     sentsim::Err::BadGridKey,
                     "expected key=v1,v2,... in '" + spec + "'");
    sentsim::harness::GridAxis axis;
    axis.first = spec.substr(0, eq);
    const std::string rest = spec.substr(eq + 1);
    std::size_t pos = 0;
    while (true) {
      auto comma = rest.find(',', pos);
      axis.second.push_back(parse_grid_value(
          rest.substr(pos, comma == std::string::npos ? comma : comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    grid.push_back(std::move(axis));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional-sentience simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sentsim::kVersion);

  std::string run_config;
  std::string run_out = "runs/run";
  auto* run_cmd = app.add_subcommand("run", "Run one configured episode");
  run_cmd->add_option("config", run_config, "config file")->required();
  run_cmd->add_option("--out", run_out, "output directory");

  std::string sweep_config;
  std::string sweep_out = "runs/sweep";
  std::vector<std::string> grid_specs;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a cartesian parameter sweep");
  sweep_cmd->add_option("config", sweep_config, "base config file")
      ->required();
  sweep_cmd->add_option("--grid", grid_specs,
                        "axis as key=v1,v2,... (repeatable)");
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  std::string audit_config_path;
  std::string audit_channel_id;
  std::string audit_out = "runs/audit";
  auto* audit_cmd =
      app.add_subcommand("audit", "Audit one channel of a configured agent");
  audit_cmd->add_option("config", audit_config_path, "config file")
      ->required();
  audit_cmd->add_option("--channel", audit_channel_id,
                        "channel to audit (defaults to audit.channel)");
  audit_cmd->add_option("--out", audit_out, "output directory");

  std::string report_dir;
  auto* report_cmd =
      app.add_subcommand("report", "Summarize records under a directory");
  report_cmd->add_option("dir", report_dir, "directory holding record.json files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) {
      auto cfg = sentsim::config::load_config(run_config);
      auto rec = sentsim::harness::run(cfg);
      const std::string dir = resolve_out(run_out);
      sentsim::harness::write_record(rec, dir);
      std::cout << "wrote " << dir << "/record.json traces="
                << rec.traces.size();
      if (rec.metrics.tagger_auc)
        std::cout << " tagger_auc=" << *rec.metrics.tagger_auc;
      if (rec.metrics.final_reality_error)
        std::cout << " final_reality_error="
                  << *rec.metrics.final_reality_error;
      if (rec.metrics.final_percept_bias)
        std::cout << " final_percept_bias="
                  << *rec.metrics.final_percept_bias;
      std::cout << "\n";
    } else if (*sweep_cmd) {
      auto cfg = sentsim::config::load_config(sweep_config);
      const std::string dir = resolve_out(sweep_out);
      auto recs = sentsim::harness::sweep(cfg, parse_grid(grid_specs), dir);
      std::cout << "wrote " << recs.size() << " records under " << dir
                << "\n";
    } else if (*audit_cmd) {
      auto cfg = sentsim::config::load_config(audit_config_path);
      auto agent = sentsim::config::build_agent(cfg);
      std::string channel = audit_channel_id;
      if (channel.empty()) channel = sentsim::config::audit_channel(cfg);
      auto result = sentsim::audit::audit_sentience(
          agent, channel, sentsim::config::audit_config(cfg));
      const std::string dir = resolve_out(audit_out);
      std::filesystem::create_directories(dir);
      const std::string path = dir + "/audit.json";
      std::ofstream out(path);
      sentsim::require(out.good(), sentsim::Err::ComponentFailure,
                       "cannot write '" + path + "'");
      out << sentsim::audit::result_to_json(result).dump(2) << "\n";
      std::cout << "audit " << channel << ": assertoric="
                << (result.assertoric.pass() ? "pass" : "fail")
                << " qualitative="
                << (result.qualitative.pass() ? "pass" : "fail")
                << " verdict=" << (result.verdict ? "pass" : "fail")
                << " (" << path << ")\n";
    } else if (*report_cmd) {
      std::cout << sentsim::harness::report(resolve_out(report_dir));
    }
    return 0;
  } catch (const sentsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sentsim::is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
