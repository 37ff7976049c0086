#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qlab/config.hpp"
#include "qlab/experiments.hpp"
#include "qlab/report.hpp"

namespace {

int do_validate(const std::string& path) {
  const std::string text = qlab::read_text_file(path);
  const auto issues = qlab::validate_config_text(text);
  if (issues.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& s : issues) std::cerr << "error: " << s << '\n';
  return 1;
}

int do_run(const std::string& path) {
  const std::string text = qlab::read_text_file(path);
  qlab::RunConfig cfg;
  const auto issues = qlab::validate_config_text(text, &cfg);
  if (!issues.empty()) {
    for (const auto& s : issues) std::cerr << "error: " << s << '\n';
    return 1;
  }
  if (const char* t = std::getenv("QUENCHLAB_THREADS"))
    cfg.threads = std::max(1, std::atoi(t));
  if (const char* o = std::getenv("QUENCHLAB_OUTDIR"))
    if (*o) cfg.outdir = o;

  const std::string started = qlab::iso8601_now();
  const qlab::ScenarioReport rep = qlab::run_scenario(cfg);
  const std::string finished = qlab::iso8601_now();

  namespace fs = std::filesystem;
  fs::create_directories(cfg.outdir);
  const std::string csv = qlab::csv_text(rep.rows);
  const std::string jsonl = qlab::report_jsonl(rep);
  const std::string csv_name = rep.scenario + ".csv";
  const std::string jsonl_name = rep.scenario + ".jsonl";
  qlab::write_text_file((fs::path(cfg.outdir) / csv_name).string(), csv);
  qlab::write_text_file((fs::path(cfg.outdir) / jsonl_name).string(), jsonl);
  const std::vector<qlab::OutputEntry> outputs = {
      {csv_name, qlab::sha256_hex(csv), csv.size()},
      {jsonl_name, qlab::sha256_hex(jsonl), jsonl.size()},
  };
  qlab::write_text_file(
      (fs::path(cfg.outdir) / "manifest.json").string(),
      qlab::manifest_json(rep.scenario, qlab::serialize(cfg), cfg.seed, started, finished,
                          outputs));

  for (const auto& c : rep.checks) {
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name
              << "  value=" << qlab::format_g17(c.value) << "  bounds=["
              << qlab::format_g17(c.bound_lo) << ", " << qlab::format_g17(c.bound_hi) << "]";
    if (!c.detail.empty()) std::cout << "  -- " << c.detail;
    std::cout << '\n';
  }
  std::cout << (rep.pass() ? "PASS " : "FAIL ") << rep.scenario << "  checks=" << rep.checks.size()
            << "  rows=" << rep.rows.size() << "  wall=" << rep.wall_seconds << "s  outdir="
            << cfg.outdir << '\n';
  return rep.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quenchlab: exact and sampled checks for gradient interfaces in random media"};
  app.require_subcommand(0, 1);

  std::string run_path, val_path;
  CLI::App* run_cmd = app.add_subcommand("run", "execute the scenario described by an INI config");
  run_cmd->add_option("config", run_path, "path to the config file")->required();
  CLI::App* list_cmd = app.add_subcommand("list", "print scenarios and their config schema");
  CLI::App* val_cmd = app.add_subcommand("validate", "check a config and report every problem");
  val_cmd->add_option("config", val_path, "path to the config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      std::cout << qlab::list_scenarios_text();
      return 0;
    }
    if (val_cmd->parsed()) return do_validate(val_path);
    if (run_cmd->parsed()) return do_run(run_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << app.help();
  return 0;
}
