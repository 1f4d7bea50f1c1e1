// bctsim: validate scenarios, run simulations, sweep argument weights.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 validation or
// configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bctsim/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kConfigError = 2;

struct CliError {
  int code;
  std::string message;
};

std::optional<double> parse_weight(const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size() || v < 0) return std::nullopt;
    return v;
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
}

bctsim::ScenarioSpec load_or_fail(const std::string& path) {
  std::string text;
  try {
    text = bctsim::read_file(path);
  } catch (const std::exception& e) {
    throw CliError{kIoError, e.what()};
  }
  try {
    return bctsim::parse_scenario(text);
  } catch (const bctsim::ParseError& e) {
    throw CliError{kIoError, e.what()};
  } catch (const bctsim::SchemaError& e) {
    throw CliError{kIoError, e.what()};
  }
}

void require_valid(const bctsim::ScenarioSpec& spec) {
  auto rep = bctsim::validate_scenario(spec);
  if (!rep.ok()) throw CliError{kConfigError, bctsim::format_report(rep)};
}

struct RunFlags {
  int ticks = 60;
  std::uint64_t seed = 1;
  std::string bct;
  bool no_metacog = false;
  std::vector<std::string> set_weight;
  std::string trace_path;
  std::string metrics_path;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--ticks", f.ticks, "Tick horizon");
  cmd->add_option("--seed", f.seed, "Placement seed");
  cmd->add_option("--bct", f.bct, "Override the behaviour change profile (prime|ceos)");
  cmd->add_flag("--no-metacog", f.no_metacog, "Disable metacognitive monitoring and control");
  cmd->add_option("--set-weight", f.set_weight, "Override an argument template weight, TEMPLATE=W")->take_all();
  cmd->add_option("--trace", f.trace_path, "Write the reasoning trace as JSON Lines");
  cmd->add_option("--metrics", f.metrics_path, "Write per-tick metrics as CSV");
}

bctsim::RunConfig make_config(const std::string& path, const RunFlags& f) {
  bctsim::RunConfig cfg;
  cfg.scenario_path = path;
  if (f.ticks < 1) throw CliError{kConfigError, "--ticks must be >= 1"};
  cfg.ticks = f.ticks;
  cfg.seed = f.seed;
  if (!f.bct.empty()) {
    auto p = bctsim::parse_profile(f.bct);
    if (!p) throw CliError{kConfigError, "--bct must be prime or ceos"};
    cfg.bct_profile = p;
  }
  cfg.metacognition = !f.no_metacog;
  for (const auto& item : f.set_weight) {
    auto eq = item.find('=');
    auto w = eq == std::string::npos ? std::nullopt : parse_weight(item.substr(eq + 1));
    if (!w || eq == 0) throw CliError{kConfigError, "bad --set-weight value: " + item};
    cfg.weight_overrides[item.substr(0, eq)] = *w;
  }
  cfg.trace_path = f.trace_path;
  cfg.metrics_path = f.metrics_path;
  return cfg;
}

void check_templates(const bctsim::ScenarioSpec& spec, const bctsim::RunConfig& cfg) {
  for (const auto& [id, w] : cfg.weight_overrides)
    if (!spec.agent.argument_template(id)) throw CliError{kConfigError, "unknown argument template: " + id};
}

template <typename Fn>
void write_output(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kIoError, "cannot write " + path};
  fn(out);
  out.flush();
  if (!out) throw CliError{kIoError, "failed writing " + path};
}

int cmd_validate(const std::string& path) {
  auto spec = load_or_fail(path);
  auto rep = bctsim::validate_scenario(spec);
  std::cout << bctsim::format_report(rep);
  return rep.ok() ? kOk : kConfigError;
}

int cmd_run(const std::string& path, const RunFlags& flags) {
  auto spec = load_or_fail(path);
  require_valid(spec);
  auto cfg = make_config(path, flags);
  check_templates(spec, cfg);
  bctsim::RunResult r = bctsim::run_simulation(spec, cfg);
  if (!cfg.trace_path.empty())
    write_output(cfg.trace_path, [&](std::ostream& os) { bctsim::write_jsonl(os, r.state.trace); });
  if (!cfg.metrics_path.empty())
    write_output(cfg.metrics_path, [&](std::ostream& os) { bctsim::write_metrics_csv(os, r); });
  std::cout << bctsim::summary_line(r) << '\n';
  return kOk;
}

int cmd_sweep(const std::string& path, const RunFlags& flags, const std::string& template_id,
              const std::string& weights_text, const std::string& out_path) {
  auto spec = load_or_fail(path);
  require_valid(spec);
  auto cfg = make_config(path, flags);
  check_templates(spec, cfg);
  if (!spec.agent.argument_template(template_id)) throw CliError{kConfigError, "unknown argument template: " + template_id};

  std::vector<double> weights;
  std::stringstream ss(weights_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto w = parse_weight(item);
    if (!w) throw CliError{kConfigError, "bad weight: " + item};
    weights.push_back(*w);
  }
  if (weights.empty()) throw CliError{kConfigError, "--weights is empty"};

  auto rows = bctsim::run_sweep(spec, cfg, template_id, weights);
  if (out_path.empty()) {
    bctsim::write_sweep_csv(std::cout, rows);
  } else {
    write_output(out_path, [&](std::ostream& os) { bctsim::write_sweep_csv(os, rows); });
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affective agent simulator with metacognitive countermeasures"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario document");
  validate->add_option("path", validate_path, "Scenario file")->required();

  std::string run_path;
  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("path", run_path, "Scenario file")->required();
  add_run_flags(run, run_flags);

  std::string sweep_path, sweep_template, sweep_weights, sweep_out;
  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run one simulation per template weight");
  sweep->add_option("path", sweep_path, "Scenario file")->required();
  sweep->add_option("--template", sweep_template, "Argument template whose weight is swept")->required();
  sweep->add_option("--weights", sweep_weights, "Comma-separated non-negative weights")->required();
  sweep->add_option("--out", sweep_out, "Write the sweep CSV here instead of stdout");
  add_run_flags(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*run) return cmd_run(run_path, run_flags);
    if (*sweep) return cmd_sweep(sweep_path, sweep_flags, sweep_template, sweep_weights, sweep_out);
  } catch (const CliError& e) {
    std::cerr << e.message << (e.message.empty() || e.message.back() == '\n' ? "" : "\n");
    return e.code;
  } catch (const bctsim::InvalidSpec& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
