#include "eam/eam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
  void operator()(eam_config *c) const { eam_config_free(c); }
};
struct ResultDeleter {
  void operator()(eam_result *r) const { eam_result_free(r); }
};
using ConfigPtr = std::unique_ptr<eam_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<eam_result, ResultDeleter>;

int report(eam_status s) {
  std::fprintf(stderr, "eamsim: %s\n", eam_last_error());
  return static_cast<int>(s);
}

std::string default_out_dir() {
  const char *env = std::getenv("EAMSIM_OUT_DIR");
  return env && *env ? env : "results";
}

struct Common {
  std::string config;
  std::string out = default_out_dir();
  std::vector<std::string> sets;
  long long seed = -1;
};

void add_common(CLI::App *cmd, Common &c) {
  cmd->add_option("--config", c.config, "run-config JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (default $EAMSIM_OUT_DIR or ./results)");
  cmd->add_option("--set", c.sets, "override section.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "seed for the detector noise and sweep attack starts")->check(CLI::NonNegativeNumber);
}

eam_status load(const Common &c, ConfigPtr &out) {
  eam_config *raw = nullptr;
  if (auto s = eam_config_load(c.config.c_str(), &raw); s != EAM_OK) return s;
  out.reset(raw);
  if (c.seed >= 0) {
    const auto assignment = "sim.seed=" + std::to_string(c.seed);
    if (auto s = eam_config_set(out.get(), assignment.c_str()); s != EAM_OK) return s;
  }
  for (const auto &a : c.sets) {
    if (auto s = eam_config_set(out.get(), a.c_str()); s != EAM_OK) return s;
  }
  return eam_config_validate(out.get());
}

int cmd_run(const Common &c) {
  ConfigPtr config;
  if (auto s = load(c, config); s != EAM_OK) return report(s);
  eam_result *raw = nullptr;
  if (auto s = eam_run(config.get(), &raw); s != EAM_OK) return report(s);
  ResultPtr result(raw);
  if (auto s = eam_result_write(result.get(), c.out.c_str()); s != EAM_OK) return report(s);
  size_t needed = 0;
  eam_result_summary(result.get(), nullptr, 0, &needed);
  std::string text(needed, '\0');
  eam_result_summary(result.get(), text.data(), text.size(), nullptr);
  std::fputs(text.c_str(), stdout);
  std::printf("wrote %s/{metrics.csv,timeline.csv,events.log}\n", c.out.c_str());
  return 0;
}

int cmd_compare(const Common &c, const std::vector<std::string> &policies, const std::vector<double> &durations,
                bool equal_budget, const std::vector<double> &attack_start) {
  ConfigPtr config;
  if (auto s = load(c, config); s != EAM_OK) return report(s);
  std::vector<const char *> names;
  for (const auto &p : policies) names.push_back(p.c_str());
  const double *start = attack_start.empty() ? nullptr : attack_start.data();
  if (auto s = eam_compare(config.get(), names.data(), names.size(), durations.data(), durations.size(),
                           equal_budget ? 1 : 0, start, c.out.c_str());
      s != EAM_OK)
    return report(s);
  std::printf("wrote %s/compare.csv (%zu rows)\n", c.out.c_str(), names.size() * durations.size());
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Energy-attack mitigation simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto *run = app.add_subcommand("run", "simulate one configuration");
  add_common(run, run_opts);

  Common cmp_opts;
  std::vector<std::string> policies{"eam", "fh", "central"};
  std::vector<double> durations{30, 300};
  bool equal_budget = false;
  std::vector<double> attack_start;
  auto *compare = app.add_subcommand("compare", "sweep attack durations across policies");
  add_common(compare, cmp_opts);
  compare->add_option("--policies", policies, "comma-separated subset of eam,fh,central")->delimiter(',');
  compare->add_option("--durations", durations, "comma-separated attack durations in seconds")->delimiter(',');
  compare->add_flag("--equal-budget", equal_budget, "start every run at attack onset with the same stored energy");
  compare->add_option("--attack-start", attack_start, "fixed attack start in seconds instead of the seeded draw")
      ->expected(1);

  std::string trace_path, out_path;
  double start = 0.0, duration = 0.0, load_ohm = 30000.0;
  auto *inject = app.add_subcommand("inject", "zero a trace over an attack window");
  inject->add_option("--trace", trace_path, "input trace")->required();
  inject->add_option("--start", start, "attack start, s")->required();
  inject->add_option("--duration", duration, "attack duration, s")->required();
  inject->add_option("--out", out_path, "output trace")->required();
  inject->add_option("--load-ohm", load_ohm, "load resistance the trace was recorded across");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(run_opts);
  if (*compare) return cmd_compare(cmp_opts, policies, durations, equal_budget, attack_start);
  if (auto s = eam_inject(trace_path.c_str(), load_ohm, start, duration, out_path.c_str()); s != EAM_OK)
    return report(s);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}
