#include "eam/eam.h"

#include "eam/config.hpp"
#include "eam/error.hpp"
#include "eam/report.hpp"

#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <string>

struct eam_config {
  eam::ConfigDocument doc;
};

struct eam_result {
  eam::SimResult result;
};

namespace {

thread_local std::string last_error;

eam_status fail(eam_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

eam_status status_of(eam::ErrorCode code) {
  switch (code) {
  case eam::ErrorCode::InvalidArgument: return EAM_ERR_INVALID_ARGUMENT;
  case eam::ErrorCode::Io: return EAM_ERR_IO;
  case eam::ErrorCode::Parse: return EAM_ERR_PARSE;
  case eam::ErrorCode::Config: return EAM_ERR_CONFIG;
  case eam::ErrorCode::OutOfRange: return EAM_ERR_OUT_OF_RANGE;
  case eam::ErrorCode::Internal: return EAM_ERR_INTERNAL;
  }
  return EAM_ERR_INTERNAL;
}

template <class F> eam_status guarded(F &&f) {
  try {
    f();
    last_error.clear();
    return EAM_OK;
  } catch (const eam::Error &e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(EAM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(EAM_ERR_INTERNAL, e.what());
  }
}

#define EAM_REQUIRE(cond, what)                                                                                       \
  do {                                                                                                                 \
    if (!(cond)) return fail(EAM_ERR_INVALID_ARGUMENT, what);                                                         \
  } while (0)

} // namespace

extern "C" {

const char *eam_last_error(void) { return last_error.c_str(); }

const char *eam_version(void) { return "0.1.0"; }

eam_status eam_config_load(const char *path, eam_config **out) {
  EAM_REQUIRE(path && out, "eam_config_load: null argument");
  *out = nullptr;
  return guarded([&] { *out = new eam_config{eam::load_config(path)}; });
}

eam_status eam_config_parse(const char *json_text, const char *base_dir, eam_config **out) {
  EAM_REQUIRE(json_text && out, "eam_config_parse: null argument");
  *out = nullptr;
  return guarded([&] { *out = new eam_config{eam::parse_config(json_text, base_dir ? base_dir : "")}; });
}

eam_status eam_config_set(eam_config *config, const char *assignment) {
  EAM_REQUIRE(config && assignment, "eam_config_set: null argument");
  return guarded([&] { eam::apply_override(config->doc, assignment); });
}

eam_status eam_config_validate(const eam_config *config) {
  EAM_REQUIRE(config, "eam_config_validate: null config");
  return guarded([&] { (void)eam::build_sim_config(config->doc); });
}

void eam_config_free(eam_config *config) { delete config; }

eam_status eam_run(const eam_config *config, eam_result **out) {
  EAM_REQUIRE(config && out, "eam_run: null argument");
  *out = nullptr;
  return guarded([&] { *out = new eam_result{eam::run(eam::build_sim_config(config->doc))}; });
}

eam_status eam_result_metric(const eam_result *result, const char *key, double *value) {
  EAM_REQUIRE(result && key && value, "eam_result_metric: null argument");
  for (const auto &[k, v] : eam::metric_values(result->result.metrics)) {
    if (k == key) {
      *value = v;
      return EAM_OK;
    }
  }
  return fail(EAM_ERR_INVALID_ARGUMENT, fmt::format("unknown metric '{}'", key));
}

eam_status eam_result_write(const eam_result *result, const char *out_dir) {
  EAM_REQUIRE(result && out_dir, "eam_result_write: null argument");
  return guarded([&] { eam::write_run_outputs(result->result, out_dir); });
}

eam_status eam_result_summary(const eam_result *result, char *buf, size_t len, size_t *needed) {
  EAM_REQUIRE(result, "eam_result_summary: null result");
  const auto text = eam::summary_text(result->result.metrics);
  if (needed) *needed = text.size() + 1;
  if (buf && len > 0) {
    const auto n = std::min(len - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return EAM_OK;
}

void eam_result_free(eam_result *result) { delete result; }

eam_status eam_compare(const eam_config *config, const char *const *policies, size_t policy_count,
                       const double *durations, size_t duration_count, int equal_budget, const double *attack_start,
                       const char *out_dir) {
  EAM_REQUIRE(config && out_dir, "eam_compare: null argument");
  EAM_REQUIRE(policy_count == 0 || policies, "eam_compare: null policy list");
  EAM_REQUIRE(duration_count == 0 || durations, "eam_compare: null duration list");
  return guarded([&] {
    const auto base = eam::build_sim_config(config->doc);
    eam::CompareOptions opts;
    for (size_t i = 0; i < policy_count; ++i) {
      if (!policies[i]) throw eam::invalid_argument("null policy name");
      opts.policies.push_back(eam::policy_kind_from_string(policies[i]));
    }
    opts.durations.assign(durations, durations + duration_count);
    opts.equal_budget = equal_budget != 0;
    if (attack_start) opts.attack_start = *attack_start;
    const auto rows = eam::run_compare(base, opts);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw eam::io_error(fmt::format("cannot create '{}': {}", out_dir, ec.message()));
    const auto path = std::filesystem::path(out_dir) / "compare.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw eam::io_error(fmt::format("cannot write '{}'", path.string()));
    eam::write_compare_csv(rows, out);
  });
}

eam_status eam_inject(const char *trace_path, double load_ohm, double start_s, double duration_s,
                      const char *out_path) {
  EAM_REQUIRE(trace_path && out_path, "eam_inject: null argument");
  return guarded([&] {
    const auto trace = eam::load_trace(trace_path, load_ohm);
    eam::AttackScenario a;
    a.start = start_s;
    a.duration = duration_s;
    eam::validate_scenarios({a});
    eam::write_trace(eam::inject_attack(trace, a), out_path);
  });
}

} // extern "C"
