#include "bairext/bairext.h"

#include "bairext/error.hpp"
#include "bairext/metric_core.hpp"
#include "bairext/runner.hpp"
#include "bairext/scenarios.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct bx_config {
  bairext::RunConfig cfg;
};

struct bx_run_result {
  bairext::RunOutput out;
};

struct bx_space {
  bairext::SampledSpace space;
};

namespace {

thread_local std::string last_error;

template <class F>
bx_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return BX_OK;
  } catch (const bairext::Error& e) {
    last_error = e.what();
    return static_cast<bx_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return BX_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void require(const void* p, const char* what) {
  if (!p) throw bairext::Error(bairext::ErrorCode::misuse, std::string(what) + " is null");
}

} // namespace

extern "C" {

const char* bx_version(void) { return "0.1.0"; }
const char* bx_last_error(void) { return last_error.c_str(); }
const char* bx_status_name(bx_status status) {
  return bairext::error_code_name(static_cast<bairext::ErrorCode>(status));
}
void bx_string_free(char* s) { std::free(s); }

bx_status bx_config_create(bx_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new bx_config{};
  });
}

void bx_config_destroy(bx_config* cfg) { delete cfg; }

bx_status bx_config_set(bx_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    bairext::set_config_value(cfg->cfg, key, value);
  });
}

bx_status bx_config_load_json(bx_config* cfg, const char* json_text) {
  return guarded([&] {
    require(cfg, "config");
    require(json_text, "json");
    cfg->cfg = bairext::config_from_json(json_text, cfg->cfg);
  });
}

bx_status bx_run(const bx_config* cfg, bx_run_result** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    auto* r = new bx_run_result{bairext::run_scenario(cfg->cfg)};
    *out = r;
  });
}

bx_status bx_run_write(const bx_config* cfg, const bx_run_result* result) {
  return guarded([&] {
    require(cfg, "config");
    require(result, "result");
    bairext::write_outputs(cfg->cfg, result->out);
  });
}

int bx_run_exit_code(const bx_run_result* result) { return result ? bairext::exit_code(result->out) : 1; }
const char* bx_run_manifest(const bx_run_result* result) { return result ? result->out.manifest.c_str() : ""; }
const char* bx_run_field(const bx_run_result* result) { return result ? result->out.field_text.c_str() : ""; }
const char* bx_run_stages(const bx_run_result* result) { return result ? result->out.stages.c_str() : ""; }
size_t bx_run_report_count(const bx_run_result* result) { return result ? result->out.reports.size() : 0; }
void bx_run_destroy(bx_run_result* result) { delete result; }

bx_status bx_list_scenarios(char** out) {
  return guarded([&] {
    require(out, "out");
    std::string s;
    for (const auto& info : bairext::scenario_table()) s += info.name + "\t" + info.title + "\n";
    *out = dup_string(s);
  });
}

bx_status bx_describe_scenario(const char* name, char** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const auto& info = bairext::describe_scenario(name);
    *out = dup_string(info.name + " (" + info.title + ")\n" + info.card + "\n");
  });
}

bx_status bx_space_load_json(const char* json_text, bx_space** out) {
  return guarded([&] {
    require(json_text, "json");
    require(out, "out");
    *out = new bx_space{bairext::SampledSpace::from_json(json_text)};
  });
}

size_t bx_space_size(const bx_space* space) { return space ? space->space.size() : 0; }
size_t bx_space_h_size(const bx_space* space) { return space ? space->space.h_indices().size() : 0; }

bx_status bx_space_dist_to_h(const bx_space* space, size_t index, double* out) {
  return guarded([&] {
    require(space, "space");
    require(out, "out");
    if (index >= space->space.size())
      throw bairext::Error(bairext::ErrorCode::invalid_input, "sample index out of range");
    *out = bairext::dist_to_set(space->space, index);
  });
}

bx_status bx_space_nearest_h(const bx_space* space, size_t index, size_t* out_index, double* out_dist) {
  return guarded([&] {
    require(space, "space");
    require(out_index, "out_index");
    require(out_dist, "out_dist");
    if (index >= space->space.size())
      throw bairext::Error(bairext::ErrorCode::invalid_input, "sample index out of range");
    const auto near = bairext::nearest_with_slack(space->space, index);
    *out_index = near.index;
    *out_dist = near.distance;
  });
}

void bx_space_destroy(bx_space* space) { delete space; }

} // extern "C"
