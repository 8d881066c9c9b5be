// Command-line front end over the C interface.

#include "bairext/bairext.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

int status_exit(bx_status s) {
  switch (s) {
    case BX_OK: return 0;
    case BX_ERR_CONFIG:
    case BX_ERR_UNKNOWN_SCENARIO:
    case BX_ERR_INVALID_INPUT: return 2;
    case BX_ERR_IO: return 3;
    default: return 4;
  }
}

int fail(bx_status s) {
  std::cerr << "bairext: " << bx_status_name(s) << ": " << bx_last_error() << "\n";
  return status_exit(s);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct ConfigHandle {
  bx_config* p = nullptr;
  ~ConfigHandle() { bx_config_destroy(p); }
};

struct ResultHandle {
  bx_run_result* p = nullptr;
  ~ResultHandle() { bx_run_destroy(p); }
};

int cmd_run(const std::map<std::string, std::string>& flags, const std::string& config_path, bool quiet) {
  ConfigHandle cfg;
  if (bx_status s = bx_config_create(&cfg.p); s != BX_OK) return fail(s);
  if (!config_path.empty()) {
    const auto text = read_file(config_path);
    if (!text) {
      std::cerr << "bairext: io: cannot read " << config_path << "\n";
      return 3;
    }
    if (bx_status s = bx_config_load_json(cfg.p, text->c_str()); s != BX_OK) return fail(s);
  }
  for (const auto& [k, v] : flags)
    if (bx_status s = bx_config_set(cfg.p, k.c_str(), v.c_str()); s != BX_OK) return fail(s);

  ResultHandle res;
  if (bx_status s = bx_run(cfg.p, &res.p); s != BX_OK) return fail(s);
  if (bx_status s = bx_run_write(cfg.p, res.p); s != BX_OK) return fail(s);

  const auto m = nlohmann::json::parse(bx_run_manifest(res.p));
  if (!quiet) {
    for (const auto& r : m["reports"]) {
      const std::string status = r["status"];
      if (status == "pass") continue;
      std::cout << status << "\t" << r["property"].get<std::string>() << "\t" << r["target"].get<std::string>();
      if (r.contains("detail")) std::cout << "\t" << r["detail"].get<std::string>();
      if (r.contains("informational")) std::cout << "\t(informational)";
      std::cout << "\n";
    }
    for (const auto& w : m["warnings"]) std::cout << "warning: " << w.get<std::string>() << "\n";
  }
  const auto& c = m["counts"];
  std::cout << m["scenario"].get<std::string>() << ": " << m["verdict"].get<std::string>() << " (pass "
            << c["pass"] << ", fail " << c["fail"] << ", inconclusive " << c["inconclusive"]
            << ", not applicable " << c["not_applicable"] << ")\n";
  return bx_run_exit_code(res.p);
}

int cmd_check_space(const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "bairext: io: cannot read " << path << "\n";
    return 3;
  }
  bx_space* sp = nullptr;
  if (bx_status s = bx_space_load_json(text->c_str(), &sp); s != BX_OK) return fail(s);
  std::cout << "samples " << bx_space_size(sp) << ", H " << bx_space_h_size(sp) << "\n";
  std::cout << "index\tdist_h\tnearest_h\n";
  int rc = 0;
  for (size_t i = 0; i < bx_space_size(sp); ++i) {
    size_t u = 0;
    double d = 0.0;
    if (bx_status s = bx_space_nearest_h(sp, i, &u, &d); s != BX_OK) {
      rc = fail(s);
      break;
    }
    std::printf("%zu\t%.17g\t%zu\n", i, d, u);
  }
  bx_space_destroy(sp);
  return rc;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extension of Baire-one functions from closed subsets of metric spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bx_version());

  std::map<std::string, std::string> flags;
  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run a scenario and write outputs");
  auto flag = [&](const std::string& name, const std::string& help) {
    run->add_option_function<std::string>("--" + name, [&flags, name](const std::string& v) { flags[name] = v; },
                                          help);
  };
  flag("scenario", "scenario name (S0..S3)");
  flag("grid", "samples per axis");
  flag("norm", "target norm: l2 | linf");
  flag("mode", "pipeline mode: finite | sampled");
  flag("tol", "decay tolerance for limit checks");
  flag("steps", "approach path length");
  flag("seed", "seed recorded in the manifest");
  flag("out", "output directory");
  flag("format", "field format: csv | json");
  flag("d0", "first approach distance");
  flag("eps", "tangential ratio bound");
  run->add_option("--config", config_path, "JSON config; flags override it");
  run->add_flag("-q,--quiet", quiet, "print only the verdict line");

  auto* list = app.add_subcommand("list", "list scenarios");
  std::string name;
  auto* describe = app.add_subcommand("describe", "describe a scenario");
  describe->add_option("name", name, "scenario name")->required();
  std::string space_path;
  auto* check = app.add_subcommand("check-space", "load a finite metric space and report distances to H");
  check->add_option("file", space_path, "space JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*run) return cmd_run(flags, config_path, quiet);
  if (*list || *describe) {
    char* text = nullptr;
    const bx_status s = *list ? bx_list_scenarios(&text) : bx_describe_scenario(name.c_str(), &text);
    if (s != BX_OK) return fail(s);
    std::cout << text;
    bx_string_free(text);
    return 0;
  }
  if (*check) return cmd_check_space(space_path);
  return 2;
}
