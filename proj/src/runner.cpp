#include "bairext/runner.hpp"

#include "bairext/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace bairext {

using ojson = nlohmann::ordered_json;

namespace {

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error(ErrorCode::config, "bad value for " + key + ": '" + v + "'");
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error(ErrorCode::config, "bad value for " + key + ": '" + v + "'");
  return out;
}

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson report_json(const RunReport& rr) {
  const CertReport& r = rr.report;
  ojson j;
  j["property"] = r.property;
  j["target"] = r.target;
  j["status"] = status_name(r.status);
  j["tolerance"] = number(r.tolerance);
  j["checked"] = r.checked;
  if (rr.informational) j["informational"] = true;
  if (!r.detail.empty()) j["detail"] = r.detail;
  ojson metrics = ojson::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  j["metrics"] = metrics;
  ojson trace = ojson::array();
  for (const TraceRow& t : r.trace)
    trace.push_back({{"step", t.step}, {"d_xa", number(t.d_xa)}, {"dist_h", number(t.dist_h)},
                     {"n", t.n}, {"value", number(t.value)}, {"bound", number(t.bound)}});
  j["trace"] = trace;
  return j;
}

SampledSpace finite_copy(const SampledSpace& y) {
  if (y.mode() == SpaceMode::finite || y.kind() != MetricKind::euclidean) return y;
  std::vector<std::size_t> all(y.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return SampledSpace::euclidean(y.points(), std::move(all), SpaceMode::finite, 0.0);
}

} // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") cfg.scenario = value;
  else if (key == "grid") cfg.params.grid = parse_int<int>(key, value);
  else if (key == "norm") cfg.params.norm = parse_norm(value);
  else if (key == "mode") cfg.params.mode = parse_mode(value);
  else if (key == "tol") {
    cfg.tol = parse_double(key, value);
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::config, "tol must be positive");
  } else if (key == "steps") cfg.params.steps = parse_int<int>(key, value);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "format") {
    if (value != "csv" && value != "json") throw Error(ErrorCode::config, "format must be csv or json");
    cfg.format = value;
  } else if (key == "d0") cfg.params.d0 = parse_double(key, value);
  else if (key == "eps") cfg.params.eps = parse_double(key, value);
  else throw Error(ErrorCode::config, "unknown configuration key '" + key + "'");
}

RunConfig config_from_json(const std::string& text, RunConfig base) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    std::string text_value;
    if (v.is_string()) text_value = v.get<std::string>();
    else if (v.is_number_integer() || v.is_number_unsigned()) text_value = v.dump();
    else if (v.is_number_float()) text_value = fmt(v.get<double>());
    else throw Error(ErrorCode::config, "config key '" + key + "' must be a string or number");
    set_config_value(base, key, text_value);
  }
  return base;
}

RunOutput run_scenario(const RunConfig& cfg) {
  RunOutput out;
  out.scenario = build_scenario(cfg.scenario, cfg.params);
  const BuiltScenario& sc = out.scenario;
  out.warnings = sc.warnings;

  out.pipeline = baire_approximate(sc.y, sc.bundle);
  for (const std::string& w : out.pipeline.warnings) out.warnings.push_back(w);
  if (!out.pipeline.certified) out.warnings.push_back("some mollification bounds are sampled estimates");

  auto add = [&](CertReport r, bool informational = false) {
    if (!informational && r.status == CertStatus::fail) out.failed = true;
    out.reports.push_back({std::move(r), informational});
  };

  // selection invariants; sampled runs audit the transform on the finite copy of Y
  if (out.pipeline.selection) {
    add(check_fg(*out.pipeline.selection, sc.y, sc.bundle.f));
    add(check_approx_on_ck(*out.pipeline.selection, sc.bundle.raw, *out.pipeline.selected));
  } else {
    const SampledSpace yf = finite_copy(sc.y);
    const UcpcResult audit = ucpc_transform(yf, sc.bundle.raw, sc.bundle.f);
    add(check_fg(audit.state, yf, sc.bundle.f));
    add(check_approx_on_ck(audit.state, sc.bundle.raw, audit.items));
  }
  add(check_blizko(out.pipeline.items, out.pipeline.hat));

  const Extender ext(sc.x, out.pipeline.items, sc.bundle.dim, sc.bundle.norm);
  out.field = extend_field(ext, sc.queries);
  smooth_extension(out.field, ext);

  std::size_t capped = 0;
  for (const QueryRecord& q : out.field.queries) capped += q.capped ? 1 : 0;
  if (capped > 0)
    out.warnings.push_back(std::to_string(capped) + " queries hit the item cap in the selection of n(x)");

  std::vector<std::size_t> boundary;
  for (std::size_t h : sc.x.h_indices())
    if (sc.x.on_boundary(h)) boundary.push_back(h);

  add(check_general_inequality(out.field, ext));
  add(check_select_maximality(out.field, ext));
  add(check_alp5(out.field, ext, sc.bundle.f, boundary));
  add(check_rho_branch(out.field, ext));
  add(check_factor4(out.field, ext));
  add(check_convexity(out.field));

  for (const NtCase& c : sc.nt) {
    validate_path(sc.x, c.path);
    add(check_nt(out.field, ext, c.path, c.f_a, cfg.tol, false));
    add(check_nt(out.field, ext, c.path, c.f_a, cfg.tol, true));
  }
  for (const NtCase& c : sc.continuity) {
    validate_path(sc.x, c.path);
    add(check_continuity(out.field, ext, c.path, c.f_a, true, cfg.tol));
  }
  for (const BoundednessCase& b : sc.boundedness) add(check_boundedness(out.field, ext, b.a, b.r, b.certificate));
  for (std::size_t y0 : sc.declared_continuity_h) {
    const bool iso = sc.continuity_points_isolated;
    add(check_ucpc(sc.y, out.pipeline.items, sc.bundle.f[y0], y0, sc.ucpc_eps, iso));
    CertReport raw = check_ucpc(sc.y, sc.bundle.raw, sc.bundle.f[y0], y0, sc.ucpc_eps, iso);
    raw.property = "UCPC-raw";
    add(std::move(raw), true);
  }
  for (const RunReport& r : out.reports)
    if (!r.informational && r.report.status == CertStatus::inconclusive)
      out.warnings.push_back("inconclusive: " + r.report.property + " " + r.report.target);

  // field table
  const std::size_t xd = sc.x.dim();
  const std::size_t zd = sc.bundle.dim;
  const NtCase* primary = sc.nt.empty() ? nullptr : &sc.nt.front();
  std::vector<std::string> columns;
  static const char* axes[] = {"x", "y", "z"};
  for (std::size_t i = 0; i < xd; ++i) columns.push_back(xd <= 3 ? axes[i] : "x" + std::to_string(i));
  columns.insert(columns.end(), {"dist_h", "n_of_x", "u_index"});
  for (std::size_t i = 0; i < zd; ++i) columns.push_back("g" + std::to_string(i));
  for (std::size_t i = 0; i < zd; ++i) columns.push_back("g_smooth" + std::to_string(i));
  columns.insert(columns.end(), {"q_nt", "alp5_rhs", "alp5_slack"});

  auto row_values = [&](const QueryRecord& q) {
    std::vector<std::string> v;
    for (double c : q.x) v.push_back(fmt(c));
    v.push_back(fmt(q.dist_h));
    v.push_back(std::to_string(q.n));
    v.push_back(std::to_string(q.u));
    for (double c : q.g.coords) v.push_back(fmt(c));
    for (double c : q.g_smooth.coords) v.push_back(fmt(c));
    double qnt = 0.0, rhs = inf;
    if (primary) {
      const std::size_t a = primary->path.anchor;
      const TargetVector& fa = primary->f_a;
      qnt = distance(q.g, fa) * q.dist_h / sc.x.distance(q.sample, a);
      if (q.n > 0) rhs = 1.0 / q.n + norm(fa) / q.n + distance(ext.item_value(q.n, a), fa);
    }
    v.push_back(fmt(qnt));
    v.push_back(fmt(rhs));
    v.push_back(fmt(rhs - qnt));
    return v;
  };

  if (cfg.format == "csv") {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += '\n';
    for (const QueryRecord& q : out.field.queries) {
      const auto v = row_values(q);
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
      s += '\n';
    }
    out.field_text = std::move(s);
  } else {
    ojson j;
    j["columns"] = columns;
    ojson rows = ojson::array();
    for (const QueryRecord& q : out.field.queries) {
      ojson row = ojson::array();
      for (const std::string& v : row_values(q)) {
        double d = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
        if (res.ec == std::errc() && res.ptr == v.data() + v.size()) row.push_back(d);
        else row.push_back(v);
      }
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    out.field_text = j.dump() + "\n";
  }

  std::string stages;
  for (const StageDiagnostic& d : out.pipeline.diagnostics) {
    ojson line{{"stage", d.stage}, {"n", d.n}, {"max_violation", number(d.max_violation)},
               {"certified", d.certified}};
    stages += line.dump() + "\n";
  }
  out.stages = std::move(stages);

  std::map<std::string, int> counts{{"pass", 0}, {"fail", 0}, {"inconclusive", 0}, {"not_applicable", 0}};
  for (const RunReport& r : out.reports)
    if (!r.informational) ++counts[status_name(r.report.status)];
  ojson m;
  m["scenario"] = cfg.scenario;
  m["seed"] = cfg.seed;
  m["grid"] = cfg.params.grid;
  m["norm"] = norm_name(cfg.params.norm);
  m["mode"] = mode_name(sc.y.mode());
  m["tol"] = cfg.tol;
  m["steps"] = cfg.params.steps;
  m["items"] = sc.items;
  m["queries"] = out.field.queries.size();
  ojson reps = ojson::array();
  for (const RunReport& r : out.reports) reps.push_back(report_json(r));
  m["reports"] = std::move(reps);
  m["counts"] = {{"pass", counts["pass"]},
                 {"fail", counts["fail"]},
                 {"inconclusive", counts["inconclusive"]},
                 {"not_applicable", counts["not_applicable"]}};
  m["warnings"] = out.warnings;
  m["verdict"] = out.failed ? "fail" : "pass";
  out.manifest = m.dump(2) + "\n";
  return out;
}

void write_outputs(const RunConfig& cfg, const RunOutput& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + cfg.out + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    const fs::path p = fs::path(cfg.out) / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorCode::io, "cannot write " + p.string());
  };
  put("manifest.json", out.manifest);
  put(cfg.format == "csv" ? "field.csv" : "field.json", out.field_text);
  put("pipeline.jsonl", out.stages);
}

} // namespace bairext
