#include "flexcert/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "flexcert/error.hpp"
#include "flexcert/io.hpp"
#include "flexcert/loadability.hpp"
#include "flexcert/uncertainty.hpp"

namespace flexcert::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- config

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, where + "." + key + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) fail(ErrorKind::Config, std::string(what) + " not found: " + p.string());
}

SetKind parse_kind(const std::string& s) {
  if (s == "pus") return SetKind::Pus;
  if (s == "box") return SetKind::Box;
  if (s == "none" || s == "intact") return SetKind::None;
  fail(ErrorKind::Config, "uncertainty.type must be pus, box or none, got \"" + s + "\"");
}

const char* kind_name(SetKind k) {
  switch (k) {
    case SetKind::Pus: return "pus";
    case SetKind::Box: return "box";
    case SetKind::None: return "intact";
  }
  return "?";
}

// ---------------------------------------------------------------- pipeline pieces

struct Context {
  RunConfig cfg;
  NetworkCase net;
  Commitment z;
  std::vector<std::string> load_names;
};

Context open_context(const RunConfig& cfg) {
  Context ctx{cfg, load_case(cfg.case_path), {}, {}};
  ctx.z = load_commitment(cfg.commitment_path, ctx.net);
  for (int b : ctx.net.load_buses) ctx.load_names.push_back("d" + std::to_string(b));
  fs::create_directories(cfg.output);
  return ctx;
}

Vector nominal(const Context& ctx) {
  if (ctx.net.nominal_demand.empty())
    fail(ErrorKind::Config, "case has no nominal_demand; give d0 / profile / center explicitly");
  return ctx.net.nominal_demand;
}

Vector assessed_point(const Context& ctx) {
  const Vector d0 = ctx.cfg.d0 ? *ctx.cfg.d0 : nominal(ctx);
  if (d0.size() != ctx.net.load_buses.size())
    fail(ErrorKind::Config, "d0 must have one entry per load bus");
  return d0;
}

struct DemandData {
  Matrix observed;
  Matrix forecast;
};

bool has_data(const RunConfig& cfg) {
  return cfg.uncertainty.synth.has_value() || !cfg.uncertainty.observed.empty();
}

DemandData load_data(const Context& ctx) {
  const UncertaintySpec& u = ctx.cfg.uncertainty;
  const std::size_t n = ctx.net.load_buses.size();
  if (u.synth) {
    const Vector profile = u.synth->profile ? *u.synth->profile : nominal(ctx);
    if (profile.size() != n) fail(ErrorKind::Config, "synth.profile must have one entry per load bus");
    SynthData s = synth_generate(profile, u.synth->eta, u.synth->alpha, u.synth->samples,
                                 u.synth->seed.value_or(ctx.cfg.seed));
    return {std::move(s.observed), std::move(s.forecast)};
  }
  if (u.observed.empty()) fail(ErrorKind::Config, "uncertainty needs synth parameters or observed/forecast CSV files");
  CsvTable w = read_csv(u.observed), mu = read_csv(u.forecast);
  if (w.header != mu.header || w.values.cols() != n)
    fail(ErrorKind::ShapeMismatch, "observed and forecast CSVs must share a header with one column per load bus");
  return {std::move(w.values), std::move(mu.values)};
}

Vector set_center(const Context& ctx, const DemandData& data) {
  if (ctx.cfg.uncertainty.center) return *ctx.cfg.uncertainty.center;
  if (!ctx.net.nominal_demand.empty()) return ctx.net.nominal_demand;
  Vector mean(data.forecast.cols(), 0.0);
  for (std::size_t t = 0; t < data.forecast.rows(); ++t)
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += data.forecast(t, k);
  for (double& v : mean) v /= static_cast<double>(data.forecast.rows());
  return mean;
}

struct DemandSet {
  SetKind kind = SetKind::None;
  HPolyhedron rows;
  std::optional<BoxSet> bbox;
};

DemandSet build_set(const Context& ctx, SetKind kind, const std::optional<DemandData>& data) {
  const std::size_t n = ctx.net.load_buses.size();
  DemandSet out{kind, nonnegative_demand(n), std::nullopt};
  if (kind == SetKind::None) return out;
  if (!data) fail(ErrorKind::Config, "uncertainty set requested without data");
  const Vector center = set_center(ctx, *data);
  if (center.size() != n) fail(ErrorKind::Config, "uncertainty.center must have one entry per load bus");
  const UncertaintySpec& u = ctx.cfg.uncertainty;
  if (kind == SetKind::Box) {
    const BoxSet box = box_from_data(data->observed, data->forecast, center);
    out.rows = box.to_hrep();
    out.bbox = box;
  } else if (!u.groups.empty()) {
    const GroupedPus g = build_grouped_pus(data->observed, data->forecast, u.groups, center);
    out.rows = grouped_pus_to_hrep(g);
    out.bbox = grouped_pus_bounding_box(g);
  } else {
    const Pus p = u.components ? build_pus(data->observed, data->forecast, *u.components, center)
                               : build_pus(data->observed, data->forecast, center);
    out.rows = pus_to_hrep(p);
    out.bbox = pus_bounding_box(p);
  }
  return out;
}

struct Projected {
  GdPolytope gd;
  ProjectionReport report;
  std::size_t demand_rows = 0;
  SetKind kind = SetKind::None;
};

Projected project(const Context& ctx, const DemandSet& set) {
  Projected p{assemble_gd_polytope(ctx.net, ctx.z, set.rows), {}, set.rows.num_rows(), set.kind};
  ProjectionOptions opt;
  opt.max_rows = ctx.cfg.max_rows;
  for (int b : p.gd.gen_buses) opt.var_names.push_back("g" + std::to_string(b));
  for (const auto& name : ctx.load_names) opt.var_names.push_back(name);
  std::vector<std::size_t> vars(p.gd.num_gen());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  p.report = project_loadability(p.gd.poly, vars, opt);
  return p;
}

// ---------------------------------------------------------------- JSON

json projection_json(const Context& ctx, const Projected& p) {
  json stages = json::array();
  for (const auto& s : p.report.stages) stages.push_back({{"stage", s.label}, {"rows", s.rows}});
  json eliminated = json::array();
  for (std::size_t v : p.report.eliminated_vars) eliminated.push_back("g" + std::to_string(p.gd.gen_buses[v]));
  return {{"case", ctx.net.name},
          {"set", kind_name(p.kind)},
          {"demand_set_rows", p.demand_rows},
          {"gen_buses", p.gd.gen_buses},
          {"load_buses", p.gd.load_buses},
          {"stages", stages},
          {"eliminated", eliminated},
          {"final_rows", p.report.final.num_rows()}};
}

json assessment_json(const Context& ctx, const HPolyhedron& d, const Vector& d0, Norm norm,
                     const std::string& set_name) {
  AssessOptions opt;
  opt.norm = norm;
  opt.seed = ctx.cfg.seed;
  const DdioResult r = ddio_assess(d, d0, opt);
  const InverseCertificate cert = recover_certificate(d, d0, r);
  const BaResult ba = solve_ba(ctx.net, ctx.z, d0);
  const double ba_mw = ba.objective / ctx.net.gamma;
  json s = json::array();
  for (const Vector& v : r.s) s.push_back(v);
  return {{"set", set_name},
          {"norm", to_string(norm)},
          {"d0", d0},
          {"classification", to_string(r.classification)},
          {"rho", r.rho},
          {"degenerate", r.degenerate},
          {"min_distance", r.min_distance},
          {"mean_distance", r.mean_distance},
          {"j_star", r.j_star},
          {"violated_rows", r.violated},
          {"rdc", r.rdc},
          {"rdc_shed", r.rdc_shed},
          {"rdc_curtail", r.rdc_curtail},
          {"distances", r.distances},
          {"perturbations", s},
          {"certificate", {{"row", cert.row}, {"c", cert.c}, {"y", cert.y}, {"s", cert.s}}},
          {"benchmark",
           {{"objective", ba.objective},
            {"gamma", ctx.net.gamma},
            {"imbalance_mw", ba_mw},
            {"epsilon", ba.epsilon},
            {"rdc_minus_imbalance_mw", r.rdc - ba_mw}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- sweep

std::vector<Vector> sweep_grid(const Context& ctx, const Vector& d0) {
  const SweepSpec& s = ctx.cfg.sweep;
  std::vector<Vector> grid;
  switch (s.kind) {
    case SweepSpec::Kind::Points:
      grid = s.explicit_points;
      break;
    case SweepSpec::Kind::Ray:
      for (std::size_t i = 0; i < s.points; ++i) {
        const double t = s.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(s.points - 1);
        const double scale = s.from_scale + t * (s.to_scale - s.from_scale);
        Vector p = d0;
        for (double& v : p) v *= scale;
        grid.push_back(std::move(p));
      }
      break;
    case SweepSpec::Kind::Grid: {
      const std::size_t n = d0.size();
      if (s.lower.size() != n || s.upper.size() != n || s.steps.size() != n)
        fail(ErrorKind::Config, "sweep grid needs lower, upper and steps per load bus");
      std::vector<std::size_t> idx(n, 0);
      while (true) {
        Vector p(n);
        for (std::size_t k = 0; k < n; ++k) {
          const double t = s.steps[k] <= 1 ? 0.0 : static_cast<double>(idx[k]) / static_cast<double>(s.steps[k] - 1);
          p[k] = s.lower[k] + t * (s.upper[k] - s.lower[k]);
        }
        grid.push_back(std::move(p));
        std::size_t k = 0;
        while (k < n && ++idx[k] >= std::max<std::size_t>(1, s.steps[k])) idx[k++] = 0;
        if (k == n) break;
      }
      break;
    }
  }
  for (const Vector& p : grid)
    if (p.size() != d0.size()) fail(ErrorKind::Config, "sweep point has the wrong dimension");
  return grid;
}

std::string sweep_csv(const Context& ctx, const std::vector<SweepPoint>& pts) {
  std::ostringstream out;
  for (const auto& name : ctx.load_names) out << name << ",";
  out << "rho,rdc,class\n";
  for (const auto& p : pts) {
    for (double v : p.d0) out << format_number(v) << ",";
    out << format_number(p.rho) << "," << format_number(p.rdc) << "," << to_string(p.classification) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------- shared steps

void write_data(const Context& ctx, const DemandData& data) {
  write_csv(ctx.cfg.output / "W.csv", ctx.load_names, data.observed);
  write_csv(ctx.cfg.output / "mu.csv", ctx.load_names, data.forecast);
}

Projected project_and_write(const Context& ctx, const DemandSet& set, const std::string& suffix) {
  Projected p = project(ctx, set);
  write_hpolyhedron_csv(ctx.cfg.output / ("D" + suffix + ".csv"), p.report.final, ctx.load_names);
  write_text(ctx.cfg.output / ("report" + suffix + ".json"), dump(projection_json(ctx, p)));
  std::cout << "projected " << kind_name(set.kind) << " set: " << p.report.final.num_rows()
            << " rows\n";
  return p;
}

HPolyhedron assessed_set(const Context& ctx) {
  const SetKind kind = ctx.cfg.assess_intact ? SetKind::None : ctx.cfg.uncertainty.kind;
  std::optional<DemandData> data;
  if (kind != SetKind::None) data = load_data(ctx);
  return project(ctx, build_set(ctx, kind, data)).report.final;
}

std::string assessed_name(const Context& ctx) {
  return ctx.cfg.assess_intact ? "intact" : kind_name(ctx.cfg.uncertainty.kind);
}

void write_assessment(const Context& ctx, const HPolyhedron& d, const std::vector<Norm>& norms) {
  const Vector d0 = assessed_point(ctx);
  json list = json::array();
  for (Norm r : norms) {
    list.push_back(assessment_json(ctx, d, d0, r, assessed_name(ctx)));
    std::cout << "assessed d0 with r=" << to_string(r) << ": rho " << list.back()["rho"].get<double>()
              << ", RDC " << list.back()["rdc"].get<double>() << " MW, "
              << list.back()["classification"].get<std::string>() << "\n";
  }
  write_text(ctx.cfg.output / "result.json", dump({{"assessments", list}}));
}

void write_sweep(const Context& ctx, const HPolyhedron& d) {
  AssessOptions opt;
  opt.norm = ctx.cfg.norm;
  opt.seed = ctx.cfg.seed;
  const auto pts = rho_sweep(d, sweep_grid(ctx, assessed_point(ctx)), opt);
  write_text(ctx.cfg.output / "rho_grid.csv", sweep_csv(ctx, pts));
  std::cout << "swept " << pts.size() << " points\n";
}

json volume_json(const VolumeEstimate& e) {
  return {{"volume", e.volume}, {"std_error", e.std_error}, {"hits", e.hits}, {"samples", e.samples}};
}

void write_volumes(const Context& ctx, const DemandData& data) {
  const DemandSet pus = build_set(ctx, SetKind::Pus, data);
  const DemandSet box = build_set(ctx, SetKind::Box, data);
  const Projected pus_d = project(ctx, pus);
  const Projected box_d = project(ctx, box);
  // One box around both sets so every estimate shares the sample stream.
  BoxSet bbox = *box.bbox;
  for (std::size_t k = 0; k < bbox.dim(); ++k) {
    bbox.lower[k] = std::min(bbox.lower[k], pus.bbox->lower[k]);
    bbox.upper[k] = std::max(bbox.upper[k], pus.bbox->upper[k]);
  }
  const std::size_t n = ctx.cfg.volume_samples;
  const std::uint64_t seed = ctx.cfg.seed;
  const VolumeEstimate v_pus = mc_volume(pus.rows, bbox, n, seed);
  const VolumeEstimate v_box = mc_volume(box.rows, bbox, n, seed);
  const VolumeEstimate v_pus_d = mc_volume(pus_d.report.final, bbox, n, seed);
  const VolumeEstimate v_box_d = mc_volume(box_d.report.final, bbox, n, seed);
  auto ratio = [](double a, double b) { return b > 0.0 ? json(a / b) : json(nullptr); };
  const json out = {
      {"samples", n},
      {"seed", seed},
      {"bbox", {{"lower", bbox.lower}, {"upper", bbox.upper}}},
      {"box_volume_exact", box.bbox->volume()},
      {"sets",
       {{"pus", volume_json(v_pus)},
        {"box", volume_json(v_box)},
        {"pus_loadability", volume_json(v_pus_d)},
        {"box_loadability", volume_json(v_box_d)}}},
      {"ratios",
       {{"pus_over_box", ratio(v_pus.volume, v_box.volume)},
        {"pus_loadability_over_box_loadability", ratio(v_pus_d.volume, v_box_d.volume)}}}};
  write_text(ctx.cfg.output / "volumes.json", dump(out));
  std::cout << "volumes: pus " << v_pus.volume << ", box " << v_box.volume << ", pus-D "
            << v_pus_d.volume << ", box-D " << v_box_d.volume << "\n";
}

}  // namespace

// ---------------------------------------------------------------- config parsing

RunConfig parse_config(const std::string& json_text, const fs::path& base_dir,
                       const Overrides& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
  RunConfig cfg;
  cfg.case_path = resolve(base_dir, get<std::string>(j, "case", "config"));
  cfg.commitment_path = resolve(base_dir, get<std::string>(j, "commitment", "config"));
  require_file(cfg.case_path, "case file");
  require_file(cfg.commitment_path, "commitment file");

  if (j.contains("uncertainty")) {
    const json& u = j.at("uncertainty");
    UncertaintySpec& spec = cfg.uncertainty;
    if (u.contains("type")) spec.kind = parse_kind(get<std::string>(u, "type", "uncertainty"));
    if (u.contains("synth")) {
      const json& s = u.at("synth");
      SynthSpec synth;
      if (s.contains("profile")) synth.profile = get<Vector>(s, "profile", "synth");
      if (s.contains("eta")) synth.eta = get<double>(s, "eta", "synth");
      if (s.contains("alpha")) synth.alpha = get<double>(s, "alpha", "synth");
      for (const char* key : {"T", "samples"})
        if (s.contains(key)) synth.samples = get<std::size_t>(s, key, "synth");
      if (s.contains("seed")) synth.seed = get<std::uint64_t>(s, "seed", "synth");
      if (!(synth.eta >= 0.0 && synth.eta <= 1.0)) fail(ErrorKind::Config, "synth.eta must lie in [0, 1]");
      if (!(synth.alpha >= -1.0 && synth.alpha <= 1.0))
        fail(ErrorKind::Config, "synth.alpha must lie in [-1, 1]");
      spec.synth = synth;
    } else if (u.contains("observed") || u.contains("forecast")) {
      spec.observed = resolve(base_dir, get<std::string>(u, "observed", "uncertainty"));
      spec.forecast = resolve(base_dir, get<std::string>(u, "forecast", "uncertainty"));
      require_file(spec.observed, "observed data");
      require_file(spec.forecast, "forecast data");
    }
    for (const char* key : {"K", "components"})
      if (u.contains(key)) spec.components = get<std::size_t>(u, key, "uncertainty");
    if (u.contains("groups")) {
      // Inline list of index groups, or a JSON file holding one.
      json groups = u.at("groups");
      if (groups.is_string()) {
        const fs::path file = resolve(base_dir, groups.get<std::string>());
        require_file(file, "groups file");
        try {
          groups = json::parse(read_text(file));
        } catch (const json::parse_error& e) {
          fail(ErrorKind::Config, "groups file: " + std::string(e.what()));
        }
      }
      spec.groups = get<std::vector<std::vector<std::size_t>>>(json{{"groups", groups}}, "groups", "uncertainty");
    }
    if (u.contains("center")) spec.center = get<Vector>(u, "center", "uncertainty");
  } else {
    cfg.uncertainty.kind = SetKind::None;
  }

  if (j.contains("d0")) {
    if (j.at("d0").is_string()) {
      // CSV with a header and one data row.
      const fs::path file = resolve(base_dir, j.at("d0").get<std::string>());
      require_file(file, "d0 file");
      const CsvTable t = read_csv(file);
      if (t.values.rows() != 1) fail(ErrorKind::Config, "d0 file must hold exactly one data row");
      const auto row = t.values.row(0);
      cfg.d0 = Vector(row.begin(), row.end());
    } else {
      cfg.d0 = get<Vector>(j, "d0", "config");
    }
  }
  if (j.contains("assess_set")) {
    const auto s = get<std::string>(j, "assess_set", "config");
    if (s != "intact" && s != "uncertainty")
      fail(ErrorKind::Config, "assess_set must be \"intact\" or \"uncertainty\"");
    cfg.assess_intact = s == "intact";
  }
  if (j.contains("norm")) {
    const json& r = j.at("norm");
    try {
      cfg.norm = parse_norm(r.is_number() ? std::to_string(r.get<int>()) : r.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::Config, e.what());
    }
  }
  if (j.contains("output")) cfg.output = resolve(base_dir, get<std::string>(j, "output", "config"));
  else cfg.output = resolve(base_dir, cfg.output);
  if (j.contains("volume_samples")) cfg.volume_samples = get<std::size_t>(j, "volume_samples", "config");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "config");
  if (j.contains("max_rows")) cfg.max_rows = get<std::size_t>(j, "max_rows", "config");

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    SweepSpec& sw = cfg.sweep;
    const auto type = s.value("type", std::string("ray"));
    if (type == "ray") {
      sw.kind = SweepSpec::Kind::Ray;
      sw.from_scale = s.value("from_scale", sw.from_scale);
      sw.to_scale = s.value("to_scale", sw.to_scale);
      sw.points = s.value("points", sw.points);
      if (sw.points == 0) fail(ErrorKind::Config, "sweep.points must be positive");
    } else if (type == "grid") {
      sw.kind = SweepSpec::Kind::Grid;
      sw.lower = get<Vector>(s, "lower", "sweep");
      sw.upper = get<Vector>(s, "upper", "sweep");
      sw.steps = get<std::vector<std::size_t>>(s, "steps", "sweep");
    } else if (type == "points") {
      sw.kind = SweepSpec::Kind::Points;
      sw.explicit_points = get<std::vector<Vector>>(s, "points", "sweep");
    } else {
      fail(ErrorKind::Config, "sweep.type must be ray, grid or points");
    }
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.output) cfg.output = *overrides.output;
  return cfg;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  require_file(path, "config");
  return parse_config(read_text(path), path.parent_path(), overrides);
}

// ---------------------------------------------------------------- commands

void cmd_synth(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  if (!cfg.uncertainty.synth) fail(ErrorKind::Config, "synth needs uncertainty.synth parameters");
  write_data(ctx, load_data(ctx));
  std::cout << "wrote W.csv and mu.csv to " << cfg.output.string() << "\n";
}

void cmd_project(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  std::optional<DemandData> data;
  if (cfg.uncertainty.kind != SetKind::None) data = load_data(ctx);
  project_and_write(ctx, build_set(ctx, cfg.uncertainty.kind, data), "");
}

void cmd_assess(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  write_assessment(ctx, assessed_set(ctx), {cfg.norm});
}

void cmd_sweep(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  write_sweep(ctx, assessed_set(ctx));
}

void cmd_volume(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  if (!has_data(cfg)) fail(ErrorKind::Config, "volume needs uncertainty data (synth or CSV)");
  write_volumes(ctx, load_data(ctx));
}

void cmd_repro(const RunConfig& cfg) {
  const Context ctx = open_context(cfg);
  if (!has_data(cfg)) fail(ErrorKind::Config, "repro needs uncertainty data (synth or CSV)");
  const DemandData data = load_data(ctx);
  write_data(ctx, data);
  // The network-only set can grow large on meshed cases, so it is projected
  // only when it is the set being assessed.
  std::optional<Projected> intact;
  if (cfg.assess_intact) intact = project_and_write(ctx, build_set(ctx, SetKind::None, data), "_intact");
  const Projected pus = project_and_write(ctx, build_set(ctx, SetKind::Pus, data), "_pus");
  const Projected box = project_and_write(ctx, build_set(ctx, SetKind::Box, data), "_box");
  const HPolyhedron& assessed = intact ? intact->report.final
                                : cfg.uncertainty.kind == SetKind::Box ? box.report.final
                                                                       : pus.report.final;
  write_assessment(ctx, assessed, {Norm::One, Norm::Inf});
  write_sweep(ctx, assessed);
  write_volumes(ctx, data);
}

}  // namespace flexcert::cli
