// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexcert/cli.hpp"
#include "flexcert/ddio.hpp"
#include "flexcert/error.hpp"
#include "flexcert/io.hpp"
#include "flexcert/loadability.hpp"
#include "flexcert/network.hpp"
#include "flexcert/rng.hpp"
#include "flexcert/uncertainty.hpp"

using namespace flexcert;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = FLEXCERT_SOURCE_DIR;
const fs::path kTool = FLEXCERT_TOOL;

constexpr double kEta = 0.067;
constexpr double kAlpha = 0.8;
constexpr std::size_t kSamples = 4000;
constexpr std::uint64_t kSeed = 42;

const std::vector<std::vector<std::size_t>> kRtsGroups = {
    {0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10}, {11, 12, 13}, {14, 15, 16}};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

struct System {
  std::string name;
  NetworkCase net;
  Commitment z;
  SynthData data;
};

System load_system(const std::string& case_file, const std::string& commitment_file) {
  System s;
  s.net = load_case(kRoot / "cases" / case_file);
  s.z = load_commitment(kRoot / "cases" / commitment_file, s.net);
  s.name = s.net.name;
  s.data = synth_generate(s.net.nominal_demand, kEta, kAlpha, kSamples, kSeed);
  return s;
}

const System& three_bus() {
  static const System s = load_system("three_bus.json", "three_bus_zeta3.json");
  return s;
}

const System& rts() {
  static const System s = load_system("rts_reduced.json", "rts_reduced_commitment.json");
  return s;
}

HPolyhedron project(const System& s, const HPolyhedron& demand) {
  const GdPolytope gd = assemble_gd_polytope(s.net, s.z, demand);
  std::vector<std::size_t> vars(gd.num_gen());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  return project_loadability(gd.poly, vars).final;
}

BoxSet data_box(const System& s) {
  return box_from_data(s.data.observed, s.data.forecast, s.net.nominal_demand);
}

HPolyhedron pus_rows(const System& s) {
  if (s.net.load_buses.size() > 2)
    return grouped_pus_to_hrep(
        build_grouped_pus(s.data.observed, s.data.forecast, kRtsGroups, s.net.nominal_demand));
  return pus_to_hrep(build_pus(s.data.observed, s.data.forecast, s.net.nominal_demand));
}

struct NamedSet {
  std::string label;
  const System* system;
  HPolyhedron d;
  BoxSet probe_box;
};

// Every loadability set the acceptance run produces, built once.
const std::vector<NamedSet>& all_sets() {
  static const std::vector<NamedSet> sets = [] {
    std::vector<NamedSet> out;
    const System& tb = three_bus();
    out.push_back({"3-bus intact", &tb, project(tb, nonnegative_demand(2)), BoxSet{{-10, -10}, {520, 520}}});
    for (const System* s : {&tb, &rts()}) {
      const BoxSet box = data_box(*s);
      BoxSet wide = box;
      for (std::size_t k = 0; k < box.dim(); ++k) {
        const double pad = 0.1 * (box.upper[k] - box.lower[k]);
        wide.lower[k] -= pad;
        wide.upper[k] += pad;
      }
      const std::string tag = s == &tb ? "3-bus" : "RTS";
      out.push_back({tag + " box", s, project(*s, box.to_hrep()), wide});
      out.push_back({tag + " PUS", s, project(*s, pus_rows(*s)), wide});
    }
    return out;
  }();
  return sets;
}

Vector uniform_in(Rng& rng, const BoxSet& box) {
  Vector x(box.dim());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(box.lower[k], box.upper[k]);
  return x;
}

// ------------------------------------------------------------------ criteria

Outcome criterion_1() {
  // Operating points drawn from the Scenario-1 data range, split by
  // membership in the network-only loadability set.
  const auto t0 = Clock::now();
  const System& s = three_bus();
  const HPolyhedron d = project(s, nonnegative_demand(2));
  const BoxSet range = data_box(s);
  Rng rng(kSeed);
  AssessOptions opt;
  opt.norm = Norm::One;
  int interior = 0, exterior = 0, draws = 0;
  double worst = 0.0;
  while ((interior < 100 || exterior < 100) && draws < 100000) {
    ++draws;
    const Vector d0 = uniform_in(rng, range);
    const bool inside = d.min_slack(d0) > 0.0;
    int& count = inside ? interior : exterior;
    if (count >= 100) continue;
    ++count;
    const double rdc = ddio_assess(d, d0, opt).rdc;
    const double ba = solve_ba(s.net, s.z, d0).objective / s.net.gamma;
    worst = std::max(worst, std::abs(rdc - ba));
  }
  const double secs = seconds_since(t0);
  return {interior == 100 && exterior == 100 && worst <= 1e-6 && secs <= 30.0,
          "max |RDC - BA/gamma| = " + fmt(worst) + " MW over " + std::to_string(interior) +
              " interior + " + std::to_string(exterior) + " exterior points, " + fmt(secs) + " s"};
}

Outcome criterion_2() {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  int disagreements = 0;
  struct Case {
    const System* s;
    HPolyhedron d;
    BoxSet box;
    std::string label;
  };
  std::vector<Case> cases;
  for (const System* s : {&three_bus(), &rts()}) {
    const BoxSet box = data_box(*s);
    cases.push_back({s, project(*s, box.to_hrep()), box, s->name + " box"});
  }
  cases.push_back({&three_bus(), project(three_bus(), nonnegative_demand(2)),
                   BoxSet{{0, 0}, {520, 520}}, "three_bus intact"});
  for (const Case& c : cases) {
    Rng rng(kSeed + 1);
    int feasible = 0, bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = uniform_in(rng, c.box);
      const bool by_ba = solve_ba(c.s->net, c.s->z, x).objective <= 1e-6 * c.s->net.gamma;
      const bool by_set = c.d.contains(x, 1e-7);
      feasible += by_ba;
      bad += by_ba != by_set;
    }
    disagreements += bad;
    detail << c.label << ": " << bad << " disagreements (" << feasible << "/1000 feasible); ";
  }
  const double secs = seconds_since(t0);
  detail << fmt(secs) << " s";
  return {disagreements == 0 && secs <= 60.0, detail.str()};
}

Outcome criterion_3() {
  std::ostringstream detail;
  bool ok = true;
  for (const NamedSet& n : all_sets()) {
    Rng rng(kSeed + 2);
    std::vector<Vector> probes(10000);
    for (Vector& p : probes) p = uniform_in(rng, n.probe_box);
    int by_probe = 0, by_lp = 0, redundant = 0;
    for (std::size_t j = 0; j < n.d.num_rows(); ++j) {
      if (is_redundant(n.d, j)) {
        ++redundant;
        continue;
      }
      // Dropping row j admits a probe that only row j excluded?
      bool moved = false;
      for (const Vector& p : probes) {
        if (n.d.slack(j, p) >= 0.0) continue;
        bool others = true;
        for (std::size_t k = 0; k < n.d.num_rows() && others; ++k)
          if (k != j && n.d.slack(k, p) < 0.0) others = false;
        if (others) {
          moved = true;
          break;
        }
      }
      // Otherwise the failed redundancy LP above is the supporting certificate.
      ++(moved ? by_probe : by_lp);
    }
    ok = ok && redundant == 0;
    detail << n.label << ": " << n.d.num_rows() << " rows, " << redundant << " redundant (" << by_probe
           << " by probe, " << by_lp << " by LP); ";
  }
  return {ok, detail.str()};
}

// Point where the ray from z along dir leaves d.
Vector ray_exit(const HPolyhedron& d, const Vector& z, const Vector& dir) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.num_rows(); ++j) {
    const double rate = dot(d.row(j), dir);
    if (rate < 0.0) t = std::min(t, d.slack(j, z) / -rate);
  }
  Vector x = z;
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += t * dir[k];
  return x;
}

Outcome criterion_4() {
  const HPolyhedron& d = all_sets()[0].d;
  AssessOptions opt;
  opt.norm = Norm::Inf;
  Rng rng(kSeed + 3);
  const BoxSet bbox{{0, 0}, {520, 520}};

  std::vector<Vector> interior;
  while (interior.size() < 1000) {
    const Vector x = uniform_in(rng, bbox);
    if (d.min_slack(x) > 0.0) interior.push_back(x);
  }
  int out_of_range = 0;
  std::vector<double> rho(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) {
    rho[i] = ddio_assess(d, interior[i], opt).rho;
    out_of_range += rho[i] < 0.0 || rho[i] > 1.0;
  }

  const ChebyshevCenter cc = chebyshev_center(d, Norm::Inf);
  double facet_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    const Vector x = ray_exit(d, cc.center, Vector{std::cos(angle), std::sin(angle)});
    facet_err = std::max(facet_err, std::abs(ddio_assess(d, x, opt).rho - 1.0));
  }

  const double rho_c = ddio_assess(d, cc.center, opt).rho;
  const double rho_min = *std::min_element(rho.begin(), rho.begin() + 100);
  const bool center_min = rho_c <= rho_min + 1e-9;
  return {out_of_range == 0 && facet_err <= 1e-6 && center_min,
          std::to_string(out_of_range) + " of 1000 interior rho outside [0,1]; max |rho-1| on 100 facet points " +
              fmt(facet_err) + "; Chebyshev-centre rho " + fmt(rho_c) + " vs min of 100 interior " +
              fmt(rho_min)};
}

Outcome criterion_5() {
  int violations = 0, checked = 0;
  Rng rng(kSeed + 4);
  for (const NamedSet& n : all_sets()) {
    std::vector<Vector> points{n.system->net.nominal_demand};
    for (int i = 0; i < 4; ++i) points.push_back(uniform_in(rng, n.probe_box));
    for (const Vector& d0 : points)
      for (std::size_t j = 0; j < n.d.num_rows(); ++j) {
        const double inf = ddio_subproblem(n.d, d0, j, Norm::Inf).distance;
        const double one = ddio_subproblem(n.d, d0, j, Norm::One).distance;
        ++checked;
        violations += inf > one + 1e-9 * (1.0 + one);
      }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(checked) +
                               " row subproblems on " + std::to_string(all_sets().size()) + " sets"};
}

Outcome criterion_6() {
  const auto t0 = Clock::now();
  cli::RunConfig cfg = cli::load_config(kRoot / "configs/three_bus_scenario1.json");
  cfg.output = fs::temp_directory_path() / "flexcert_acceptance_volume";
  cfg.volume_samples = 100000;
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  cli::cmd_volume(cfg);
  std::cout.rdbuf(old);
  const json v = json::parse(read_text(cfg.output / "volumes.json"))["sets"];
  auto gap = [&](const char* small, const char* large) {
    const double se = std::hypot(v[small]["std_error"].get<double>(), v[large]["std_error"].get<double>());
    return (v[large]["volume"].get<double>() - v[small]["volume"].get<double>()) / se;
  };
  const double g_sets = gap("pus", "box"), g_load = gap("pus_loadability", "box_loadability");
  const double secs = seconds_since(t0);
  return {g_sets >= 4.0 && g_load >= 4.0 && secs <= 60.0,
          "PUS " + fmt(v["pus"]["volume"]) + " < box " + fmt(v["box"]["volume"]) + " by " + fmt(g_sets) +
              " se; PUS-D " + fmt(v["pus_loadability"]["volume"]) + " < box-D " +
              fmt(v["box_loadability"]["volume"]) + " by " + fmt(g_load) + " se; " + fmt(secs) + " s"};
}

Outcome criterion_7() {
  Rng rng(kSeed + 5);
  int disagreements = 0, tested = 0;
  while (tested < 50) {
    HPolyhedron p(3);
    const int rows = 4 + static_cast<int>(rng.next_u64() % 7);
    for (int j = 0; j < rows; ++j) {
      Vector a(3);
      for (double& v : a) v = rng.uniform(-1.0, 1.0);
      p.add_row(a, -rng.uniform(0.2, 2.0));
    }
    const std::size_t var = rng.next_u64() % 3;
    HPolyhedron q;
    try {
      q = remove_redundant(fme_eliminate(p, var));
    } catch (const Error&) {
      // Unbounded in var from both sides leaves no rows; nothing to compare.
      continue;
    }
    ++tested;
    const std::size_t hidden[] = {var};
    for (int s = 0; s < 500; ++s) {
      const Vector x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      disagreements += q.contains(x) != lift_feasible(p, hidden, x);
    }
  }
  return {disagreements == 0,
          std::to_string(disagreements) + " disagreements over 50 polytopes x 500 samples"};
}

Outcome criterion_8() {
  Rng rng(kSeed + 6);
  double worst_aty = 0, worst_c = 0, worst_gap = 0, worst_feas = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 2;
    HPolyhedron p = BoxSet{Vector(n, -2.0), Vector(n, 2.0)}.to_hrep();
    for (int j = 0; j < 5; ++j) {
      Vector a(n);
      for (double& v : a) v = rng.uniform(-1.0, 1.0);
      p.add_row(a, -norm2(a) * rng.uniform(0.3, 2.0));
    }
    const HPolyhedron d = remove_redundant(p);
    Vector d0(n);
    for (double& v : d0) v = rng.uniform(-3.0, 3.0);
    AssessOptions opt;
    opt.norm = t % 4 < 2 ? Norm::One : Norm::Inf;
    const DdioResult r = ddio_assess(d, d0, opt);
    const InverseCertificate c = recover_certificate(d, d0, r);
    for (std::size_t k = 0; k < n; ++k) {
      double aty = 0.0;
      for (std::size_t j = 0; j < d.num_rows(); ++j) aty += d.row(j)[k] * c.y[j];
      worst_aty = std::max(worst_aty, std::abs(aty - c.c[k]));
    }
    worst_c = std::max(worst_c, std::abs(norm1(c.c) - 1.0));
    Vector x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = d0[k] - c.s[k];
    const double dual = dot(d.b(), c.y);
    worst_gap = std::max(worst_gap, std::abs(dot(c.c, x) - dual) / (1.0 + std::abs(dual)));
    worst_feas = std::max(worst_feas, -d.min_slack(x));
  }
  return {worst_aty <= 1e-7 && worst_c <= 1e-9 && worst_gap <= 1e-6 && worst_feas <= 1e-7,
          "max |A'y - c| " + fmt(worst_aty) + ", max | ||c||_1 - 1 | " + fmt(worst_c) +
              ", max duality gap " + fmt(worst_gap) + ", max infeasibility " + fmt(std::max(0.0, worst_feas))};
}

Outcome criterion_9() {
  std::ostringstream detail;
  bool ok = true;
  for (const System* s : {&three_bus(), &rts()}) {
    const Vector& mu = s->net.nominal_demand;
    const std::size_t n = mu.size();
    const Matrix sample = covariance(center_data(s->data.observed, s->data.forecast));
    const Matrix target = synth_covariance(mu, kEta, kAlpha);
    double diff = 0.0, norm = 0.0, corr_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        diff += std::pow(sample(i, j) - target(i, j), 2);
        norm += std::pow(target(i, j), 2);
        if (i < j)
          corr_err = std::max(corr_err,
                              std::abs(sample(i, j) / std::sqrt(sample(i, i) * sample(j, j)) - kAlpha));
      }
    const double frob = std::sqrt(diff / norm);
    ok = ok && frob <= 0.10 && corr_err <= 0.05;
    detail << s->name << ": Frobenius " << fmt(frob) << ", max |corr - alpha| " << fmt(corr_err) << "; ";
  }
  return {ok, detail.str()};
}

Outcome criterion_10() {
  const fs::path base = fs::temp_directory_path() / "flexcert_acceptance_repro";
  fs::remove_all(base);
  const fs::path config = kRoot / "configs/three_bus_scenario1.json";
  std::vector<double> times;
  for (const char* run : {"a", "b"}) {
    const auto t0 = Clock::now();
    const std::string cmd = "\"" + kTool.string() + "\" repro --config \"" + config.string() + "\" --out \"" +
                            (base / run).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "repro exited with an error"};
    times.push_back(seconds_since(t0));
  }
  const char* files[] = {"W.csv",           "mu.csv",          "D_intact.csv",       "D_pus.csv",
                         "D_box.csv",       "report_intact.json", "report_pus.json", "report_box.json",
                         "result.json",     "rho_grid.csv",    "volumes.json"};
  int missing = 0, differ = 0;
  for (const char* f : files) {
    if (!fs::exists(base / "a" / f) || !fs::exists(base / "b" / f)) {
      ++missing;
      continue;
    }
    differ += read_text(base / "a" / f) != read_text(base / "b" / f);
  }
  const double slowest = std::max(times[0], times[1]);
  return {missing == 0 && differ == 0 && slowest < 60.0,
          std::to_string(std::size(files) - missing) + "/" + std::to_string(std::size(files)) +
              " files, " + std::to_string(differ) + " differ between runs, slowest run " + fmt(slowest) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"BA-DDIO(1) equivalence", criterion_1}, {"projection soundness", criterion_2},
      {"minimality", criterion_3},             {"metric bounds", criterion_4},
      {"norm ordering", criterion_5},          {"volume direction", criterion_6},
      {"FME exactness", criterion_7},          {"inverse certificate", criterion_8},
      {"statistical generator", criterion_9},  {"end-to-end repro", criterion_10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
