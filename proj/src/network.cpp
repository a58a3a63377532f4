#include "flexcert/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include <json.hpp>

#include "flexcert/error.hpp"
#include "flexcert/io.hpp"
#include "flexcert/lp.hpp"

namespace flexcert {

using nlohmann::json;

namespace {

constexpr double kScheduleTol = 1e-9;

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorKind::InvalidCase, where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidCase, where + ": field '" + key + "': " + e.what());
  }
}

json parse_json(const std::string& text, ErrorKind kind) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(kind, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::size_t NetworkCase::bus_index(int id) const {
  const auto it = std::find(buses.begin(), buses.end(), id);
  if (it == buses.end()) fail(ErrorKind::InvalidCase, "unknown bus " + std::to_string(id));
  return static_cast<std::size_t>(it - buses.begin());
}

void NetworkCase::validate() const {
  if (buses.empty()) fail(ErrorKind::InvalidCase, "case has no buses");
  if (std::set<int>(buses.begin(), buses.end()).size() != buses.size())
    fail(ErrorKind::InvalidCase, "duplicate bus ids");
  bus_index(slack);
  if (load_buses.empty()) fail(ErrorKind::InvalidCase, "case has no load buses");
  for (std::size_t i = 0; i < load_buses.size(); ++i) {
    bus_index(load_buses[i]);
    if (i > 0 && load_buses[i] <= load_buses[i - 1])
      fail(ErrorKind::InvalidCase, "load_buses must be strictly ascending");
  }
  if (!nominal_demand.empty() && nominal_demand.size() != load_buses.size())
    fail(ErrorKind::InvalidCase, "nominal_demand must have one entry per load bus");
  for (const Line& l : lines) {
    bus_index(l.from);
    bus_index(l.to);
    if (!(l.fmax > 0.0)) fail(ErrorKind::InvalidCase, "line fmax must be positive");
    if (l.ptdf) {
      if (l.ptdf->size() != buses.size())
        fail(ErrorKind::InvalidCase, "explicit ptdf row must have one entry per bus");
    } else if (!(l.x > 0.0)) {
      fail(ErrorKind::InvalidCase, "line reactance must be positive");
    }
  }
  for (const Generator& g : generators) {
    bus_index(g.bus);
    if (!(g.gmin <= g.gmax)) fail(ErrorKind::InvalidCase, "generator " + g.name + ": gmin > gmax");
  }
  if (!(gamma > 0.0)) fail(ErrorKind::InvalidCase, "gamma must be positive");
}

NetworkCase parse_case(const std::string& json_text) {
  const json j = parse_json(json_text, ErrorKind::InvalidCase);
  NetworkCase c;
  c.name = j.value("name", std::string("case"));
  for (const json& b : field<json>(j, "buses", "case")) {
    c.buses.push_back(b.is_object() ? field<int>(b, "id", "bus") : b.get<int>());
  }
  for (const json& l : field<json>(j, "lines", "case")) {
    Line line;
    line.from = field<int>(l, "from", "line");
    line.to = field<int>(l, "to", "line");
    line.fmax = field<double>(l, "fmax", "line");
    if (l.contains("ptdf")) {
      line.ptdf = field<Vector>(l, "ptdf", "line");
    } else {
      line.x = field<double>(l, "x", "line");
    }
    c.lines.push_back(std::move(line));
  }
  std::size_t unnamed = 0;
  for (const json& g : field<json>(j, "generators", "case")) {
    Generator gen;
    gen.name = g.value("name", "G" + std::to_string(++unnamed));
    gen.bus = field<int>(g, "bus", "generator");
    gen.gmin = field<double>(g, "gmin", "generator");
    gen.gmax = field<double>(g, "gmax", "generator");
    c.generators.push_back(std::move(gen));
  }
  c.gamma = j.value("gamma", 1000.0);
  c.slack = field<int>(j, "slack", "case");
  if (j.contains("load_buses")) {
    c.load_buses = field<std::vector<int>>(j, "load_buses", "case");
  } else {
    c.load_buses = c.buses;
    std::sort(c.load_buses.begin(), c.load_buses.end());
  }
  if (j.contains("nominal_demand"))
    c.nominal_demand = field<Vector>(j, "nominal_demand", "case");
  c.validate();
  return c;
}

NetworkCase load_case(const std::filesystem::path& path) { return parse_case(read_text(path)); }

Commitment parse_commitment(const std::string& json_text, const NetworkCase& c) {
  const json j = parse_json(json_text, ErrorKind::InvalidCommitment);
  const json& list = j.is_object() && j.contains("units") ? j.at("units") : j;
  if (!list.is_array() || list.size() != c.generators.size())
    fail(ErrorKind::InvalidCommitment, "commitment must list one schedule per generator (" +
                                           std::to_string(c.generators.size()) + ")");
  Commitment z;
  for (std::size_t m = 0; m < list.size(); ++m) {
    const json& u = list[m];
    if (!u.is_object()) fail(ErrorKind::InvalidCommitment, "schedule must be an object");
    if (u.contains("generator") && u.at("generator").get<std::string>() != c.generators[m].name)
      fail(ErrorKind::InvalidCommitment, "schedule " + std::to_string(m) + " names '" +
                                             u.at("generator").get<std::string>() +
                                             "', expected '" + c.generators[m].name + "'");
    UnitSchedule s;
    try {
      s.on = u.at("u").get<int>() != 0;
      s.g0 = u.value("g0", 0.0);
      s.r_up = u.value("r_up", 0.0);
      s.r_dn = u.value("r_dn", 0.0);
    } catch (const json::exception& e) {
      fail(ErrorKind::InvalidCommitment, std::string("schedule fields: ") + e.what());
    }
    z.units.push_back(s);
  }
  validate_commitment(c, z);
  return z;
}

Commitment load_commitment(const std::filesystem::path& path, const NetworkCase& c) {
  return parse_commitment(read_text(path), c);
}

void validate_commitment(const NetworkCase& c, const Commitment& z) {
  if (z.units.size() != c.generators.size())
    fail(ErrorKind::InvalidCommitment, "commitment size does not match generator count");
  for (std::size_t m = 0; m < z.units.size(); ++m) {
    const UnitSchedule& s = z.units[m];
    const Generator& g = c.generators[m];
    if (s.r_up < 0.0 || s.r_dn < 0.0)
      fail(ErrorKind::InvalidCommitment, g.name + ": reserves must be nonnegative");
    if (!s.on) continue;
    if (s.g0 - s.r_dn < g.gmin - kScheduleTol || s.g0 + s.r_up > g.gmax + kScheduleTol)
      fail(ErrorKind::InvalidCommitment, g.name + ": reserve window [" +
                                             format_number(s.g0 - s.r_dn) + ", " +
                                             format_number(s.g0 + s.r_up) +
                                             "] leaves the capacity range");
  }
}

std::vector<BusWindow> generation_windows(const NetworkCase& c, const Commitment& z) {
  validate_commitment(c, z);
  std::vector<BusWindow> out;
  std::vector<int> ids = c.buses;
  std::sort(ids.begin(), ids.end());
  for (int bus : ids) {
    BusWindow w{bus, 0.0, 0.0};
    bool any = false;
    for (std::size_t m = 0; m < c.generators.size(); ++m) {
      if (c.generators[m].bus != bus || !z.units[m].on) continue;
      any = true;
      w.lower += z.units[m].g0 - z.units[m].r_dn;
      w.upper += z.units[m].g0 + z.units[m].r_up;
    }
    if (any) out.push_back(w);
  }
  return out;
}

Matrix compute_ptdf(const NetworkCase& c) {
  const std::size_t n = c.buses.size();
  const std::size_t s = c.bus_index(c.slack);
  Matrix ptdf(c.lines.size(), n);

  bool needs_b = false;
  for (const Line& l : c.lines) needs_b = needs_b || !l.ptdf;
  Matrix theta;  // theta(k, col): angle at bus k for unit injection at col
  if (needs_b) {
    std::vector<std::vector<std::size_t>> adj(n);
    Matrix b(n, n);
    for (const Line& l : c.lines) {
      if (l.ptdf) continue;
      const std::size_t i = c.bus_index(l.from), k = c.bus_index(l.to);
      adj[i].push_back(k);
      adj[k].push_back(i);
      b(i, i) += 1.0 / l.x;
      b(k, k) += 1.0 / l.x;
      b(i, k) -= 1.0 / l.x;
      b(k, i) -= 1.0 / l.x;
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(s);
    seen[s] = true;
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for (std::size_t w : adj[v])
        if (!seen[w]) frontier.push(w), seen[w] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i])
        fail(ErrorKind::Disconnected, "bus " + std::to_string(c.buses[i]) +
                                          " is not connected to the slack bus");

    // Reduced susceptance matrix without the slack row and column.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
      if (i != s) keep.push_back(i);
    Matrix reduced(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t k = 0; k < keep.size(); ++k) reduced(i, k) = b(keep[i], keep[k]);
    theta = Matrix(n, n);
    for (std::size_t col = 0; col < keep.size(); ++col) {
      Vector e(keep.size(), 0.0);
      e[col] = 1.0;
      Vector sol;
      try {
        sol = solve_linear(reduced, e);
      } catch (const Error&) {
        fail(ErrorKind::SingularSusceptance, "susceptance matrix is singular");
      }
      for (std::size_t i = 0; i < keep.size(); ++i) theta(keep[i], keep[col]) = sol[i];
    }
  }

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const Line& line = c.lines[l];
    if (line.ptdf) {
      for (std::size_t k = 0; k < n; ++k) ptdf(l, k) = (*line.ptdf)[k];
      continue;
    }
    const std::size_t i = c.bus_index(line.from), k = c.bus_index(line.to);
    for (std::size_t col = 0; col < n; ++col)
      ptdf(l, col) = col == s ? 0.0 : (theta(i, col) - theta(k, col)) / line.x;
  }
  return ptdf;
}

BaResult solve_ba(const NetworkCase& c, const Commitment& z, const DemandSpec& demand) {
  using lp::Relation;
  const auto windows = generation_windows(c, z);
  const Matrix ptdf = compute_ptdf(c);
  const std::size_t ng = windows.size();
  const std::size_t nd = c.load_buses.size();
  const Vector* fixed = std::get_if<Vector>(&demand);
  if (fixed && fixed->size() != nd)
    fail(ErrorKind::BadDimension, "solve_ba: demand has " + std::to_string(fixed->size()) +
                                      " entries, case has " + std::to_string(nd) + " load buses");
  if (const auto* box = std::get_if<BoxSet>(&demand); box && box->dim() != nd)
    fail(ErrorKind::BadDimension, "solve_ba: demand box dimension");
  if (const auto* h = std::get_if<HPolyhedron>(&demand); h && h->dim() != nd)
    fail(ErrorKind::BadDimension, "solve_ba: demand polyhedron dimension");

  // Layout: g (ng) | eps+ (nd) | eps- (nd) | d (nd, only for a range)
  const std::size_t ep = ng, em = ng + nd, dv = ng + 2 * nd;
  const std::size_t nvar = fixed ? dv : dv + nd;
  lp::LinearProgram prog(nvar);
  for (std::size_t k = 0; k < nd; ++k) prog.objective[ep + k] = prog.objective[em + k] = c.gamma;
  for (std::size_t i = 0; i < ng; ++i) prog.bounds[i] = {windows[i].lower, windows[i].upper};

  // Linear part of sum_n coef_n * q_n, q = g - d - eps; `constant` collects fixed demand.
  auto injection_row = [&](auto coef, Vector& row, double& constant) {
    for (std::size_t i = 0; i < ng; ++i) row[i] += coef(c.bus_index(windows[i].bus));
    for (std::size_t k = 0; k < nd; ++k) {
      const double h = coef(c.bus_index(c.load_buses[k]));
      row[ep + k] -= h;
      row[em + k] += h;
      if (fixed)
        constant -= h * (*fixed)[k];
      else
        row[dv + k] -= h;
    }
  };

  {
    Vector row(nvar, 0.0);
    double constant = 0.0;
    injection_row([](std::size_t) { return 1.0; }, row, constant);
    prog.add(row, Relation::Equal, -constant);
  }
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    Vector row(nvar, 0.0);
    double constant = 0.0;
    injection_row([&](std::size_t b) { return ptdf(l, b); }, row, constant);
    if (norm_inf(row) == 0.0) continue;
    prog.add(row, Relation::LessEqual, c.lines[l].fmax - constant);
    prog.add(row, Relation::GreaterEqual, -c.lines[l].fmax - constant);
  }
  if (const auto* box = std::get_if<BoxSet>(&demand)) {
    for (std::size_t k = 0; k < nd; ++k) prog.bounds[dv + k] = {box->lower[k], box->upper[k]};
  } else if (const auto* h = std::get_if<HPolyhedron>(&demand)) {
    for (std::size_t k = 0; k < nd; ++k) prog.set_free(dv + k);
    for (std::size_t j = 0; j < h->num_rows(); ++j) {
      Vector row(nvar, 0.0);
      for (std::size_t k = 0; k < nd; ++k) row[dv + k] = h->row(j)[k];
      prog.add(row, Relation::GreaterEqual, h->rhs(j));
    }
  }

  const lp::LpOutcome out = lp::solve(prog);
  if (out.status == lp::Status::Infeasible) {
    if (fixed) fail(ErrorKind::Internal, "solve_ba: LP infeasible despite free imbalance");
    fail(ErrorKind::InfeasibleInput, "solve_ba: demand range is empty");
  }
  if (!out.optimal()) fail(ErrorKind::Internal, "solve_ba: LP unbounded");

  BaResult r;
  r.objective = out.objective_value;
  r.epsilon.resize(nd);
  r.demand.resize(nd);
  r.g_hat.assign(c.buses.size(), 0.0);
  r.q.assign(c.buses.size(), 0.0);
  for (std::size_t i = 0; i < ng; ++i) {
    const std::size_t b = c.bus_index(windows[i].bus);
    r.g_hat[b] = out.solution[i];
    r.q[b] += out.solution[i];
  }
  for (std::size_t k = 0; k < nd; ++k) {
    r.epsilon[k] = out.solution[ep + k] - out.solution[em + k];
    r.demand[k] = fixed ? (*fixed)[k] : out.solution[dv + k];
    r.q[c.bus_index(c.load_buses[k])] -= r.demand[k] + r.epsilon[k];
  }
  return r;
}

GdPolytope assemble_gd_polytope(const NetworkCase& c, const Commitment& z,
                                const HPolyhedron& demand_set) {
  const auto windows = generation_windows(c, z);
  const Matrix ptdf = compute_ptdf(c);
  const std::size_t ng = windows.size();
  const std::size_t nd = c.load_buses.size();
  if (demand_set.dim() != nd)
    fail(ErrorKind::BadDimension, "assemble_gd_polytope: demand set has dimension " +
                                      std::to_string(demand_set.dim()) + ", expected " +
                                      std::to_string(nd));
  GdPolytope out{HPolyhedron(ng + nd), {}, c.load_buses};
  for (const auto& w : windows) out.gen_buses.push_back(w.bus);

  Vector row(ng + nd);
  for (std::size_t i = 0; i < ng; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = 1.0;
    out.poly.add_row(row, windows[i].lower);
    row[i] = -1.0;
    out.poly.add_row(row, -windows[i].upper);
  }

  auto injection_row = [&](auto coef) {
    Vector r(ng + nd, 0.0);
    for (std::size_t i = 0; i < ng; ++i) r[i] = coef(c.bus_index(windows[i].bus));
    for (std::size_t k = 0; k < nd; ++k) r[ng + k] = -coef(c.bus_index(c.load_buses[k]));
    return r;
  };
  auto negated = [](Vector r) {
    for (double& v : r) v = -v;
    return r;
  };

  const Vector balance = injection_row([](std::size_t) { return 1.0; });
  out.poly.add_row(balance, 0.0);
  out.poly.add_row(negated(balance), 0.0);

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const Vector flow = injection_row([&](std::size_t b) { return ptdf(l, b); });
    if (norm_inf(flow) == 0.0) continue;
    out.poly.add_row(flow, -c.lines[l].fmax);
    out.poly.add_row(negated(flow), -c.lines[l].fmax);
  }
  out.poly.append(demand_set.embed(ng + nd, ng));
  return out;
}

HPolyhedron nonnegative_demand(std::size_t n) {
  HPolyhedron p(n);
  Vector row(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    row[k] = 1.0;
    p.add_row(row, 0.0);
  }
  return p;
}

}  // namespace flexcert
