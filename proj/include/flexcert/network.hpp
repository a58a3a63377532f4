#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flexcert/numerics.hpp"
#include "flexcert/polyhedron.hpp"

// DC network model, the benchmark admissibility LP and the generation-demand
// polytope. Generation is aggregated per bus; demand lives on the case's load
// buses only (every bus when the case does not list them).
namespace flexcert {

struct Line {
  int from = 0;
  int to = 0;
  double x = 0.0;              // reactance (p.u.); 0 when an explicit row is given
  std::optional<Vector> ptdf;  // explicit sensitivity row over `buses`
  double fmax = 0.0;           // MW
};

struct Generator {
  std::string name;
  int bus = 0;
  double gmin = 0.0;  // MW
  double gmax = 0.0;  // MW
};

struct NetworkCase {
  std::string name;
  std::vector<int> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<int> load_buses;  // ascending
  Vector nominal_demand;        // per load bus (MW), optional
  double gamma = 1000.0;        // $/MWh
  int slack = 0;

  std::size_t bus_index(int id) const;
  void validate() const;
};

struct UnitSchedule {
  bool on = false;
  double g0 = 0.0;     // MW
  double r_up = 0.0;   // MW
  double r_dn = 0.0;   // MW
};

// One schedule per generator, in case order.
struct Commitment {
  std::vector<UnitSchedule> units;
};

NetworkCase parse_case(const std::string& json_text);
NetworkCase load_case(const std::filesystem::path& path);
Commitment parse_commitment(const std::string& json_text, const NetworkCase& c);
Commitment load_commitment(const std::filesystem::path& path, const NetworkCase& c);

// Throws InvalidCommitment unless every unit respects its capacity window.
void validate_commitment(const NetworkCase& c, const Commitment& z);

// Aggregated dispatch window of every bus that hosts a committed unit.
struct BusWindow {
  int bus = 0;
  double lower = 0.0;
  double upper = 0.0;
};
std::vector<BusWindow> generation_windows(const NetworkCase& c, const Commitment& z);

// L x buses matrix; the slack column is zero.
Matrix compute_ptdf(const NetworkCase& c);

struct BaResult {
  Vector epsilon;    // per load bus, signed; q + epsilon = g - d
  double objective = 0.0;
  Vector g_hat;      // per bus in `buses` order
  Vector q;          // per bus
  Vector demand;     // per load bus (the chosen d when a range was given)
};

// Demand either fixed, or a decision restricted to a box or a polyhedron.
using DemandSpec = std::variant<Vector, BoxSet, HPolyhedron>;

BaResult solve_ba(const NetworkCase& c, const Commitment& z, const DemandSpec& demand);

struct GdPolytope {
  HPolyhedron poly;            // over (g per generation bus, d per load bus)
  std::vector<int> gen_buses;  // ascending
  std::vector<int> load_buses;
  std::size_t num_gen() const noexcept { return gen_buses.size(); }
};

// Generation windows, line limits with q = g - d, the balance equality as an
// opposing pair, and `demand_set` rows on the d block.
GdPolytope assemble_gd_polytope(const NetworkCase& c, const Commitment& z,
                                const HPolyhedron& demand_set);

// d >= 0 on every load bus.
HPolyhedron nonnegative_demand(std::size_t n);

}  // namespace flexcert
