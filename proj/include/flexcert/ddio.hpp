#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flexcert/polyhedron.hpp"

// Decomposed inverse optimization against a loadability set D = {d | A d >= b}:
// one minimal-perturbation LP per row, the flexibility metric rho and the
// residual demand curtailed (RDC).
namespace flexcert {

enum class Norm { One, Inf };

const char* to_string(Norm r);
Norm parse_norm(const std::string& text);  // "1" or "inf"

struct Subproblem {
  Vector s;               // perturbation; d0 - s lies on row j inside D
  double distance = 0.0;  // ||s||_r
};

// min ||s||_r  s.t.  A (d0 - s) >= b,  a_j . (d0 - s) = b_j.
Subproblem ddio_subproblem(const HPolyhedron& d, std::span<const double> d0, std::size_t j,
                           Norm r);

enum class Classification { Interior, Boundary, Exterior };

const char* to_string(Classification c);

struct DdioResult {
  Norm norm = Norm::Inf;
  std::vector<Vector> s;  // per row
  Vector distances;       // per row, ||s_j||_r
  std::vector<std::size_t> j_star;
  double min_distance = 0.0;
  double mean_distance = 0.0;
  double rho = 0.0;
  bool degenerate = false;  // mean distance ~ 0, rho reported as 0
  std::vector<std::size_t> violated;
  double rdc = 0.0;          // signed: > 0 shed load, < 0 curtail renewables
  double rdc_shed = 0.0;     // sum of positive components over violated rows
  double rdc_curtail = 0.0;  // sum of negative components over violated rows
  Classification classification = Classification::Interior;
};

struct AssessOptions {
  Norm norm = Norm::Inf;
  // D must be minimal. By default a few random rows are certified by LP; the
  // full check certifies every row.
  bool full_minimality_check = false;
  std::size_t spot_checks = 3;
  std::uint64_t seed = 0;
};

DdioResult ddio_assess(const HPolyhedron& d, std::span<const double> d0,
                       const AssessOptions& options = {});

// Cost vector and dual certificate making d0 - s optimal for min c.x over D.
struct InverseCertificate {
  std::size_t row = 0;  // lowest index in j_star
  Vector c;             // ||c||_1 = 1
  Vector y;             // one weight per row, nonzero only at `row`
  Vector s;
};

InverseCertificate recover_certificate(const HPolyhedron& d, std::span<const double> d0,
                                       const DdioResult& result);

struct SweepPoint {
  Vector d0;
  double rho = 0.0;
  double rdc = 0.0;
  Classification classification = Classification::Interior;
};

std::vector<SweepPoint> rho_sweep(const HPolyhedron& d, const std::vector<Vector>& grid,
                                  const AssessOptions& options = {});

// Centre of the largest ball (in the given norm) inside D.
struct ChebyshevCenter {
  Vector center;
  double radius = 0.0;
};

ChebyshevCenter chebyshev_center(const HPolyhedron& d, Norm ball);

}  // namespace flexcert
