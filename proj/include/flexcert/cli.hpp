#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flexcert/ddio.hpp"
#include "flexcert/network.hpp"

// Pipeline commands behind the flexcert executable. Every command is a pure
// function of the configuration and seed; outputs are CSV and JSON files.
namespace flexcert::cli {

struct SynthSpec {
  std::optional<Vector> profile;  // defaults to the case's nominal demand
  double eta = 0.067;
  double alpha = 0.8;
  std::size_t samples = 4000;
  std::optional<std::uint64_t> seed;  // defaults to the run seed
};

enum class SetKind { Pus, Box, None };

struct UncertaintySpec {
  SetKind kind = SetKind::Pus;
  std::optional<SynthSpec> synth;
  std::filesystem::path observed;  // CSV, used when synth is absent
  std::filesystem::path forecast;
  std::optional<std::size_t> components;
  std::vector<std::vector<std::size_t>> groups;  // node groups (indices into load buses)
  std::optional<Vector> center;                  // d0 of the sets; default nominal demand
};

struct SweepSpec {
  enum class Kind { Ray, Grid, Points } kind = Kind::Ray;
  double from_scale = 0.86;  // ray: multiples of d0
  double to_scale = 1.14;
  std::size_t points = 29;
  Vector lower, upper;              // grid
  std::vector<std::size_t> steps;   // grid
  std::vector<Vector> explicit_points;
};

struct RunConfig {
  std::filesystem::path case_path;
  std::filesystem::path commitment_path;
  UncertaintySpec uncertainty;
  std::optional<Vector> d0;     // point to assess; default nominal demand
  bool assess_intact = true;    // assess against the network-only set
  Norm norm = Norm::One;
  std::filesystem::path output = "out";
  std::size_t volume_samples = 100000;
  std::uint64_t seed = 42;
  SweepSpec sweep;
  std::size_t max_rows = 100000;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

// Parses a JSON config; relative paths resolve against the config's folder.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                       const Overrides& overrides = {});

void cmd_synth(const RunConfig& cfg);
void cmd_project(const RunConfig& cfg);
void cmd_assess(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_volume(const RunConfig& cfg);
void cmd_repro(const RunConfig& cfg);

// Full command line handling; returns the process exit code
// (0 success, 2 configuration or input error, 3 numerical failure).
int run(int argc, char** argv);

}  // namespace flexcert::cli
