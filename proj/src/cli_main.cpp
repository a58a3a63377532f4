#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexcert/cli.hpp"
#include "flexcert/error.hpp"
#include "flexcert/parallel.hpp"

namespace flexcert::cli {

namespace {

void report(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Flexibility characterization of dispatchable power systems"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t threads = 0;

  using Command = void (*)(const RunConfig&);
  const std::pair<const char*, Command> commands[] = {
      {"synth", cmd_synth},   {"project", cmd_project}, {"assess", cmd_assess},
      {"sweep", cmd_sweep},   {"volume", cmd_volume},   {"repro", cmd_repro},
  };
  const char* blurbs[] = {
      "generate synthetic forecast/observation data",
      "project the generation-demand polytope onto demand space",
      "assess the configured operating point (rho, RDC, certificate)",
      "assess a family of operating points",
      "Monte Carlo volumes of the uncertainty and loadability sets",
      "run the full pipeline",
  };
  Command chosen = nullptr;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, blurbs[i]);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override the run seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--out", out, "output directory");
    sub->callback([&chosen, fn = commands[i].second] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_max_threads(threads);
    Overrides ov;
    ov.seed = seed;
    if (out) ov.output = *out;
    chosen(load_config(config, ov));
    return 0;
  } catch (const Error& e) {
    report(to_string(e.kind()), e.what());
    return is_input_error(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    report("Internal", e.what());
    return 3;
  }
}

}  // namespace flexcert::cli
