#include "anisurf/commands.hpp"
#include "anisurf/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace anisurf;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> quadrature;
  std::optional<double> tolerance_scale;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "scenario config (INI)")->required();
  cmd->add_option("--out", o.out, "output directory (overrides [output] dir)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--quadrature", o.quadrature, "Gauss-Legendre order per patch direction");
  cmd->add_option("--tolerance-scale", o.tolerance_scale, "multiplier on every tolerance")
      ->check(CLI::PositiveNumber);
}

ScenarioConfig resolve(const Overrides& o) {
  ScenarioConfig c = load_config(o.config);
  if (o.out) c.output_dir = *o.out;
  if (o.seed) c.numerics.seed = *o.seed;
  if (o.quadrature) {
    if (*o.quadrature < 2 || *o.quadrature > 128) throw ConfigError("--quadrature: 2..128");
    c.numerics.quadrature = *o.quadrature;
  }
  if (o.tolerance_scale) c.numerics.tolerance_scale = *o.tolerance_scale;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic surface energy: Wulff shapes, identity verification, Delaunay surfaces"};
  app.require_subcommand(1);
  Overrides wo, vo, dov;
  add_common(app.add_subcommand("wulff", "construct the Wulff shape of gamma"), wo);
  add_common(app.add_subcommand("verify", "run the identity checks on a surface"), vo);
  add_common(app.add_subcommand("delaunay", "generate a constant-Lambda surface of revolution type"), dov);
  auto* merge = app.add_subcommand("report-merge", "merge report JSON files");
  std::vector<std::string> inputs;
  std::string merge_out = "out";
  merge->add_option("reports", inputs, "report.json files")->required()->check(CLI::ExistingFile);
  merge->add_option("--out", merge_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "report-merge") return cmd_report_merge(inputs, merge_out, std::cerr);
  try {
    if (name == "wulff") return cmd_wulff(resolve(wo), std::cout);
    if (name == "verify") return cmd_verify(resolve(vo), std::cout);
    if (name == "delaunay") return cmd_delaunay(resolve(dov), std::cout);
  } catch (const ConfigError& e) {
    std::cerr << name << ": config error: " << e.what() << "\n";
    return exit_config_error;
  }
  return exit_config_error;
}
