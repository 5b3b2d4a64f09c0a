#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "becmirror.h"
#include "cli/commands.hpp"

namespace {

void add_common(CLI::App* sub, bmcli::CliOptions& opt, bool needs_config) {
  auto* c = sub->add_option("--config", opt.config_path, "run configuration file");
  if (needs_config) c->required();
  sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
}

bool parse_grid(const std::string& text, bmcli::CliOptions& opt) {
  int nx = 0, np = 0;
  if (std::sscanf(text.c_str(), "%dx%d", &nx, &np) == 2) {
    opt.grid_n_x = nx;
    opt.grid_n_p = np;
    return nx > 1 && np > 1;
  }
  if (std::sscanf(text.c_str(), "%d", &nx) == 1) {
    opt.grid_n_x = opt.grid_n_p = nx;
    return nx > 1;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("becmirror ") + bm_version() +
               " - condensate/mirror state-transfer simulator"};
  app.require_subcommand(1);

  bmcli::CliOptions opt;
  std::string grid_text;

  auto* derive = app.add_subcommand("derive", "compute effective parameters");
  add_common(derive, opt, true);
  auto* steady = app.add_subcommand("steady", "solve the classical steady state");
  add_common(steady, opt, true);
  auto* match = app.add_subcommand("match", "match the shifted oscillator frequencies");
  add_common(match, opt, true);
  auto* transfer = app.add_subcommand("transfer", "run the state-transfer experiment");
  add_common(transfer, opt, true);
  transfer->add_option("--seed", opt.seed, "override experiment seed")
      ->each([&](const std::string&) { opt.seed_set = true; });
  transfer->add_option("--grid", grid_text, "grid size N or NxM");
  transfer->add_option("--span", opt.span, "half-width of the phase-space window");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep of the transfer");
  add_common(sweep, opt, true);
  sweep->add_option("--jobs", opt.jobs, "concurrent sweep points")
      ->check(CLI::Range(1, 64));
  sweep->add_option("--seed", opt.seed, "override experiment seed")
      ->each([&](const std::string&) { opt.seed_set = true; });
  sweep->add_option("--grid", grid_text, "grid size N or NxM");
  sweep->add_option("--span", opt.span, "half-width of the phase-space window");
  auto* spectrum = app.add_subcommand("spectrum", "linearized spectrum (and optional trajectory)");
  add_common(spectrum, opt, true);
  auto* oracle = app.add_subcommand("oracle-check", "run the cross-module consistency suite");
  add_common(oracle, opt, true);
  auto* render = app.add_subcommand("render", "render a Wigner CSV as PGM/PPM");
  render->add_option("--input", opt.input_path, "Wigner CSV file")->required();
  render->add_option("--out", opt.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (!grid_text.empty() && !parse_grid(grid_text, opt)) {
    std::fprintf(stderr, "error: --grid expects N or NxM with N, M > 1\n");
    return 1;
  }

  if (derive->parsed()) return bmcli::cmd_derive(opt);
  if (steady->parsed()) return bmcli::cmd_steady(opt);
  if (match->parsed()) return bmcli::cmd_match(opt);
  if (transfer->parsed()) return bmcli::cmd_transfer(opt);
  if (sweep->parsed()) return bmcli::cmd_sweep(opt);
  if (spectrum->parsed()) return bmcli::cmd_spectrum(opt);
  if (oracle->parsed()) return bmcli::cmd_oracle_check(opt);
  if (render->parsed()) return bmcli::cmd_render(opt);
  return 1;
}
