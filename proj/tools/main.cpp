#include <CLI11.hpp>
#include <iostream>

#include "bouncelab/errors.hpp"
#include "bouncelab/pipeline.hpp"
#include "commands.hpp"

using namespace bouncelab;

namespace {

const char* footer =
    "Exit codes:\n"
    "  0  success\n"
    "  1  other error\n"
    "  2  no revival found in the search window\n"
    "  3  numerical instability (norm drift or packet at the box edge)\n"
    "  4  configuration error\n"
    "Environment:\n"
    "  BOUNCELAB_WORKERS  worker threads for sweeps (default: hardware concurrency)\n";

void add_common(CLI::App* cmd, cli::Common& common, const char* out_help) {
  cmd->add_option("-c,--config", common.config_path, "key = value configuration file");
  cmd->add_option("-s,--set", common.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("-o,--out", common.out, out_help);
  cmd->add_option("-j,--workers", common.workers, "worker threads (overrides BOUNCELAB_WORKERS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revivals of atoms bouncing on a modulated atomic mirror"};
  app.footer(footer);
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  cli::Common common;
  std::optional<double> lambda_m, lambda_bar, total_time;
  auto* propagate = app.add_subcommand("propagate", "propagate one wave packet and extract the revival");
  add_common(propagate, common, "output prefix (default: revival)");
  propagate->add_option("--lambda", lambda_m, "modulation amplitude (m)");
  propagate->add_option("--lambda-bar", lambda_bar, "dimensionless amplitude lambda omega^2 / g");
  propagate->add_option("--total-time", total_time, "propagation time (s)");

  std::vector<double> fig1_lambdas{0.0, 0.56, 1.13, 2.26};
  auto* figure1 = app.add_subcommand("figure1", "autocorrelation traces for a list of amplitudes");
  add_common(figure1, common, "output directory (default: figure1)");
  figure1->add_option("--lambdas-um", fig1_lambdas, "amplitudes in micrometres")->delimiter(',');

  double z0_um = 29.8;
  bool analytic_only = false;
  std::vector<double> fig2_bars{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
  auto* figure2 = app.add_subcommand("figure2", "numeric, perturbative and secular revival times vs lambda_bar");
  add_common(figure2, common, "output directory (default: figure2)");
  figure2->add_option("--z0-um", z0_um, "initial height (um)")->capture_default_str();
  figure2->add_option("--lambda-bar", fig2_bars, "comma-separated grid")->delimiter(',');
  figure2->add_flag("--analytic-only", analytic_only, "skip the wave-packet propagation");

  int n_first = 0, n_last = 20;
  std::optional<int> n_single;
  std::string units = "si";
  auto* spectrum = app.add_subcommand("spectrum", "semiclassical and exact levels");
  add_common(spectrum, common, "CSV file (default: stdout)");
  spectrum->add_option("--n", n_single, "single level");
  spectrum->add_option("--first", n_first)->capture_default_str();
  spectrum->add_option("--last", n_last)->capture_default_str();
  spectrum->add_option("--units", units, "si or grav")->check(CLI::IsMember({"si", "grav"}));

  std::optional<double> stark_n;
  std::vector<double> stark_lambdas{0.0};
  auto* stark = app.add_subcommand("stark", "quadratic Stark shifts and perturbative revival times");
  add_common(stark, common, "CSV file (default: stdout)");
  stark->add_option("--n", stark_n, "level (default: n0 of the configured packet)");
  stark->add_option("--lambda", stark_lambdas, "amplitudes (m), comma-separated")->delimiter(',');

  std::vector<double> sec_bars{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
  auto* secular = app.add_subcommand("secular", "secular (Mathieu) revival times");
  add_common(secular, common, "CSV file (default: stdout)");
  secular->add_option("--lambda-bar", sec_bars, "comma-separated grid")->delimiter(',');

  double nu = 0.5, q = 0.0, q_cap = 10.0;
  auto* mathieu = app.add_subcommand("mathieu", "Mathieu characteristic value a_nu(q)");
  mathieu->add_option("--nu", nu)->required();
  mathieu->add_option("--q", q)->required();
  mathieu->add_option("--q-cap", q_cap)->capture_default_str();

  std::string sweep_key = "lambda_bar";
  std::vector<double> sweep_values;
  std::vector<std::string> methods{"perturbative", "secular"};
  auto* sweep = app.add_subcommand("sweep", "revival times over any config key");
  add_common(sweep, common, "CSV file (default: stdout)");
  sweep->add_option("--key", sweep_key, "config key to vary")->capture_default_str();
  sweep->add_option("--values", sweep_values, "comma-separated values")->delimiter(',')->required();
  sweep->add_option("--methods", methods, "numeric,perturbative,secular")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::exit_ok : cli::exit_config;
  }

  try {
    if (*propagate) return cli::cmd_propagate(common, lambda_m, lambda_bar, total_time);
    if (*figure1) return cli::cmd_figure1(common, fig1_lambdas);
    if (*figure2) return cli::cmd_figure2(common, z0_um, fig2_bars, !analytic_only);
    if (*spectrum) {
      if (n_single) n_first = n_last = *n_single;
      return cli::cmd_spectrum(common, n_first, n_last, units == "grav");
    }
    if (*stark) return cli::cmd_stark(common, stark_n, stark_lambdas);
    if (*secular) return cli::cmd_secular(common, sec_bars);
    if (*mathieu) return cli::cmd_mathieu(nu, q, q_cap);
    if (*sweep) return cli::cmd_sweep(common, sweep_key, sweep_values, methods);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::exit_config;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return cli::exit_config;
  } catch (const NoRevivalFound& e) {
    std::cerr << "no revival: " << e.what() << '\n';
    return cli::exit_no_revival;
  } catch (const InstabilityError& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return cli::exit_instability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_failure;
  }
  return cli::exit_failure;
}
