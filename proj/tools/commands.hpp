#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bouncelab/config.hpp"

namespace bouncelab::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_no_revival = 2,
  exit_instability = 3,
  exit_config = 4,
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::string out;                     // file or directory, command dependent
  int workers = 0;
};

RunConfig resolve_config(const Common& common);

int cmd_propagate(const Common& common, std::optional<double> lambda_m,
                  std::optional<double> lambda_bar, std::optional<double> total_time);
int cmd_figure1(const Common& common, const std::vector<double>& lambdas_um);
int cmd_figure2(const Common& common, double z0_um, const std::vector<double>& lambda_bars,
                bool numeric);
int cmd_spectrum(const Common& common, int n_first, int n_last, bool gravitational);
int cmd_stark(const Common& common, std::optional<double> n, const std::vector<double>& lambdas_m);
int cmd_secular(const Common& common, const std::vector<double>& lambda_bars);
int cmd_mathieu(double nu, double q, double q_cap);
int cmd_sweep(const Common& common, const std::string& key, const std::vector<double>& values,
              const std::vector<std::string>& methods);

}  // namespace bouncelab::cli
