#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "bouncelab/errors.hpp"
#include "bouncelab/perturbation.hpp"
#include "bouncelab/pipeline.hpp"
#include "bouncelab/secular.hpp"
#include "bouncelab/spectrum.hpp"

namespace fs = std::filesystem;

namespace bouncelab::cli {

namespace {

std::ofstream open_file(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

// Writes to `path`, or stdout when it is empty.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  auto out = open_file(path);
  write(out);
}

void write_manifest(const fs::path& path, RunManifest manifest, std::vector<std::string> outputs) {
  manifest.outputs = std::move(outputs);
  auto out = open_file(path);
  write_manifest_json(out, manifest);
}

std::string join_command(const std::string& name, const std::vector<double>& values) {
  std::ostringstream os;
  os << name << std::setprecision(17);
  for (double v : values) os << ' ' << v;
  return os.str();
}

std::vector<RunConfig> lambda_bar_points(const RunConfig& base, const std::vector<double>& bars) {
  std::vector<RunConfig> points;
  for (double lb : bars) {
    RunConfig c = base;
    c.params.lambda = lb * c.params.gravity / (c.params.omega * c.params.omega);
    points.push_back(c);
  }
  return points;
}

}  // namespace

RunConfig resolve_config(const Common& common) {
  RunConfig c = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
  for (const auto& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + kv + "' is not key=value", kv, 0);
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

int cmd_propagate(const Common& common, std::optional<double> lambda_m,
                  std::optional<double> lambda_bar, std::optional<double> total_time) {
  RunConfig c = resolve_config(common);
  if (lambda_m) c.params.lambda = *lambda_m;
  if (lambda_bar) c.params.lambda = *lambda_bar * c.params.gravity / (c.params.omega * c.params.omega);
  if (total_time) c.total_time = *total_time;
  c.validate();

  const std::string prefix = common.out.empty() ? "revival" : common.out;
  const auto manifest = make_manifest("propagate", c);
  const auto run = run_propagation(c);
  {
    auto out = open_file(prefix + "_trace.csv");
    write_trace_csv(out, run.trace);
  }
  std::vector<std::string> outputs{prefix + "_trace.csv"};
  std::cout << std::setprecision(8) << "n0 = " << run.n0 << ", T0 = " << run.t0
            << " s, max |norm - 1| = " << run.max_norm_error << '\n';
  if (!run.estimate) {
    write_manifest(prefix + "_manifest.json", manifest, outputs);
    std::cerr << "no revival: " << run.failure << '\n';
    return exit_no_revival;
  }
  {
    auto out = open_file(prefix + "_revival.json");
    out << to_json(*run.estimate) << '\n';
  }
  outputs.push_back(prefix + "_revival.json");
  write_manifest(prefix + "_manifest.json", manifest, outputs);
  std::cout << "T = " << run.estimate->time << " +- " << run.estimate->uncertainty
            << " s, peak |C| = " << run.estimate->peak_height << '\n';
  for (const auto& f : run.fractional)
    std::cout << "  " << f.p << '/' << f.q << " revival at " << f.time << " s, envelope "
              << f.height << '\n';
  return exit_ok;
}

int cmd_figure1(const Common& common, const std::vector<double>& lambdas_um) {
  const RunConfig base = resolve_config(common);
  const fs::path dir = common.out.empty() ? fs::path("figure1") : fs::path(common.out);
  fs::create_directories(dir);

  struct Result {
    std::optional<PropagationOutcome> run;
    std::string error;
  };
  std::vector<Result> results(lambdas_um.size());
  parallel_for(lambdas_um.size(), common.workers > 0 ? common.workers : worker_count(),
               [&](std::size_t i) {
                 RunConfig c = base;
                 c.params.lambda = lambdas_um[i] * 1e-6;
                 try {
                   results[i].run = run_propagation(c);
                 } catch (const Error& e) {
                   results[i].error = e.what();
                 }
               });

  std::vector<std::string> outputs;
  std::ofstream summary = open_file(dir / "figure1_summary.csv");
  summary << "lambda_m,lambda_bar,T_s,uncertainty_s,peak_height,status\n" << std::setprecision(12);
  for (std::size_t i = 0; i < lambdas_um.size(); ++i) {
    const double lambda = lambdas_um[i] * 1e-6;
    PhysicalParams p = base.params;
    p.lambda = lambda;
    summary << lambda << ',' << bouncelab::lambda_bar(p) << ',';
    const auto& r = results[i];
    if (!r.run) {
      summary << "nan,nan,nan,error\n";
      std::cerr << "lambda = " << lambdas_um[i] << " um: " << r.error << '\n';
      continue;
    }
    std::ostringstream name;
    name << "trace_" << i << ".csv";
    auto out = open_file(dir / name.str());
    write_trace_csv(out, r.run->trace);
    outputs.push_back((dir / name.str()).string());
    if (r.run->estimate)
      summary << r.run->estimate->time << ',' << r.run->estimate->uncertainty << ','
              << r.run->estimate->peak_height << ",ok\n";
    else
      summary << "nan,nan,nan,no_revival\n";
  }
  outputs.push_back((dir / "figure1_summary.csv").string());
  write_manifest(dir / "manifest.json", make_manifest(join_command("figure1", lambdas_um), base),
                 outputs);
  return exit_ok;
}

int cmd_figure2(const Common& common, double z0_um, const std::vector<double>& lambda_bars,
                bool numeric) {
  RunConfig base = resolve_config(common);
  base.packet.z0 = z0_um * 1e-6;
  base.validate();
  const fs::path dir = common.out.empty() ? fs::path("figure2") : fs::path(common.out);
  fs::create_directories(dir);
  ComparisonOptions options;
  options.numeric = numeric;
  options.workers = common.workers;
  const auto rows = run_comparison(lambda_bar_points(base, lambda_bars), "lambda_bar",
                                   lambda_bars, options);
  std::ostringstream name;
  name << "figure2_z0_" << z0_um << "um.csv";
  {
    auto out = open_file(dir / name.str());
    write_comparison_csv(out, rows);
  }
  write_manifest(dir / ("manifest_z0_" + std::to_string(z0_um) + ".json"),
                 make_manifest(join_command("figure2", lambda_bars), base),
                 {(dir / name.str()).string()});
  return exit_ok;
}

int cmd_spectrum(const Common& common, int n_first, int n_last, bool gravitational) {
  const PhysicalParams p = gravitational ? PhysicalParams::gravitational() : resolve_config(common).params;
  const auto table = build_spectrum_table(n_first, n_last, p);
  emit(common.out, [&](std::ostream& out) { write_spectrum_csv(out, table); });
  return exit_ok;
}

int cmd_stark(const Common& common, std::optional<double> n, const std::vector<double>& lambdas_m) {
  const RunConfig c = resolve_config(common);
  const double level = n ? *n : n0_from_z0(c.packet, c.params);
  StarkOptions options;
  options.guard = c.stark_guard;
  emit(common.out, [&](std::ostream& out) {
    out << "lambda_m,lambda_bar,n,dE_direct_J,dE_semiclassical_J,Omega_n,T_pert_s,"
           "T_pert_closed_s,T0_s,flags\n"
        << std::setprecision(12);
    for (double lambda : lambdas_m) {
      PhysicalParams p = c.params;
      p.lambda = lambda;
      out << lambda << ',' << lambda_bar(p) << ',' << level << ',';
      try {
        const auto d = stark_shift_direct(level, p, options);
        const auto s = stark_shift_semiclassical(level, p, options);
        const auto t = revival_time_perturbative(level, p, options);
        out << d.shift << ',' << s.shift << ',' << s.omega_n << ',' << t.estimate.time << ','
            << t.closed_form << ',' << t.t0 << ",\n";
      } catch (const NearResonance& e) {
        out << "nan,nan," << omega_ratio(level, p) << ",nan,nan,nan,near_resonance_m"
            << e.order() << '\n';
      }
    }
  });
  return exit_ok;
}

int cmd_secular(const Common& common, const std::vector<double>& lambda_bars) {
  const RunConfig base = resolve_config(common);
  const double n0 = n0_from_z0(base.packet, base.params);
  SecularOptions options;
  options.order = base.resonance_order;
  options.r = base.secular_r;
  options.q_cap = base.q_cap;
  emit(common.out, [&](std::ostream& out) {
    out << "lambda_bar,T_secular_numeric_s,T_secular_closed_s,T_secular_closed_a0_s,q,nu0,r,a,N,"
           "flags\n"
        << std::setprecision(12);
    for (const auto& c : lambda_bar_points(base, lambda_bars)) {
      const auto setup = make_mathieu_setup(n0, c.params, options);
      out << lambda_bar(c.params) << ',';
      try {
        const auto s = revival_time_secular(n0, c.params, options);
        out << s.estimate.time << ',' << s.closed_form << ',' << s.closed_form_large_energy;
      } catch (const NearIntegerOrder&) {
        out << "nan,nan,nan";
      }
      out << ',' << setup.q << ',' << setup.nu0 << ',' << setup.r << ',' << setup.a << ','
          << setup.order << ",\n";
    }
  });
  return exit_ok;
}

int cmd_mathieu(double nu, double q, double q_cap) {
  std::cout << std::setprecision(15) << mathieu_char_a(nu, q, q_cap) << '\n';
  return exit_ok;
}

int cmd_sweep(const Common& common, const std::string& key, const std::vector<double>& values,
              const std::vector<std::string>& methods) {
  const RunConfig base = resolve_config(common);
  std::vector<RunConfig> points;
  for (double v : values) {
    RunConfig c = base;
    std::ostringstream text;
    text << std::setprecision(17) << v;
    set_config_value(c, key, text.str());
    c.validate();
    points.push_back(c);
  }
  ComparisonOptions options;
  options.numeric = options.perturbative = options.secular = false;
  for (const auto& m : methods) {
    if (m == "numeric") options.numeric = true;
    else if (m == "perturbative") options.perturbative = true;
    else if (m == "secular") options.secular = true;
    else throw ConfigError("unknown method '" + m + "'", "methods", 0);
  }
  options.workers = common.workers;
  const auto rows = run_comparison(points, key, values, options);
  emit(common.out, [&](std::ostream& out) { write_comparison_csv(out, rows); });
  return exit_ok;
}

}  // namespace bouncelab::cli
