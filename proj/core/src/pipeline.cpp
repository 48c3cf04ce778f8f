#include "bouncelab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "bouncelab/errors.hpp"
#include "bouncelab/propagator.hpp"
#include "bouncelab/spectrum.hpp"

namespace bouncelab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void add_flag(std::string& flags, const std::string& flag) {
  if (!flags.empty()) flags += ';';
  flags += flag;
}

// CSV-safe one-line message
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == ';') c = ' ';
  return s;
}

}  // namespace

double unperturbed_revival_time(const RunConfig& config) {
  const double n0 = n0_from_z0(config.packet, config.params);
  return 4.0 * std::numbers::pi * config.params.hbar /
         std::abs(energy_semiclassical_curvature(n0, config.params));
}

PropagationOutcome run_propagation(const RunConfig& config) {
  config.validate();
  PropagationOutcome out;
  const auto& p = config.params;
  out.n0 = n0_from_z0(config.packet, p);
  out.t0 = unperturbed_revival_time(config);
  out.bounce_period = bounce_period(mean_energy(config.packet, p), p);

  const UnitSystem units = make_unit_system(p);
  Hamiltonian h = Hamiltonian::from(p, config.wall);
  if (config.wall_rounding) h.wall_rounding = *config.wall_rounding / units.length;
  const Grid grid = Grid::from_si(config.grid_points, 0.0, config.z_max, units);
  const double total = config.total_time ? *config.total_time : config.total_time_factor * out.t0;
  PropagationPlan plan =
      PropagationPlan::for_drive(h, total / units.time, config.steps_per_period, config.sample_stride);
  plan.frame = config.frame;
  plan.track_momentum = false;

  WavepacketState state = init_gaussian(config.packet, grid, units, Frame::moving);
  if (config.frame == Frame::lab) state = moving_to_lab(state, h);
  SplitStepPropagator propagator(h, grid, plan);
  std::vector<TraceSample> samples;
  samples.reserve(plan.steps() / plan.stride + 2);
  propagator.propagate(state, [&](const TraceSample& s) { samples.push_back(s); });

  TraceMetadata meta;
  meta.lambda = p.lambda;
  meta.omega = p.omega;
  meta.z0 = config.packet.z0;
  meta.n0 = out.n0;
  out.trace = make_trace(samples, units, meta);
  for (double n : out.trace.norm) out.max_norm_error = std::max(out.max_norm_error, std::abs(n - 1.0));

  ExtractionSettings settings;
  settings.smoothing_period = out.bounce_period;
  settings.prominence = config.prominence;
  const double lo = std::max(out.trace.times.front(), config.window_lo * out.t0);
  const double hi = std::min(out.trace.times.back(), config.window_hi * out.t0);
  try {
    out.estimate = extract_revival_time(out.trace, lo, hi, settings);
    out.fractional =
        fractional_revival_times(out.trace, *out.estimate, config.fractional_order, settings);
  } catch (const NoRevivalFound& e) {
    out.failure = e.what();
  }
  return out;
}

std::vector<ComparisonRow> run_comparison(const std::vector<RunConfig>& points,
                                          const std::string& key,
                                          const std::vector<double>& values,
                                          const ComparisonOptions& options) {
  if (points.size() != values.size()) throw InvalidParameter("sweep points/values size mismatch");
  std::vector<ComparisonRow> rows(points.size());
  auto evaluate = [&](std::size_t i) {
    const RunConfig& c = points[i];
    ComparisonRow& row = rows[i];
    row.key = key;
    row.value = values[i];
    row.lambda_m = c.params.lambda;
    row.lambda_bar = lambda_bar(c.params);
    row.t0 = unperturbed_revival_time(c);
    row.numeric = row.numeric_unc = row.peak_height = row.norm_drift = nan;
    row.perturbative = row.perturbative_unc = row.perturbative_closed = nan;
    row.secular = row.secular_unc = row.secular_closed = row.secular_closed_a0 = nan;
    row.q = row.nu0 = row.r = row.a = nan;
    const double n0 = n0_from_z0(c.packet, c.params);

    if (options.perturbative) {
      StarkOptions so;
      so.guard = c.stark_guard;
      try {
        const auto pr = revival_time_perturbative(n0, c.params, so);
        row.perturbative = pr.estimate.time;
        row.perturbative_unc = pr.estimate.uncertainty;
        row.perturbative_closed = pr.closed_form;
      } catch (const NearResonance& e) {
        add_flag(row.flags, "perturbative_near_resonance_m" + std::to_string(e.order()));
      } catch (const Error& e) {
        add_flag(row.flags, "perturbative_error " + sanitize(e.what()));
      }
    }
    if (options.secular) {
      SecularOptions so;
      so.order = c.resonance_order;
      so.r = c.secular_r;
      so.q_cap = c.q_cap;
      try {
        const auto setup = make_mathieu_setup(n0, c.params, so);
        row.q = setup.q;
        row.nu0 = setup.nu0;
        row.r = setup.r;
        row.a = setup.a;
        row.order = setup.order;
        const auto sr = revival_time_secular(n0, c.params, so);
        row.secular = sr.estimate.time;
        row.secular_unc = sr.estimate.uncertainty;
        row.secular_closed = sr.closed_form;
        row.secular_closed_a0 = sr.closed_form_large_energy;
      } catch (const NearIntegerOrder&) {
        add_flag(row.flags, "secular_band_edge");
      } catch (const Error& e) {
        add_flag(row.flags, "secular_error " + sanitize(e.what()));
      }
    }
    if (options.numeric) {
      try {
        const auto run = run_propagation(c);
        row.norm_drift = run.max_norm_error;
        if (run.estimate) {
          row.numeric = run.estimate->time;
          row.numeric_unc = run.estimate->uncertainty;
          row.peak_height = run.estimate->peak_height;
        } else {
          add_flag(row.flags, "no_revival");
        }
      } catch (const InstabilityError& e) {
        add_flag(row.flags, "instability " + sanitize(e.what()));
      } catch (const Error& e) {
        add_flag(row.flags, "numeric_error " + sanitize(e.what()));
      }
    }
  };
  parallel_for(points.size(), options.workers > 0 ? options.workers : worker_count(), evaluate);
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "param,value,lambda_m,lambda_bar,T0_s,T_numeric_s,T_numeric_unc_s,peak_height,norm_drift,"
         "T_pert_s,T_pert_unc_s,T_pert_closed_s,T_secular_numeric_s,T_secular_unc_s,"
         "T_secular_closed_s,T_secular_closed_a0_s,q,nu0,r,a,N,flags\n";
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.key << ',' << r.value << ',' << r.lambda_m << ',' << r.lambda_bar << ',' << r.t0
        << ',' << r.numeric << ',' << r.numeric_unc << ',' << r.peak_height << ',' << r.norm_drift << ','
        << r.perturbative << ',' << r.perturbative_unc << ',' << r.perturbative_closed << ','
        << r.secular << ',' << r.secular_unc << ',' << r.secular_closed << ','
        << r.secular_closed_a0 << ',' << r.q << ',' << r.nu0 << ',' << r.r << ',' << r.a << ','
        << r.order << ',' << r.flags << '\n';
  }
}

int worker_count() {
  if (const char* env = std::getenv("BOUNCELAB_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  const std::size_t n_threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunManifest make_manifest(const std::string& command, const RunConfig& config) {
  RunManifest m;
  m.command = command;
  m.config_text = to_text(config);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0')
     << fnv1a(m.tool_version + '\n' + m.command + '\n' + m.config_text);
  m.input_hash = os.str();
  return m;
}

void write_manifest_json(std::ostream& out, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["input_hash"] = m.input_hash;
  j["outputs"] = m.outputs;
  j["config"] = m.config_text;
  out << j.dump(2) << '\n';
}

}  // namespace bouncelab
