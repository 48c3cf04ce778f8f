#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "bouncelab/propagator.hpp"

namespace bouncelab {

struct TraceMetadata {
  double lambda = 0.0;  // m
  double omega = 0.0;   // rad/s
  double z0 = 0.0;      // m
  double n0 = 0.0;
};

/// Uniformly sampled autocorrelation C(t) = <psi(0)|psi(t)>, times in seconds.
/// `mean_z` (m) and `norm` are optional companions with the same length.
struct CorrelationTrace {
  std::vector<double> times;
  std::vector<std::complex<double>> values;
  std::vector<double> mean_z;
  std::vector<double> norm;
  TraceMetadata meta;

  std::size_t size() const { return times.size(); }
  double sample_interval() const;
  /// Checks sizes, uniform sampling, C(0) = 1 and |C| <= 1 + 1e-8.
  void validate() const;
};

/// Builds an SI trace from propagator samples (gravitational units).
CorrelationTrace make_trace(const std::vector<TraceSample>& samples, const UnitSystem& units,
                            const TraceMetadata& meta = {});

enum class RevivalMethod { numeric, perturbative, secular };
const char* to_string(RevivalMethod method);
RevivalMethod revival_method_from_string(const std::string& name);

struct RevivalEstimate {
  double time = 0.0;         // s
  RevivalMethod method = RevivalMethod::numeric;
  double uncertainty = 0.0;  // s
  double peak_height = 0.0;  // |C| near the revival (0 for analytic estimates)

  double relative_uncertainty() const { return uncertainty / time; }
};

/// <reference|current>. Throws GridMismatch for different grids.
std::complex<double> autocorrelation(const WavepacketState& reference,
                                     const WavepacketState& current);

struct ExtractionSettings {
  double smoothing_period = 0.0;  // s; one classical bounce period
  double prominence = 1.5;        // peak must exceed this multiple of the window median
};

/// Envelope of |C|: running maximum over one `period`, then a boxcar average over
/// another, both centred on every sample and truncated at the trace ends.
std::vector<double> smoothed_envelope(const CorrelationTrace& trace, double period);

/// Locates the full revival inside [t_lo, t_hi]: smoothed-envelope maximum refined by a
/// parabola, uncertainty = half width at 95% of the smoothed peak (at least one sample).
/// Throws NoRevivalFound when no local maximum clears the prominence rule.
RevivalEstimate extract_revival_time(const CorrelationTrace& trace, double t_lo, double t_hi,
                                     const ExtractionSettings& settings);

struct FractionalRevival {
  int p;
  int q;
  double time;    // s
  double height;  // smoothed envelope at the peak
};

/// Peaks near (p/q) T for coprime p < q <= max_order; the full revival is reported as 1/1.
std::vector<FractionalRevival> fractional_revival_times(const CorrelationTrace& trace,
                                                        const RevivalEstimate& full,
                                                        int max_order,
                                                        const ExtractionSettings& settings);

/// Columns t_s, reC, imC, absC, mean_z_m, norm.
void write_trace_csv(std::ostream& out, const CorrelationTrace& trace);
CorrelationTrace read_trace_csv(std::istream& in);

/// {"T_s", "method", "uncertainty_s", "peak_height"} as a JSON object.
std::string to_json(const RevivalEstimate& estimate);
RevivalEstimate revival_estimate_from_json(const std::string& text);

}  // namespace bouncelab
