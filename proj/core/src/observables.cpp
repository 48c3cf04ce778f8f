#include "bouncelab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bouncelab/errors.hpp"

namespace bouncelab {

double CorrelationTrace::sample_interval() const {
  if (times.size() < 2) throw InvalidParameter("trace needs at least two samples");
  return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

void CorrelationTrace::validate() const {
  if (values.size() != times.size()) throw InvalidParameter("trace times/values size mismatch");
  if (!mean_z.empty() && mean_z.size() != times.size())
    throw InvalidParameter("trace mean_z size mismatch");
  if (!norm.empty() && norm.size() != times.size())
    throw InvalidParameter("trace norm size mismatch");
  if (times.size() < 2) throw InvalidParameter("trace needs at least two samples");
  const double dt = sample_interval();
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt)
      throw InvalidParameter("trace is not uniformly sampled");
  }
  if (std::abs(values.front() - std::complex<double>(1.0, 0.0)) > 1e-8)
    throw InvalidParameter("trace must start with C(0) = 1");
  for (const auto& c : values)
    if (std::abs(c) > 1.0 + 1e-8) throw InvalidParameter("|C(t)| exceeds 1");
}

CorrelationTrace make_trace(const std::vector<TraceSample>& samples, const UnitSystem& units,
                            const TraceMetadata& meta) {
  CorrelationTrace t;
  t.meta = meta;
  t.times.reserve(samples.size());
  t.values.reserve(samples.size());
  t.mean_z.reserve(samples.size());
  t.norm.reserve(samples.size());
  for (const auto& s : samples) {
    t.times.push_back(s.time * units.time);
    t.values.push_back(s.correlation);
    t.mean_z.push_back(s.mean_z * units.length);
    t.norm.push_back(s.norm);
  }
  return t;
}

const char* to_string(RevivalMethod method) {
  switch (method) {
    case RevivalMethod::numeric:
      return "numeric";
    case RevivalMethod::perturbative:
      return "perturbative";
    case RevivalMethod::secular:
      return "secular";
  }
  return "unknown";
}

RevivalMethod revival_method_from_string(const std::string& name) {
  if (name == "numeric") return RevivalMethod::numeric;
  if (name == "perturbative") return RevivalMethod::perturbative;
  if (name == "secular") return RevivalMethod::secular;
  throw InvalidParameter("unknown revival method '" + name + "'");
}

std::complex<double> autocorrelation(const WavepacketState& reference,
                                     const WavepacketState& current) {
  return inner_product(reference, current);
}

namespace {

// Continuous boxcar of width `period` over uniformly sampled y; the window is a
// difference of two interpolated cumulative integrals and shrinks at the ends.
std::vector<double> boxcar(const std::vector<double>& t, const std::vector<double>& y,
                           double period) {
  const std::size_t n = y.size();
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cumulative[i] = cumulative[i - 1] + 0.5 * dt * (y[i - 1] + y[i]);
  auto integral_at = [&](double x_time) {
    const double x = (x_time - t.front()) / dt;
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, double(n - 2)));
    const double f = x - static_cast<double>(i);
    return cumulative[i] + dt * (y[i] * f + 0.5 * (y[i + 1] - y[i]) * f * f);
  };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(t.front(), t[i] - 0.5 * period);
    const double hi = std::min(t.back(), t[i] + 0.5 * period);
    out[i] = (integral_at(hi) - integral_at(lo)) / (hi - lo);
  }
  return out;
}

}  // namespace

std::vector<double> smoothed_envelope(const CorrelationTrace& trace, double period) {
  if (!(period > 0.0)) throw InvalidParameter("smoothing period must be positive");
  const std::size_t n = trace.size();
  const double dt = trace.sample_interval();
  // A plain average of |C| over a bounce is nearly constant in time: the
  // revived packet overlaps the reference only briefly per bounce. The
  // per-bounce maximum carries the revival structure, so average that.
  const auto half = static_cast<std::size_t>(std::floor(0.5 * period / dt + 1e-9));
  std::vector<double> peak(n);
  std::deque<std::size_t> window;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(n - 1, i + half);
    for (; next <= hi; ++next) {
      while (!window.empty() && std::abs(trace.values[window.back()]) <= std::abs(trace.values[next]))
        window.pop_back();
      window.push_back(next);
    }
    while (window.front() + half < i) window.pop_front();
    peak[i] = std::abs(trace.values[window.front()]);
  }
  return boxcar(trace.times, peak, period);
}

namespace {

struct WindowPeak {
  double time;
  double height;
  double left;   // 95% crossings
  double right;
  std::size_t index;
};

double median_abs(const CorrelationTrace& trace, std::size_t lo, std::size_t hi) {
  std::vector<double> v;
  v.reserve(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) v.push_back(std::abs(trace.values[i]));
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Returns false when no local maximum in [t_lo, t_hi] clears the prominence rule.
bool find_peak(const CorrelationTrace& trace, const std::vector<double>& smooth, double t_lo,
               double t_hi, double prominence, WindowPeak& peak) {
  const double dt = trace.sample_interval();
  const double t0 = trace.times.front();
  const std::size_t n = trace.size();
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((t_lo - t0) / dt - 1e-9)));
  const auto hi = static_cast<std::size_t>(
      std::min(double(n - 1), std::floor((t_hi - t0) / dt + 1e-9)));
  if (hi <= lo + 2) return false;

  std::size_t best = n;
  for (std::size_t i = std::max<std::size_t>(lo, 1); i <= std::min(hi, n - 2); ++i) {
    if (smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1] &&
        (best == n || smooth[i] > smooth[best]))
      best = i;
  }
  if (best == n) return false;
  if (!(smooth[best] > prominence * median_abs(trace, lo, hi))) return false;

  // Parabola through the maximum and its neighbours.
  const double ym = smooth[best - 1], y0 = smooth[best], yp = smooth[best + 1];
  const double denom = ym - 2.0 * y0 + yp;
  double shift = denom < 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  shift = std::clamp(shift, -0.5, 0.5);
  peak.index = best;
  peak.time = trace.times[best] + shift * dt;
  peak.height = y0 - 0.25 * (ym - yp) * shift;

  const double level = 0.95 * peak.height;
  std::size_t l = best;
  while (l > 0 && smooth[l] >= level) --l;
  if (smooth[l] < level)
    peak.left = trace.times[l] + dt * (level - smooth[l]) / (smooth[l + 1] - smooth[l]);
  else
    peak.left = trace.times[l];
  std::size_t r = best;
  while (r + 1 < n && smooth[r] >= level) ++r;
  if (smooth[r] < level)
    peak.right = trace.times[r] - dt * (level - smooth[r]) / (smooth[r - 1] - smooth[r]);
  else
    peak.right = trace.times[r];
  return true;
}

}  // namespace

RevivalEstimate extract_revival_time(const CorrelationTrace& trace, double t_lo, double t_hi,
                                     const ExtractionSettings& settings) {
  if (trace.size() < 3) throw InvalidParameter("trace too short for revival extraction");
  if (!(t_lo < t_hi) || t_lo < trace.times.front() || t_hi > trace.times.back() * (1 + 1e-12)) {
    std::ostringstream os;
    os << "search window [" << t_lo << ", " << t_hi << "] s is not inside the trace ["
       << trace.times.front() << ", " << trace.times.back() << "] s";
    throw InvalidParameter(os.str());
  }
  const std::vector<double> smooth = smoothed_envelope(trace, settings.smoothing_period);
  WindowPeak peak{};
  if (!find_peak(trace, smooth, t_lo, t_hi, settings.prominence, peak)) {
    std::ostringstream os;
    os << "no revival peak above " << settings.prominence << "x the median |C| in [" << t_lo
       << ", " << t_hi << "] s";
    throw NoRevivalFound(os.str());
  }
  RevivalEstimate est;
  est.method = RevivalMethod::numeric;
  est.time = peak.time;
  est.uncertainty = std::max(0.5 * (peak.right - peak.left), trace.sample_interval());
  double raw = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (std::abs(trace.times[i] - peak.time) <= 0.5 * settings.smoothing_period)
      raw = std::max(raw, std::abs(trace.values[i]));
  }
  est.peak_height = raw;
  return est;
}

std::vector<FractionalRevival> fractional_revival_times(const CorrelationTrace& trace,
                                                        const RevivalEstimate& full,
                                                        int max_order,
                                                        const ExtractionSettings& settings) {
  std::vector<FractionalRevival> out;
  if (max_order < 1) return out;
  const std::vector<double> smooth = smoothed_envelope(trace, settings.smoothing_period);
  for (int q = 1; q <= max_order; ++q) {
    for (int p = 1; p <= std::max(1, q - 1); ++p) {
      if (std::gcd(p, q) != 1) continue;
      const double centre = full.time * p / q;
      const double half = full.time / (2.0 * q * (q + 1));
      const double lo = std::max(trace.times.front(), centre - half);
      const double hi = std::min(trace.times.back(), centre + half);
      if (q == 1) {
        out.push_back({1, 1, full.time, 0.0});
        WindowPeak peak{};
        if (find_peak(trace, smooth, lo, hi, settings.prominence, peak))
          out.back().height = peak.height;
        continue;
      }
      WindowPeak peak{};
      if (find_peak(trace, smooth, lo, hi, settings.prominence, peak))
        out.push_back({p, q, peak.time, peak.height});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FractionalRevival& a, const FractionalRevival& b) { return a.time < b.time; });
  return out;
}

void write_trace_csv(std::ostream& out, const CorrelationTrace& trace) {
  out << "t_s,reC,imC,absC,mean_z_m,norm\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto c = trace.values[i];
    out << trace.times[i] << ',' << c.real() << ',' << c.imag() << ',' << std::abs(c) << ','
        << (trace.mean_z.empty() ? 0.0 : trace.mean_z[i]) << ','
        << (trace.norm.empty() ? 1.0 : trace.norm[i]) << '\n';
  }
}

CorrelationTrace read_trace_csv(std::istream& in) {
  CorrelationTrace trace;
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_s,reC,imC", 0) != 0)
    throw InvalidParameter("trace CSV must start with the header t_s,reC,imC,absC,mean_z_m,norm");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    double cols[6];
    char comma = 0;
    for (int c = 0; c < 6; ++c) {
      if (!(row >> cols[c]) || (c < 5 && !(row >> comma))) {
        std::ostringstream os;
        os << "malformed trace CSV row at line " << line_no;
        throw InvalidParameter(os.str());
      }
    }
    trace.times.push_back(cols[0]);
    trace.values.emplace_back(cols[1], cols[2]);
    trace.mean_z.push_back(cols[4]);
    trace.norm.push_back(cols[5]);
  }
  return trace;
}

std::string to_json(const RevivalEstimate& estimate) {
  nlohmann::ordered_json j;
  j["T_s"] = estimate.time;
  j["method"] = to_string(estimate.method);
  j["uncertainty_s"] = estimate.uncertainty;
  j["peak_height"] = estimate.peak_height;
  return j.dump(2);
}

RevivalEstimate revival_estimate_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RevivalEstimate e;
  e.time = j.at("T_s").get<double>();
  e.method = revival_method_from_string(j.at("method").get<std::string>());
  e.uncertainty = j.at("uncertainty_s").get<double>();
  e.peak_height = j.at("peak_height").get<double>();
  return e;
}

}  // namespace bouncelab
