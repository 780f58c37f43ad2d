#include "interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "constants.hpp"

namespace rres {

namespace {

void validate_grid(const std::vector<double>& v) {
  if (v.size() < 2)
    fail(ErrorCode::InvalidArgument, "bias grid needs at least two points");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      fail(ErrorCode::InvalidArgument, "bias grid must be strictly increasing");
}

// Unwrapped phase sequence over the grid: principal values chained mod pi.
std::vector<double> unwrapped_phases(const DiscretizedPotential& pot,
                                     const std::vector<double>& energies) {
  std::vector<double> out;
  out.reserve(energies.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    double p = reflection(pot, energies[i]).phi;
    if (i > 0) p += kPi * std::round((prev - p) / kPi);
    out.push_back(p);
    prev = p;
  }
  return out;
}

double derivative_3pt(const std::vector<double>& x, const std::vector<double>& y,
                      std::size_t i) {
  const std::size_t n = x.size();
  if (i == 0) return (y[1] - y[0]) / (x[1] - x[0]);
  if (i + 1 == n) return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
  return -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] +
         h1 / (h2 * (h1 + h2)) * y[i + 1];
}

// Parabola through three points, value at its vertex.
double parabola_vertex_value(double x0, double x1, double x2, double y0,
                             double y1, double y2) {
  double d1 = (y1 - y0) / (x1 - x0);
  double d2 = (y2 - y1) / (x2 - x1);
  double curv = (d2 - d1) / (x2 - x0);
  if (curv == 0.0) return y1;
  double xv = 0.5 * ((x0 + x1) - d1 / curv);
  return y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1);
}

}  // namespace

IntensityCurve simulate_intensity(const PotentialSpec& spec,
                                  const InterferometerConfig& cfg) {
  spec.validate();
  const std::vector<double>& v_grid = cfg.v_grid;
  if (!(cfg.a1 > 0.0 && cfg.a2 > 0.0))
    fail(ErrorCode::InvalidArgument, "arm amplitudes must be positive");
  if (!(cfg.delta_v > 0.0))
    fail(ErrorCode::InvalidArgument, "delta_v must be positive");
  validate_grid(v_grid);

  const double v_l = spec.v_left_effective();
  const double v_r = spec.v_right_effective();
  std::vector<double> e1(v_grid.size()), e2(v_grid.size());
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    e1[i] = cfg.e_incident + v_grid[i];
    e2[i] = e1[i] + cfg.delta_v;
    if (!(e1[i] > v_l && e2[i] < v_r))
      fail(ErrorCode::InvalidArgument,
           "biased reflection leaves the reflecting band");
  }

  auto pot = discretize(spec, static_cast<std::size_t>(cfg.n_slices));
  std::vector<double> phi1 = unwrapped_phases(pot, e1);
  std::vector<double> phi2 = unwrapped_phases(pot, e2);

  IntensityCurve out;
  out.v = v_grid;
  out.i.resize(v_grid.size());
  const double base = cfg.a1 * cfg.a1 + cfg.a2 * cfg.a2;
  const double contrast = 2.0 * cfg.a1 * cfg.a2;
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    double arg = (cfg.alpha1 - cfg.alpha2) + 2.0 * (phi1[i] - phi2[i]);
    out.i[i] = base + contrast * std::cos(arg);
  }
  if (cfg.noise_sigma > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (auto& y : out.i) y += noise(rng);
  }
  out.i_max_observed = *std::max_element(out.i.begin(), out.i.end());
  out.i_min_observed = *std::min_element(out.i.begin(), out.i.end());
  return out;
}

ProcessedCurve process_intensity(const IntensityCurve& curve,
                                 const ProcessOptions& opts) {
  const auto& v = curve.v;
  const auto& intens = curve.i;
  if (v.size() < 5)
    fail(ErrorCode::InvalidArgument, "need at least 5 intensity samples");
  validate_grid(v);

  double i_max_raw = *std::max_element(intens.begin(), intens.end());
  double i_min_raw = *std::min_element(intens.begin(), intens.end());
  double range_raw = i_max_raw - i_min_raw;
  double scale = std::max({std::abs(i_max_raw), std::abs(i_min_raw), 1e-300});
  if (range_raw <= 1e-12 * scale)
    fail(ErrorCode::DegenerateIntensity, "intensity curve is flat");

  // Envelope refinement: the sampled extremes undershoot the true envelope,
  // which the normalized derivative is very sensitive to near the touches.
  // A parabolic vertex through each near-extreme local extremum fixes that.
  const std::size_t n = v.size();
  double i_max = i_max_raw, i_min = i_min_raw;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    bool loc_max = intens[i] >= intens[i - 1] && intens[i] >= intens[i + 1];
    bool loc_min = intens[i] <= intens[i - 1] && intens[i] <= intens[i + 1];
    if (loc_max && intens[i] > i_max_raw - 0.05 * range_raw)
      i_max = std::max(i_max, parabola_vertex_value(v[i - 1], v[i], v[i + 1],
                                                    intens[i - 1], intens[i],
                                                    intens[i + 1]));
    if (loc_min && intens[i] < i_min_raw + 0.05 * range_raw)
      i_min = std::min(i_min, parabola_vertex_value(v[i - 1], v[i], v[i + 1],
                                                    intens[i - 1], intens[i],
                                                    intens[i + 1]));
  }
  const double range = i_max - i_min;

  std::vector<double> d1(n), d2(n), prod(n);
  for (std::size_t i = 0; i < n; ++i) d1[i] = derivative_3pt(v, intens, i);
  for (std::size_t i = 0; i < n; ++i) d2[i] = derivative_3pt(v, d1, i);
  for (std::size_t i = 0; i < n; ++i)
    prod[i] = (i_max - intens[i]) * (intens[i] - i_min);

  // Sign flips happen exactly where sin of the interference argument crosses
  // zero: dI/dV changes sign with the envelope product locally small.
  const double touch_cut = opts.touch_fraction * range * range;
  std::vector<bool> flip_after(n, false);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((d1[i] > 0) != (d1[i + 1] > 0) &&
        std::min(prod[i], prod[i + 1]) < touch_cut)
      flip_after[i] = true;
  }

  const double crit_cut = opts.critical_fraction * range * range;
  ProcessedCurve out;
  out.i_max_refined = i_max;
  out.i_min_refined = i_min;
  out.samples.resize(n);
  double s = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i].v = v[i];
    if (prod[i] < crit_cut) {
      // second-order expansion at the touch: |value| = sqrt(|I''|/(range/2))
      double mag = std::sqrt(std::abs(d2[i])) / std::sqrt(0.5 * range);
      double sgn = d1[i] == 0.0 ? 1.0 : (d1[i] > 0 ? 1.0 : -1.0);
      out.samples[i].value = s * sgn * mag;
      out.samples[i].regime = Regime::CriticalPoint;
    } else {
      out.samples[i].value = s * d1[i] / std::sqrt(prod[i]);
      out.samples[i].regime = Regime::Regular;
    }
    if (flip_after[i]) s = -s;
  }

  // Global sign is not observable from intensity alone; pin it by making the
  // highest-bias (arm-1) feature positive, matching the sign of
  // 2(dphi(V)/dV - dphi(V+dV)/dV) around the resonance.
  double best = 0.0;
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(out.samples[i].value) > best) {
      best = std::abs(out.samples[i].value);
      anchor = i;
    }
  for (std::size_t i = n - 2; i >= 1; --i) {
    double c = std::abs(out.samples[i].value);
    if (c >= std::abs(out.samples[i - 1].value) &&
        c >= std::abs(out.samples[i + 1].value) && c > 0.5 * best) {
      anchor = i;  // rightmost feature comparable to the tallest
      break;
    }
  }
  if (out.samples[anchor].value < 0.0)
    for (auto& p : out.samples) p.value = -p.value;
  return out;
}

std::vector<ResonanceFit> recover_resonance(const ProcessedCurve& processed,
                                            double delta_v) {
  const auto& s = processed.samples;
  if (s.size() < 5)
    fail(ErrorCode::InvalidArgument, "processed curve too short");
  if (!(delta_v > 0.0))
    fail(ErrorCode::InvalidArgument, "delta_v must be positive");

  // Work on the Regular samples only: the curvature-based magnitudes inside
  // critical windows carry percent-level error, which would wobble the
  // half-maximum crossings whenever an envelope touch drifts near one.
  std::vector<double> rv, av;
  rv.reserve(s.size());
  av.reserve(s.size());
  for (const auto& p : s) {
    if (p.regime != Regime::Regular) continue;
    rv.push_back(p.v);
    av.push_back(std::abs(p.value));
  }
  const std::size_t n = rv.size();
  if (n < 5)
    fail(ErrorCode::InvalidArgument, "too few regular samples");

  // two tallest separated local maxima of |value|
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (av[i] >= av[i - 1] && av[i] >= av[i + 1]) maxima.push_back(i);
  std::sort(maxima.begin(), maxima.end(),
            [&](std::size_t i, std::size_t j) { return av[i] > av[j]; });

  std::vector<std::size_t> peaks;
  for (std::size_t idx : maxima) {
    bool ok = true;
    for (std::size_t other : peaks)
      if (std::abs(rv[idx] - rv[other]) < 0.5 * delta_v) ok = false;
    if (ok) peaks.push_back(idx);
    if (peaks.size() == 2) break;
  }
  if (peaks.size() < 2)
    fail(ErrorCode::PeaksNotSeparated,
         "expected two separated |value| peaks delta_v apart");
  std::sort(peaks.begin(), peaks.end());

  // the dip between them must actually separate the features
  double dip = av[peaks[0]];
  for (std::size_t i = peaks[0]; i <= peaks[1]; ++i) dip = std::min(dip, av[i]);
  if (dip > 0.5 * std::min(av[peaks[0]], av[peaks[1]]))
    fail(ErrorCode::PeaksNotSeparated, "features merge: delta_v too small");

  auto fwhm_peak = [&](std::size_t pk) {
    double half = 0.5 * av[pk];
    std::size_t l = pk;
    while (l > 0 && av[l] > half) --l;
    if (av[l] > half)
      fail(ErrorCode::PeaksNotSeparated, "half maximum not bracketed");
    double t = (half - av[l]) / (av[l + 1] - av[l]);
    double e_left = rv[l] + t * (rv[l + 1] - rv[l]);
    std::size_t r = pk;
    while (r + 1 < n && av[r] > half) ++r;
    if (av[r] > half)
      fail(ErrorCode::PeaksNotSeparated, "half maximum not bracketed");
    t = (half - av[r - 1]) / (av[r] - av[r - 1]);
    double e_right = rv[r - 1] + t * (rv[r] - rv[r - 1]);
    ResonanceFit fit;
    fit.e0 = 0.5 * (e_left + e_right);
    fit.halfwidth = 0.5 * (e_right - e_left);
    fit.e_r = fit.e_i = fit.e0;
    fit.peak_height = av[pk];
    fit.method = FitMethod::PeakFwhm;
    return fit;
  };

  ResonanceFit low = fwhm_peak(peaks[0]);
  ResonanceFit high = fwhm_peak(peaks[1]);
  double sep = high.e0 - low.e0;
  if (std::abs(sep - delta_v) > 0.1 * delta_v)
    fail(ErrorCode::PeaksNotSeparated,
         "peak separation inconsistent with delta_v");
  // arm 1 reflects at bias -V, so its feature sits at the higher V
  return {high, low};
}

std::size_t count_critical_points(const IntensityCurve& curve,
                                  double prominence_rel) {
  const auto& y = curve.i;
  const std::size_t n = y.size();
  if (n < 3) return 0;
  double range = *std::max_element(y.begin(), y.end()) -
                 *std::min_element(y.begin(), y.end());
  if (range <= 0) return 0;

  std::vector<std::size_t> ext;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double dl = y[i] - y[i - 1], dr = y[i + 1] - y[i];
    if (dl == 0) continue;
    if ((dl > 0) != (dr > 0) && dr != 0) ext.push_back(i);
  }
  std::size_t count = 0;
  for (std::size_t j = 0; j < ext.size(); ++j) {
    double neighbor_lo = j > 0 ? y[ext[j - 1]] : y.front();
    double neighbor_hi = j + 1 < ext.size() ? y[ext[j + 1]] : y.back();
    double prom = std::min(std::abs(y[ext[j]] - neighbor_lo),
                           std::abs(y[ext[j]] - neighbor_hi));
    if (prom > prominence_rel * range) ++count;
  }
  return count;
}

void write_intensity_csv(const IntensityCurve& curve, std::ostream& os) {
  os << "V_eV,I\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.v[i], curve.i[i]);
    os << buf;
  }
}

IntensityCurve read_intensity_csv(std::istream& is) {
  IntensityCurve out;
  std::string line;
  if (!std::getline(is, line))
    fail(ErrorCode::ParseError, "empty intensity CSV");
  // header must name the two columns
  if (line.find("V_eV") == std::string::npos ||
      line.find("I") == std::string::npos)
    fail(ErrorCode::ParseError, "intensity CSV must start with header V_eV,I");
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string v_str, i_str;
    if (!std::getline(row, v_str, ',') || !std::getline(row, i_str, ','))
      fail(ErrorCode::ParseError,
           "intensity CSV row " + std::to_string(line_no) + " malformed");
    try {
      out.v.push_back(std::stod(v_str));
      out.i.push_back(std::stod(i_str));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError,
           "intensity CSV row " + std::to_string(line_no) + " not numeric");
    }
  }
  if (out.v.size() < 2) fail(ErrorCode::ParseError, "intensity CSV too short");
  validate_grid(out.v);
  out.i_max_observed = *std::max_element(out.i.begin(), out.i.end());
  out.i_min_observed = *std::min_element(out.i.begin(), out.i.end());
  return out;
}

void write_processed_csv(const ProcessedCurve& curve, std::ostream& os) {
  os << "V_eV,processed,regime\n";
  char buf[128];
  for (const auto& p : curve.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%c\n", p.v, p.value,
                  p.regime == Regime::Regular ? 'R' : 'C');
    os << buf;
  }
}

}  // namespace rres
