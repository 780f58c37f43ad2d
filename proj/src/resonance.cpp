#include "resonance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>

#include "constants.hpp"

namespace rres {

namespace {

// Least-squares line through (x, y); returns {intercept, slope}.
std::pair<double, double> line_fit(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double slope = sxx > 0 ? sxy / sxx : 0.0;
  return {my - slope * mx, slope};
}

double median_weighted(std::vector<std::pair<double, double>> value_weight) {
  std::sort(value_weight.begin(), value_weight.end());
  double total = 0;
  for (const auto& vw : value_weight) total += vw.second;
  double acc = 0;
  for (const auto& vw : value_weight) {
    acc += vw.second;
    if (acc >= 0.5 * total) return vw.first;
  }
  return value_weight.empty() ? 0.0 : value_weight.back().first;
}

}  // namespace

PhaseCurve PhaseCurve::assemble(std::vector<ReflectionPoint> points,
                                ReflectionFn fn) {
  std::sort(points.begin(), points.end(),
            [](const ReflectionPoint& p, const ReflectionPoint& q) {
              return p.energy < q.energy;
            });
  PhaseCurve curve;
  curve.evaluator_ = std::move(fn);
  const std::size_t n = points.size();
  if (n == 0) return curve;
  curve.samples_.resize(n);

  // unwrap modulo pi: pick the pi-multiple nearest the previous sample
  double prev = points[0].phi;
  for (std::size_t i = 0; i < n; ++i) {
    double p = points[i].phi;
    double k = std::round((prev - p) / kPi);
    double phi = p + k * kPi;
    curve.samples_[i].energy = points[i].energy;
    curve.samples_[i].phi = phi;
    curve.samples_[i].a = points[i].a;
    curve.samples_[i].b = points[i].b;
    curve.samples_[i].t11_sq_log = points[i].t11_sq_log;
    prev = phi;
  }

  // derivative on the nonuniform grid (3-point interior, one-sided ends)
  auto& s = curve.samples_;
  if (n == 1) {
    s[0].dphi_de = 0.0;
  } else {
    s[0].dphi_de = (s[1].phi - s[0].phi) / (s[1].energy - s[0].energy);
    s[n - 1].dphi_de =
        (s[n - 1].phi - s[n - 2].phi) / (s[n - 1].energy - s[n - 2].energy);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h1 = s[i].energy - s[i - 1].energy;
      double h2 = s[i + 1].energy - s[i].energy;
      s[i].dphi_de = -h2 / (h1 * (h1 + h2)) * s[i - 1].phi +
                     (h2 - h1) / (h1 * h2) * s[i].phi +
                     h1 / (h2 * (h1 + h2)) * s[i + 1].phi;
    }
  }

  double min_log = s[0].t11_sq_log;
  for (const auto& p : s) min_log = std::min(min_log, p.t11_sq_log);
  for (auto& p : s) p.inv_t11_sq = std::exp(-(p.t11_sq_log - min_log));
  return curve;
}

double PhaseCurve::interp_phi(double energy) const {
  if (empty() || energy < e_min() || energy > e_max())
    fail(ErrorCode::OutOfRange, "energy outside the scanned range");
  auto it = std::lower_bound(samples_.begin(), samples_.end(), energy,
                             [](const PhaseSample& p, double e) {
                               return p.energy < e;
                             });
  if (it == samples_.begin()) return it->phi;
  auto lo = std::prev(it);
  double t = (energy - lo->energy) / (it->energy - lo->energy);
  return lo->phi + t * (it->phi - lo->phi);
}

double PhaseCurve::interp_dphi_de(double energy) const {
  if (empty() || energy < e_min() || energy > e_max())
    fail(ErrorCode::OutOfRange, "energy outside the scanned range");
  auto it = std::lower_bound(samples_.begin(), samples_.end(), energy,
                             [](const PhaseSample& p, double e) {
                               return p.energy < e;
                             });
  if (it == samples_.begin()) return it->dphi_de;
  auto lo = std::prev(it);
  double t = (energy - lo->energy) / (it->energy - lo->energy);
  return lo->dphi_de + t * (it->dphi_de - lo->dphi_de);
}

void PhaseCurve::write_csv(std::ostream& os) const {
  os << "E_eV,phi_rad,dphi_dE,a,b,inv_t11sq\n";
  char buf[256];
  for (const auto& p : samples_) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  p.energy, p.phi, p.dphi_de, p.a, p.b, p.inv_t11_sq);
    os << buf;
  }
}

namespace {

struct PeakSpan {
  std::size_t index;   // sample index of the local maximum
  double e_lo, e_hi;   // half-maximum span
  std::size_t count;   // samples inside the span
};

std::vector<std::size_t> local_maxima_above(const std::vector<PhaseSample>& s,
                                            double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i].dphi_de > threshold && s[i].dphi_de > s[i - 1].dphi_de &&
        s[i].dphi_de >= s[i + 1].dphi_de)
      out.push_back(i);
  }
  return out;
}

double weighted_median_abs_dphi(const std::vector<PhaseSample>& s) {
  std::vector<std::pair<double, double>> vw;
  vw.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double left = i > 0 ? s[i].energy - s[i - 1].energy : 0.0;
    double right = i + 1 < s.size() ? s[i + 1].energy - s[i].energy : 0.0;
    vw.emplace_back(std::abs(s[i].dphi_de), 0.5 * (left + right));
  }
  return median_weighted(std::move(vw));
}

// Half-maximum span of the peak at index i, interpolating the crossings.
PeakSpan half_max_span(const std::vector<PhaseSample>& s, std::size_t i) {
  const double half = 0.5 * s[i].dphi_de;
  std::size_t l = i;
  while (l > 0 && s[l].dphi_de > half) --l;
  std::size_t r = i;
  while (r + 1 < s.size() && s[r].dphi_de > half) ++r;
  double e_lo = s[l].energy;
  if (s[l].dphi_de <= half && l + 1 <= i) {
    double t = (half - s[l].dphi_de) / (s[l + 1].dphi_de - s[l].dphi_de);
    e_lo = s[l].energy + t * (s[l + 1].energy - s[l].energy);
  }
  double e_hi = s[r].energy;
  if (s[r].dphi_de <= half && r >= 1) {
    double t = (half - s[r - 1].dphi_de) / (s[r].dphi_de - s[r - 1].dphi_de);
    e_hi = s[r - 1].energy + t * (s[r].energy - s[r - 1].energy);
  }
  std::size_t count = 0;
  for (std::size_t k = l; k <= r; ++k)
    if (s[k].energy >= e_lo && s[k].energy <= e_hi) ++count;
  return {i, e_lo, e_hi, count};
}

}  // namespace

PhaseCurve scan_phase_fn(const ReflectionFn& fn, double e_lo, double e_hi,
                         const ScanOptions& opts) {
  if (!(e_lo < e_hi)) fail(ErrorCode::InvalidArgument, "require e_lo < e_hi");
  std::map<double, ReflectionPoint> pts;
  auto eval_at = [&](double e) {
    if (pts.size() >= opts.max_samples)
      fail(ErrorCode::GridExploded, "adaptive refinement exceeded max_samples");
    pts.emplace(e, fn(e));
  };

  const int n0 = std::max(opts.initial_points, 2);
  for (int i = 0; i < n0; ++i) {
    double t = static_cast<double>(i) / (n0 - 1);
    eval_at(e_lo + t * (e_hi - e_lo));
  }

  // Interval refinement. Two triggers: the wrapped phase jump, and sign flips
  // of a or b (which persist across a full pi step, so sharp resonances are
  // found even when the wrapped jump is invisible at coarse spacing).
  std::vector<std::pair<double, double>> work;
  for (auto it = pts.begin(); std::next(it) != pts.end(); ++it)
    work.emplace_back(it->first, std::next(it)->first);

  const double tiny = 1e-13 * std::max(1.0, std::max(std::abs(e_lo), std::abs(e_hi)));
  while (!work.empty()) {
    auto [a_e, b_e] = work.back();
    work.pop_back();
    const ReflectionPoint& p = pts.at(a_e);
    const ReflectionPoint& q = pts.at(b_e);
    double width = b_e - a_e;
    bool split = false;
    if (width > tiny && wrapped_pi_distance(p.phi, q.phi) > opts.jump_tol)
      split = true;
    else if (width > opts.crossing_floor &&
             (std::signbit(p.a) != std::signbit(q.a) ||
              std::signbit(p.b) != std::signbit(q.b)))
      split = true;
    if (split) {
      double mid = 0.5 * (a_e + b_e);
      if (mid <= a_e || mid >= b_e) continue;  // interval at double resolution
      eval_at(mid);
      work.emplace_back(a_e, mid);
      work.emplace_back(mid, b_e);
    }
  }

  auto assemble = [&]() {
    std::vector<ReflectionPoint> v;
    v.reserve(pts.size());
    for (const auto& kv : pts) v.push_back(kv.second);
    return PhaseCurve::assemble(std::move(v), fn);
  };

  // Resolve every prominent dphi/dE peak: cap the sample gap at a tenth of
  // the half-maximum halfspan out to five halfspans, so the peak tip, the
  // half-max crossings, and the near shoulders are all uniformly covered
  // (this also guarantees >= min_peak_samples inside the span itself).
  PhaseCurve curve = assemble();
  for (int round = 0; round < 10; ++round) {
    const auto& s = curve.samples();
    double med = weighted_median_abs_dphi(s);
    auto peaks = local_maxima_above(s, 5.0 * med);
    bool added = false;
    for (std::size_t idx : peaks) {
      PeakSpan span = half_max_span(s, idx);
      double center = 0.5 * (span.e_lo + span.e_hi);
      double halfspan = std::max(0.5 * (span.e_hi - span.e_lo), 1e-14);
      double gap_cap = 2.0 * halfspan / opts.min_peak_samples;
      double lo = std::max(e_lo, center - 5.0 * halfspan);
      double hi = std::min(e_hi, center + 5.0 * halfspan);
      auto it = pts.lower_bound(lo);
      std::vector<double> inserts;
      for (; it != pts.end() && std::next(it) != pts.end(); ++it) {
        double a_e = it->first;
        double b_e = std::next(it)->first;
        if (a_e > hi) break;
        if (b_e - a_e > gap_cap) inserts.push_back(0.5 * (a_e + b_e));
      }
      for (double e : inserts) {
        eval_at(e);
        added = true;
      }
    }
    if (!added) break;
    curve = assemble();
  }
  return curve;
}

PhaseCurve scan_phase(const PotentialSpec& spec, double e_lo, double e_hi,
                      const ScanOptions& opts) {
  spec.validate();
  if (!(spec.v_left_effective() < e_lo && e_hi < spec.v_right_effective()))
    fail(ErrorCode::InvalidArgument,
         "scan range must lie inside the reflecting band (V_L, V_R)");
  auto pot = std::make_shared<DiscretizedPotential>(
      discretize(spec, static_cast<std::size_t>(opts.n_slices)));
  ReflectionFn fn = [pot](double e) { return reflection(*pot, e); };
  return scan_phase_fn(fn, e_lo, e_hi, opts);
}

double wigner_delay(const PhaseCurve& curve, double energy) {
  return kHbarEvS * curve.interp_dphi_de(energy);
}

namespace {

// Indices of samples inside [lo, hi].
std::pair<std::size_t, std::size_t> window_range(const std::vector<PhaseSample>& s,
                                                 const EnergyWindow& w) {
  auto first = std::lower_bound(
      s.begin(), s.end(), w.lo,
      [](const PhaseSample& p, double e) { return p.energy < e; });
  auto last = std::upper_bound(
      s.begin(), s.end(), w.hi,
      [](double e, const PhaseSample& p) { return e < p.energy; });
  if (first >= last)
    fail(ErrorCode::InvalidArgument, "window contains no samples");
  return {static_cast<std::size_t>(first - s.begin()),
          static_cast<std::size_t>(last - s.begin())};
}

double magnitude_scale(const ReflectionPoint& p) {
  // ln of the factored-out magnitude: |t11_phys| = |t11_scaled| e^{s}
  return 0.5 * (p.t11_sq_log - std::log(p.a * p.a + p.b * p.b));
}

double bisect_component(const ReflectionFn& fn, bool use_a, double lo, double hi,
                        bool lo_negative) {
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    double mid = 0.5 * (lo + hi);
    ReflectionPoint p = fn(mid);
    double v = use_a ? p.a : p.b;
    if (std::signbit(v) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double refined_peak_energy(const std::vector<PhaseSample>& s, std::size_t lo,
                           std::size_t hi, double* peak_value) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (s[i].dphi_de > s[best].dphi_de) best = i;
  double e = s[best].energy, v = s[best].dphi_de;
  if (best > lo && best + 1 < hi) {
    double x0 = s[best - 1].energy, x1 = s[best].energy, x2 = s[best + 1].energy;
    double y0 = s[best - 1].dphi_de, y1 = s[best].dphi_de, y2 = s[best + 1].dphi_de;
    double d1 = (y1 - y0) / (x1 - x0), d2 = (y2 - y1) / (x2 - x1);
    double curv = (d2 - d1) / (x2 - x0);
    if (curv < 0) {
      double xv = 0.5 * (x0 + x1 - d1 / curv);
      if (xv > x0 && xv < x2) {
        e = xv;
        v = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1);
      }
    }
  }
  if (peak_value) *peak_value = v;
  return e;
}

}  // namespace

ResonanceFit fit_resonance(const PhaseCurve& curve, const EnergyWindow& window) {
  const auto& s = curve.samples();
  auto [lo, hi] = window_range(s, window);
  if (hi - lo < 3)
    fail(ErrorCode::InvalidArgument, "window too sparsely sampled");

  std::vector<std::size_t> a_brackets, b_brackets;  // index of the left sample
  for (std::size_t i = lo; i + 1 < hi; ++i) {
    if (std::signbit(s[i].a) != std::signbit(s[i + 1].a)) a_brackets.push_back(i);
    if (std::signbit(s[i].b) != std::signbit(s[i + 1].b)) b_brackets.push_back(i);
  }
  if (a_brackets.empty() || b_brackets.empty())
    fail(ErrorCode::NoZeroCrossing, "window misses a sign change of a or b");
  if (a_brackets.size() > 1 || b_brackets.size() > 1)
    fail(ErrorCode::MultipleCrossings, "window holds multiple sign changes");

  const ReflectionFn& fn = curve.evaluator();
  double e_r, e_i;
  if (fn) {
    std::size_t ia = a_brackets[0], ib = b_brackets[0];
    e_r = bisect_component(fn, true, s[ia].energy, s[ia + 1].energy,
                           std::signbit(s[ia].a));
    e_i = bisect_component(fn, false, s[ib].energy, s[ib + 1].energy,
                           std::signbit(s[ib].b));
  } else {
    // no evaluator: interpolated crossing from the stored samples
    auto interp_root = [&](std::size_t i0, bool use_a) {
      double ya = use_a ? s[i0].a : s[i0].b;
      double yb = use_a ? s[i0 + 1].a : s[i0 + 1].b;
      return s[i0].energy - ya * (s[i0 + 1].energy - s[i0].energy) / (yb - ya);
    };
    e_r = interp_root(a_brackets[0], true);
    e_i = interp_root(b_brackets[0], false);
  }

  // Slopes over the central half of the window, symmetric about the crossing
  // midpoint; all samples rescaled to a common magnitude factor so the
  // running renormalization cannot tilt the lines.
  const double mid = 0.5 * (e_r + e_i);
  const double quarter = 0.25 * (window.hi - window.lo);
  std::vector<double> es, as, bs;
  if (fn) {
    const int k = 65;
    ReflectionPoint center = fn(mid);
    double s0 = magnitude_scale(center);
    for (int i = 0; i < k; ++i) {
      double e = mid - quarter + 2.0 * quarter * i / (k - 1);
      ReflectionPoint p = fn(e);
      double f = std::exp(magnitude_scale(p) - s0);
      es.push_back(e);
      as.push_back(p.a * f);
      bs.push_back(p.b * f);
    }
  } else {
    auto sample_scale = [](const PhaseSample& p) {
      return 0.5 * (p.t11_sq_log - std::log(p.a * p.a + p.b * p.b));
    };
    auto [i0, i1] = window_range(s, {mid - quarter, mid + quarter});
    if (i1 - i0 < 2)
      fail(ErrorCode::InvalidArgument, "central half-window too sparse");
    double s0 = sample_scale(s[(i0 + i1) / 2]);
    for (std::size_t i = i0; i < i1; ++i) {
      double f = std::exp(sample_scale(s[i]) - s0);
      es.push_back(s[i].energy);
      as.push_back(s[i].a * f);
      bs.push_back(s[i].b * f);
    }
  }
  double alpha = line_fit(es, as).second;
  double beta = line_fit(es, bs).second;
  double w2 = alpha * alpha + beta * beta;
  if (!(w2 > 0)) fail(ErrorCode::NoZeroCrossing, "vanishing slopes");

  ResonanceFit fit;
  fit.e_r = e_r;
  fit.e_i = e_i;
  fit.alpha = alpha;
  fit.beta = beta;
  fit.e0 = (alpha * alpha * e_r + beta * beta * e_i) / w2;
  fit.halfwidth = std::abs(alpha * beta * (e_r - e_i)) / w2;
  fit.method = FitMethod::ZeroCrossing;
  refined_peak_energy(s, lo, hi, &fit.peak_height);
  return fit;
}

FwhmAnalysis peak_fwhm_fit(const PhaseCurve& curve, const EnergyWindow& window) {
  const auto& s = curve.samples();
  auto [lo, hi] = window_range(s, window);
  if (hi - lo < 5)
    fail(ErrorCode::InvalidArgument, "window too sparsely sampled");

  double peak_raw;
  double e_pk = refined_peak_energy(s, lo, hi, &peak_raw);
  if (!(peak_raw > 0))
    fail(ErrorCode::InvalidArgument, "no positive dphi/dE peak in window");
  double hw0 = 1.0 / peak_raw;

  // background line from shoulder samples; prefer far shoulders
  auto shoulder_fit = [&](double inner, double outer,
                          std::pair<double, double>* out) {
    std::vector<double> xs, ys;
    for (std::size_t i = lo; i < hi; ++i) {
      double d = std::abs(s[i].energy - e_pk);
      if (d >= inner * hw0 && d <= outer * hw0) {
        xs.push_back(s[i].energy);
        ys.push_back(s[i].dphi_de);
      }
    }
    if (xs.size() < 6) return false;
    *out = line_fit(xs, ys);
    return true;
  };
  std::pair<double, double> bg{0.0, 0.0};
  if (!shoulder_fit(10.0, 20.0, &bg)) shoulder_fit(5.0, 10.0, &bg);

  auto corrected = [&](std::size_t i) {
    return s[i].dphi_de - (bg.first + bg.second * s[i].energy);
  };

  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i)
    if (corrected(i) > corrected(best)) best = i;
  double pk_c = corrected(best);
  if (!(pk_c > 0))
    fail(ErrorCode::InvalidArgument, "background removes the peak");
  double half = 0.5 * pk_c;

  std::size_t l = best;
  while (l > lo && corrected(l) > half) --l;
  if (corrected(l) > half)
    fail(ErrorCode::NoZeroCrossing, "left half-maximum not inside window");
  double t = (half - corrected(l)) / (corrected(l + 1) - corrected(l));
  double e_left = s[l].energy + t * (s[l + 1].energy - s[l].energy);

  std::size_t r = best;
  while (r + 1 < hi && corrected(r) > half) ++r;
  if (corrected(r) > half)
    fail(ErrorCode::NoZeroCrossing, "right half-maximum not inside window");
  t = (half - corrected(r - 1)) / (corrected(r) - corrected(r - 1));
  double e_right = s[r - 1].energy + t * (s[r].energy - s[r - 1].energy);

  FwhmAnalysis out;
  out.fit.e0 = 0.5 * (e_left + e_right);
  out.fit.halfwidth = 0.5 * (e_right - e_left);
  out.fit.e_r = out.fit.e_i = out.fit.e0;
  out.fit.alpha = out.fit.beta = 0.0;
  out.fit.peak_height = pk_c;
  out.fit.method = FitMethod::PeakFwhm;
  out.peak_times_hw = pk_c * out.fit.halfwidth;

  double resid = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    double u = s[i].energy - out.fit.e0;
    if (std::abs(u) > 2.0 * out.fit.halfwidth) continue;
    double model = pk_c * out.fit.halfwidth * out.fit.halfwidth /
                   (u * u + out.fit.halfwidth * out.fit.halfwidth);
    resid = std::max(resid, std::abs(corrected(i) - model));
  }
  out.lorentz_residual = resid / pk_c;
  return out;
}

std::vector<ResonanceFit> find_resonances(const PhaseCurve& curve,
                                          const FindOptions& opts) {
  std::vector<ResonanceFit> fits;
  const auto& s = curve.samples();
  if (s.size() < 5) return fits;

  double med = weighted_median_abs_dphi(s);
  double threshold = opts.prominence_factor * med;
  auto peaks = local_maxima_above(s, threshold);
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t i, std::size_t j) {
    return s[i].dphi_de > s[j].dphi_de;
  });

  std::vector<EnergyWindow> claimed;
  auto is_claimed = [&](double e) {
    for (const auto& w : claimed)
      if (e >= w.lo && e <= w.hi) return true;
    return false;
  };

  for (std::size_t idx : peaks) {
    double e_pk = s[idx].energy;
    if (is_claimed(e_pk)) continue;

    // Judge each candidate on a dedicated sub-scan: a band-wide curve is far
    // too coarse around a sharp feature for shoulder fits or half-max points.
    double hw_est = 1.0 / s[idx].dphi_de;
    EnergyWindow sub{std::max(curve.e_min(), e_pk - 25.0 * hw_est),
                     std::min(curve.e_max(), e_pk + 25.0 * hw_est)};
    const PhaseCurve* local = &curve;
    PhaseCurve rescan;
    if (curve.evaluator()) {
      ScanOptions so;
      so.initial_points = 401;
      rescan = scan_phase_fn(curve.evaluator(), sub.lo, sub.hi, so);
      local = &rescan;
    }

    FwhmAnalysis fa;
    try {
      fa = peak_fwhm_fit(*local, sub);
    } catch (const Error&) {
      continue;  // cannot even measure a peak shape here
    }
    // the sub-window may be dominated by an already-fitted neighbor
    if (is_claimed(fa.fit.e0)) continue;
    // Lorentzian-shape gate: quasibound resonances satisfy peak*hw = 1 with a
    // small residual; slow over-barrier humps do not.
    if (fa.lorentz_residual > opts.quality_residual_max) continue;
    if (fa.peak_times_hw < 0.7 || fa.peak_times_hw > 1.3) continue;

    EnergyWindow window{
        std::max(local->e_min(), fa.fit.e0 - opts.window_halfwidths * fa.fit.halfwidth),
        std::min(local->e_max(), fa.fit.e0 + opts.window_halfwidths * fa.fit.halfwidth)};
    ResonanceFit fit;
    try {
      fit = fit_resonance(*local, window);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoZeroCrossing &&
          e.code() != ErrorCode::MultipleCrossings)
        throw;
      fit = fa.fit;
    }
    fits.push_back(fit);
    claimed.push_back({fit.e0 - 5.0 * fit.halfwidth, fit.e0 + 5.0 * fit.halfwidth});
  }

  std::sort(fits.begin(), fits.end(),
            [](const ResonanceFit& x, const ResonanceFit& y) { return x.e0 < y.e0; });
  return fits;
}

std::vector<LorentzSample> lorentz_profile(const PhaseCurve& curve,
                                           const EnergyWindow& window) {
  const auto& s = curve.samples();
  auto [lo, hi] = window_range(s, window);
  if (hi - lo < 3)
    fail(ErrorCode::InvalidArgument, "window too sparsely sampled");

  double min_log = s[lo].t11_sq_log;
  for (std::size_t i = lo; i < hi; ++i)
    min_log = std::min(min_log, s[i].t11_sq_log);

  std::vector<LorentzSample> out(hi - lo);
  std::vector<double> es, inv;
  for (std::size_t i = lo; i < hi; ++i) {
    out[i - lo].energy = s[i].energy;
    out[i - lo].inv_t11_sq_norm = std::exp(-(s[i].t11_sq_log - min_log));
    es.push_back(s[i].energy);
    inv.push_back(std::exp(s[i].t11_sq_log - min_log));
  }

  // quadratic least squares on the inverse, centered for conditioning
  double c0 = 0.5 * (es.front() + es.back());
  double m[3][4] = {};
  for (std::size_t i = 0; i < es.size(); ++i) {
    double x = es[i] - c0;
    double p[3] = {1.0, x, x * x};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += p[r] * p[c];
      m[r][3] += p[r] * inv[i];
    }
  }
  // gaussian elimination, 3x3
  for (int r = 0; r < 3; ++r) {
    int piv = r;
    for (int k = r + 1; k < 3; ++k)
      if (std::abs(m[k][r]) > std::abs(m[piv][r])) piv = k;
    std::swap(m[r], m[piv]);
    for (int k = r + 1; k < 3; ++k) {
      double f = m[k][r] / m[r][r];
      for (int c = r; c < 4; ++c) m[k][c] -= f * m[r][c];
    }
  }
  double coef[3];
  for (int r = 2; r >= 0; --r) {
    coef[r] = m[r][3];
    for (int c = r + 1; c < 3; ++c) coef[r] -= m[r][c] * coef[c];
    coef[r] /= m[r][r];
  }

  double max_inv = *std::max_element(inv.begin(), inv.end());
  for (std::size_t i = 0; i < es.size(); ++i) {
    double x = es[i] - c0;
    double fit = coef[0] + coef[1] * x + coef[2] * x * x;
    out[i].parabola_residual = (inv[i] - fit) / max_inv;
  }
  return out;
}

double phase_step(const ReflectionFn& fn, const ResonanceFit& fit,
                  const ScanOptions& opts) {
  const double hw = fit.halfwidth;
  const double e0 = fit.e0;
  ScanOptions o = opts;
  o.initial_points = std::max(o.initial_points, 257);
  PhaseCurve curve = scan_phase_fn(fn, e0 - 70.0 * hw, e0 + 70.0 * hw, o);

  std::vector<double> xl, yl, xr, yr;
  for (const auto& p : curve.samples()) {
    double u = p.energy - e0;
    if (u <= -40.0 * hw) { xl.push_back(p.energy); yl.push_back(p.phi); }
    if (u >= 40.0 * hw) { xr.push_back(p.energy); yr.push_back(p.phi); }
  }
  if (xl.size() < 4 || xr.size() < 4)
    fail(ErrorCode::InvalidArgument, "shoulder regions too sparse");
  auto ll = line_fit(xl, yl);
  auto lr = line_fit(xr, yr);
  return (lr.first + lr.second * e0) - (ll.first + ll.second * e0);
}

}  // namespace rres
