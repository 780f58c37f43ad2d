#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "transfer.hpp"

namespace rres {

using ReflectionFn = std::function<ReflectionPoint(double)>;

struct PhaseSample {
  double energy;      // eV, strictly increasing along the curve
  double phi;         // rad, unwrapped modulo pi
  double dphi_de;     // rad/eV
  double a;           // Re t11 (scaled)
  double b;           // Im t11 (scaled)
  double inv_t11_sq;  // 1/|t11|^2 normalized to unit maximum over the curve
  double t11_sq_log;  // ln of the physical |t11|^2
};

// Adaptively sampled (E, phi, dphi/dE) curve. Keeps the reflection evaluator
// it was built from so fits can refine with fresh evaluations; synthetic
// curves may omit it.
class PhaseCurve {
 public:
  PhaseCurve() = default;

  // Assembles a curve from raw reflection points: sorts, unwraps phi modulo
  // pi, differentiates on the nonuniform grid, normalizes 1/|t11|^2.
  static PhaseCurve assemble(std::vector<ReflectionPoint> points, ReflectionFn fn);

  const std::vector<PhaseSample>& samples() const { return samples_; }
  const ReflectionFn& evaluator() const { return evaluator_; }
  bool empty() const { return samples_.empty(); }
  double e_min() const { return samples_.front().energy; }
  double e_max() const { return samples_.back().energy; }

  double interp_phi(double energy) const;      // linear between samples
  double interp_dphi_de(double energy) const;  // linear between samples

  // CSV rows E_eV,phi_rad,dphi_dE,a,b,inv_t11sq at full double precision.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<PhaseSample> samples_;
  ReflectionFn evaluator_;
};

struct ScanOptions {
  double jump_tol = 0.3;             // rad, adjacent-sample unwrapped jump bound
  int initial_points = 129;
  int n_slices = 8192;               // discretization for spec-based scans
  std::size_t max_samples = 1000000;
  int min_peak_samples = 20;         // samples required inside each half-max span
  double crossing_floor = 1e-11;     // eV, bisection floor for a/b sign flips
};

// Adaptive phase scan of a potential over (e_lo, e_hi). Refines wherever the
// wrapped phase jumps by more than jump_tol and brackets every sign change of
// a(E) and b(E) down to crossing_floor, so isolated sharp resonances cannot
// slip between grid points.
PhaseCurve scan_phase(const PotentialSpec& spec, double e_lo, double e_hi,
                      const ScanOptions& opts = {});

// Same scan driven by an arbitrary reflection evaluator.
PhaseCurve scan_phase_fn(const ReflectionFn& fn, double e_lo, double e_hi,
                         const ScanOptions& opts = {});

// Wigner delay hbar * dphi/dE in seconds, linearly interpolated.
double wigner_delay(const PhaseCurve& curve, double energy);

enum class FitMethod { ZeroCrossing, PeakFwhm };

struct ResonanceFit {
  double e0 = 0.0;           // center, eV
  double halfwidth = 0.0;    // hbar*gamma/2, eV
  double e_r = 0.0;          // zero crossing of a(E)
  double e_i = 0.0;          // zero crossing of b(E)
  double alpha = 0.0;        // slope of a(E) near e_r
  double beta = 0.0;         // slope of b(E) near e_i
  double peak_height = 0.0;  // background-corrected peak dphi/dE, rad/eV
  FitMethod method = FitMethod::ZeroCrossing;
};

struct EnergyWindow {
  double lo, hi;
};

// Zero-crossing fit: a(E) and b(E) must each change sign exactly once
// inside the window; center and halfwidth are slope-weighted averages of
// the two crossings. Crossings are refined by bisection with
// fresh evaluations (1e-10 eV); slopes come from least squares over the
// central half of the window, rescaled to a common magnitude factor.
ResonanceFit fit_resonance(const PhaseCurve& curve, const EnergyWindow& window);

// Fallback fit from the half-maximum points of the background-corrected
// dphi/dE peak. Also reports shape diagnostics used to qualify candidates.
struct FwhmAnalysis {
  ResonanceFit fit;
  double lorentz_residual = 0.0;  // max |shape mismatch| / peak over +-2 hw
  double peak_times_hw = 0.0;     // 1 for an exact Lorentzian
};
FwhmAnalysis peak_fwhm_fit(const PhaseCurve& curve, const EnergyWindow& window);

struct FindOptions {
  double prominence_factor = 5.0;      // vs length-weighted median |dphi/dE|
  double window_halfwidths = 10.0;
  double quality_residual_max = 0.025; // Lorentzian-shape gate
};

// Locates Lorentzian dphi/dE peaks and fits each one; zero-crossing method
// with PeakFwhm fallback. Non-Lorentzian background bumps are rejected by the
// shape gate.
std::vector<ResonanceFit> find_resonances(const PhaseCurve& curve,
                                          const FindOptions& opts = {});

struct LorentzSample {
  double energy;
  double inv_t11_sq_norm;    // 1/|t11|^2, unit peak over the window
  double parabola_residual;  // quadratic-fit residual of the inverse, relative
};

// Normalized 1/|t11|^2 over the window plus the parabola check on its inverse.
std::vector<LorentzSample> lorentz_profile(const PhaseCurve& curve,
                                           const EnergyWindow& window);

// Background-corrected phase step across a resonance: shoulder lines fitted
// over [40,70] halfwidths on each side, extrapolated to the center. Returns
// the step in radians (pi for an ideal isolated resonance).
double phase_step(const ReflectionFn& fn, const ResonanceFit& fit,
                  const ScanOptions& opts = {});

}  // namespace rres
