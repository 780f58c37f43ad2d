#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "resonance.hpp"

namespace rres {

// Two-arm differential reflection spectrometer: arm 1 reflects off the
// potential biased at -V, arm 2 at -(V + delta_v). Biasing by -V is applied
// as reflection at effective energy e_incident + V of the unbiased potential.
struct InterferometerConfig {
  double a1 = 1.0;          // arm amplitudes, > 0
  double a2 = 0.7;
  double alpha1 = 0.0;      // arm phase offsets, rad
  double alpha2 = 0.0;
  double delta_v = 0.0;     // bias separation, eV, > 0
  double e_incident = 0.0;  // eV
  std::vector<double> v_grid;  // bias grid, strictly increasing
  double noise_sigma = 0.0; // additive gaussian noise on I, 0 = deterministic
  std::uint64_t seed = 0;
  int n_slices = 8192;
};

struct IntensityCurve {
  std::vector<double> v;  // bias grid, strictly increasing
  std::vector<double> i;  // intensity
  double i_max_observed = 0.0;
  double i_min_observed = 0.0;
};

enum class Regime { Regular, CriticalPoint };

struct ProcessedSample {
  double v;
  double value;  // +- (dI/dV)/sqrt((I_Max - I)(I - I_min)), rad/eV
  Regime regime;
};

struct ProcessedCurve {
  std::vector<ProcessedSample> samples;
  double i_max_refined = 0.0;  // envelope after parabolic touch refinement
  double i_min_refined = 0.0;
  std::vector<ResonanceFit> recovered_fits;
};

// I(V) = a1^2 + a2^2 + 2 a1 a2 cos[(alpha1 - alpha2) + 2(phi(V) - phi(V+dV))]
// with reflection phases evaluated fresh at every grid point.
IntensityCurve simulate_intensity(const PotentialSpec& spec,
                                  const InterferometerConfig& cfg);

struct ProcessOptions {
  // Regime switch: (I_Max - I)(I - I_min) below this fraction of range^2 uses
  // the second-order critical-point formula.
  double critical_fraction = 1e-3;
  // Envelope touches (sign flips) are dI/dV zero crossings with the product
  // locally below this fraction of range^2.
  double touch_fraction = 1e-2;
};

// Normalized-derivative processing (dI/dV)/sqrt((I_Max - I)(I - I_min))
// with curvature-based regularization at the envelope touches and sign
// continuation across them.
ProcessedCurve process_intensity(const IntensityCurve& curve,
                                 const ProcessOptions& opts = {});

// Fits the two |value| peaks (PeakFwhm) and checks their separation against
// delta_v. The arm-1 peak (at the resonance bias) is returned first.
std::vector<ResonanceFit> recover_resonance(const ProcessedCurve& processed,
                                            double delta_v);

// Interior extrema of I(V) with a relative prominence filter.
std::size_t count_critical_points(const IntensityCurve& curve,
                                  double prominence_rel = 1e-4);

void write_intensity_csv(const IntensityCurve& curve, std::ostream& os);
IntensityCurve read_intensity_csv(std::istream& is);
void write_processed_csv(const ProcessedCurve& curve, std::ostream& os);

}  // namespace rres
