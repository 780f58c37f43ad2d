#pragma once

#include <string>
#include <variant>
#include <vector>

#include "error.hpp"

namespace rres {

// Particle mass (in electron masses) together with the kinetic constant
// hbar^2/(2 m_e) in eV nm^2.
struct PhysicalParams {
  double mass_me = 1.0;
  double hbar2_over_2me = 0.0380998;

  // hbar^2/(2M) in eV nm^2 for the configured mass.
  double kinetic_prefactor() const { return hbar2_over_2me / mass_me; }

  void validate() const;
};

// Tilted cosine V0 cos(x/L) + V1 x.
struct Washboard {
  double v0 = 0.0;  // eV
  double v1 = 0.0;  // eV per nm
  double l = 1.0;   // nm
};

// Two-level profile, jump at the midpoint of [x_min, x_max].
struct StepShape {
  double v_left = 0.0;
  double v_right = 0.0;
};

// Flat barrier of the given width centered in [x_min, x_max].
struct SquareBarrier {
  double v_base = 0.0;
  double v_top = 0.0;
  double width = 0.0;  // nm
};

struct PiecewiseLinear {
  std::vector<std::pair<double, double>> knots;  // (x nm, V eV), x increasing
};

struct SampledShape {
  std::vector<double> xs;  // nm, strictly increasing
  std::vector<double> vs;  // eV
};

using Shape =
    std::variant<Washboard, StepShape, SquareBarrier, PiecewiseLinear, SampledShape>;

// Declarative 1D potential: a profile on [x_min, x_max] with constant
// continuations v_left (x < x_min) and v_right (x > x_max). A rigid bias is
// tracked in `offset` so that stacked biases cancel exactly.
struct PotentialSpec {
  Shape shape;
  double x_min = 0.0;
  double x_max = 0.0;
  double v_left = 0.0;   // base left asymptote, eV
  double v_right = 0.0;  // base right asymptote, eV
  double offset = 0.0;   // rigid shift from apply_bias, eV
  PhysicalParams params;

  double v_left_effective() const { return v_left + offset; }
  double v_right_effective() const { return v_right + offset; }

  // Checks field invariants; throws Error(InvalidArgument) on violation.
  void validate() const;
};

// Piecewise-constant representation used by the transfer-matrix propagation.
struct PotentialSlice {
  double x_left;  // nm
  double width;   // nm
  double v;       // eV
};

struct DiscretizedPotential {
  std::vector<PotentialSlice> slices;
  double v_left = 0.0;   // effective left asymptote, eV
  double v_right = 0.0;  // effective right asymptote, eV
  PhysicalParams params;
};

// Profile + asymptote evaluation; x outside [x_min, x_max] returns the
// corresponding asymptote.
double evaluate(const PotentialSpec& spec, double x);

// Rigid shift of profile and asymptotes by -bias.
PotentialSpec apply_bias(const PotentialSpec& spec, double bias);

// Uniform slices over [x_min, x_max], slice value at the slice midpoint.
// n_slices must be >= 1; an empty domain (x_min == x_max) yields no slices.
DiscretizedPotential discretize(const PotentialSpec& spec, std::size_t n_slices);

}  // namespace rres
