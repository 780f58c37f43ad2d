#pragma once

#include <complex>

#include "potential.hpp"

namespace rres {

// Basis convention for the 2x2 transfer matrix. Left side: plane waves
// e^{+-ik(x - x_min)} with amplitudes (A_L, B_L). Right side (E < V_R): real
// exponentials ordered (decaying, growing), the decaying solution normalized
// to 1 at x_max. With this ordering the physical (bounded) solution is the
// first right-hand column, so r = t21/t11 and t21 = conj(t11), t22 = conj(t12).
enum class BasisConvention { ReflectingLeftPlaneWave };

// Scaled transfer matrix at one energy. Physical elements are the stored ones
// times e^{log_scale}; the stored matrix is normalized so its largest element
// magnitude is 1. The real scale cancels in reflection ratios and never
// touches phases.
struct TransferMatrix {
  std::complex<double> t11, t12, t21, t22;
  double log_scale = 0.0;
  double energy = 0.0;
  BasisConvention convention = BasisConvention::ReflectingLeftPlaneWave;
};

struct ReflectionPoint {
  double energy = 0.0;            // eV
  std::complex<double> r;         // unimodular in the reflecting band
  double phi = 0.0;               // principal value arg(r)/2 in (-pi/2, pi/2]
  double a = 0.0;                 // Re t11 (scaled)
  double b = 0.0;                 // Im t11 (scaled)
  double t11_sq_log = 0.0;        // ln of the physical |t11|^2
};

struct ConvergedReflection {
  ReflectionPoint point;
  std::size_t n_slices = 0;       // refinement at which the phase settled
  double phase_delta = 0.0;       // phase change at the accepted doubling, rad
};

// Single-slab action on (psi, psi') moving right edge -> left edge across a
// constant-potential slab. Real 2x2 with unit determinant once the factored
// e^{log_scale} is restored; the evanescent branch factors out e^{kappa w}
// above kappa*w = 30 so thick barriers cannot overflow.
struct SlabStep {
  double m11, m12, m21, m22;
  double log_scale;
};
SlabStep slab_step(double v, double energy, double width, double kinetic_prefactor);

// Transfer matrix across the discretized potential. Requires the reflecting
// band V_L < E < V_R; throws EnergyBelowLeftAsymptote / TransmissionChannelOpen
// outside it.
TransferMatrix transfer_matrix(const DiscretizedPotential& pot, double energy);

// Reflection amplitude r = t21/t11 and the quantities derived from t11.
ReflectionPoint reflection(const DiscretizedPotential& pot, double energy);

// Doubles the slice count from `start` until the reflection phase moves by
// less than tol (mod pi) between refinements; throws NoConvergence past 2^20.
ConvergedReflection converge_reflection(const PotentialSpec& spec, double energy,
                                        double tol, std::size_t start = 256);

// Distance between two phases compared modulo pi, in [0, pi/2].
double wrapped_pi_distance(double phi_a, double phi_b);

}  // namespace rres
