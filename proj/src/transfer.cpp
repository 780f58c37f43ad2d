#include "transfer.hpp"

#include <algorithm>
#include <cmath>

#include "constants.hpp"

namespace rres {

namespace {

constexpr double kDegenerateEv = 1e-9;   // |E - V| below which the linear slab limit applies
constexpr double kEvanescentSplit = 30.0;  // kappa*w above which e^{kappa w} is factored out
constexpr double kRescaleAbove = 1e100;

struct ColumnPair {
  // (psi, psi') for the decaying- and growing-seed solutions.
  double p1, d1, p2, d2;
};

void apply(const SlabStep& s, ColumnPair& c) {
  double p1 = s.m11 * c.p1 + s.m12 * c.d1;
  double d1 = s.m21 * c.p1 + s.m22 * c.d1;
  double p2 = s.m11 * c.p2 + s.m12 * c.d2;
  double d2 = s.m21 * c.p2 + s.m22 * c.d2;
  c = {p1, d1, p2, d2};
}

}  // namespace

double wrapped_pi_distance(double phi_a, double phi_b) {
  double d = std::fmod(phi_a - phi_b, kPi);
  if (d > 0.5 * kPi) d -= kPi;
  if (d < -0.5 * kPi) d += kPi;
  return std::abs(d);
}

SlabStep slab_step(double v, double energy, double width, double kinetic_prefactor) {
  if (std::abs(energy - v) < kDegenerateEv) {
    // psi = c1 + c2 (x - x0): matching limit for E ~ V
    return {1.0, -width, 0.0, 1.0, 0.0};
  }
  if (energy > v) {
    double k = std::sqrt((energy - v) / kinetic_prefactor);
    double kw = k * width;
    double c = std::cos(kw), s = std::sin(kw);
    return {c, -s / k, k * s, c, 0.0};
  }
  double kap = std::sqrt((v - energy) / kinetic_prefactor);
  double kw = kap * width;
  if (kw <= kEvanescentSplit) {
    double c = std::cosh(kw), s = std::sinh(kw);
    return {c, -s / kap, -kap * s, c, 0.0};
  }
  // cosh/sinh = e^{kw}/2 (1 +- e^{-2kw}); keep the O(1) part, log the rest
  double eps = std::exp(-2.0 * kw);
  return {1.0 + eps, -(1.0 - eps) / kap, -kap * (1.0 - eps), 1.0 + eps,
          kw - std::log(2.0)};
}

TransferMatrix transfer_matrix(const DiscretizedPotential& pot, double energy) {
  const double c = pot.params.kinetic_prefactor();
  if (energy <= pot.v_left)
    fail(ErrorCode::EnergyBelowLeftAsymptote,
         "no propagating left channel: E <= V_L");
  if (energy >= pot.v_right)
    fail(ErrorCode::TransmissionChannelOpen,
         "transmission channel open: E >= V_R");

  const double k_left = std::sqrt((energy - pot.v_left) / c);
  const double kap_right = std::sqrt((pot.v_right - energy) / c);

  // Seeds at x_max: decaying e^{-kappa u} -> (1, -kappa); growing -> (1, +kappa).
  ColumnPair col{1.0, -kap_right, 1.0, +kap_right};
  double log_scale = 0.0;

  for (auto it = pot.slices.rbegin(); it != pot.slices.rend(); ++it) {
    SlabStep s = slab_step(it->v, energy, it->width, c);
    apply(s, col);
    log_scale += s.log_scale;
    double m = std::max(std::max(std::abs(col.p1), std::abs(col.d1)),
                        std::max(std::abs(col.p2), std::abs(col.d2)));
    if (m > kRescaleAbove) {
      col.p1 /= m; col.d1 /= m; col.p2 /= m; col.d2 /= m;
      log_scale += std::log(m);
    }
  }

  // Plane-wave amplitudes at x_min: A = (psi - i psi'/k)/2, B = conj(A) for
  // real (psi, psi').
  const std::complex<double> i_over_k(0.0, 1.0 / k_left);
  TransferMatrix t;
  t.t11 = 0.5 * (col.p1 - i_over_k * col.d1);
  t.t21 = std::conj(t.t11);
  t.t12 = 0.5 * (col.p2 - i_over_k * col.d2);
  t.t22 = std::conj(t.t12);

  double m = std::max(std::max(std::abs(t.t11), std::abs(t.t12)),
                      std::max(std::abs(t.t21), std::abs(t.t22)));
  t.t11 /= m; t.t12 /= m; t.t21 /= m; t.t22 /= m;
  t.log_scale = log_scale + std::log(m);
  t.energy = energy;
  return t;
}

ReflectionPoint reflection(const DiscretizedPotential& pot, double energy) {
  TransferMatrix t = transfer_matrix(pot, energy);
  ReflectionPoint p;
  p.energy = energy;
  p.r = t.t21 / t.t11;
  p.phi = 0.5 * std::arg(p.r);  // in (-pi/2, pi/2]
  p.a = t.t11.real();
  p.b = t.t11.imag();
  p.t11_sq_log = 2.0 * (std::log(std::abs(t.t11)) + t.log_scale);
  return p;
}

ConvergedReflection converge_reflection(const PotentialSpec& spec, double energy,
                                        double tol, std::size_t start) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  constexpr std::size_t kMaxSlices = std::size_t{1} << 20;

  std::size_t n = std::max<std::size_t>(start, 1);
  ReflectionPoint prev = reflection(discretize(spec, n), energy);
  while (n <= kMaxSlices / 2) {
    n *= 2;
    ReflectionPoint cur = reflection(discretize(spec, n), energy);
    double delta = wrapped_pi_distance(cur.phi, prev.phi);
    if (delta < tol) return {cur, n, delta};
    prev = cur;
  }
  fail(ErrorCode::NoConvergence, "phase did not settle by 2^20 slices");
}

}  // namespace rres
