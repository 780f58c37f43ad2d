#include "potential.hpp"

#include <algorithm>
#include <cmath>

namespace rres {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EnergyBelowLeftAsymptote: return "EnergyBelowLeftAsymptote";
    case ErrorCode::TransmissionChannelOpen: return "TransmissionChannelOpen";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::GridExploded: return "GridExploded";
    case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorCode::MultipleCrossings: return "MultipleCrossings";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateIntensity: return "DegenerateIntensity";
    case ErrorCode::PeaksNotSeparated: return "PeaksNotSeparated";
  }
  return "UnknownError";
}

void PhysicalParams::validate() const {
  if (!(mass_me > 0.0))
    fail(ErrorCode::InvalidArgument, "mass_me must be positive");
  if (!(hbar2_over_2me > 0.0))
    fail(ErrorCode::InvalidArgument, "hbar2_over_2me must be positive");
}

namespace {

double interp_clamped(const std::vector<double>& xs, const std::vector<double>& vs,
                      double x) {
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return vs[i] + t * (vs[i + 1] - vs[i]);
}

// Profile value without asymptote handling or offset.
double profile_value(const PotentialSpec& spec, double x) {
  struct Visitor {
    const PotentialSpec& spec;
    double x;

    double operator()(const Washboard& w) const {
      return w.v0 * std::cos(x / w.l) + w.v1 * x;
    }
    double operator()(const StepShape& s) const {
      double mid = 0.5 * (spec.x_min + spec.x_max);
      return x < mid ? s.v_left : s.v_right;
    }
    double operator()(const SquareBarrier& b) const {
      double c = 0.5 * (spec.x_min + spec.x_max);
      return std::abs(x - c) < 0.5 * b.width ? b.v_top : b.v_base;
    }
    double operator()(const PiecewiseLinear& p) const {
      // clamp outside the knot range
      if (x <= p.knots.front().first) return p.knots.front().second;
      if (x >= p.knots.back().first) return p.knots.back().second;
      auto it = std::upper_bound(
          p.knots.begin(), p.knots.end(), x,
          [](double a, const std::pair<double, double>& k) { return a < k.first; });
      std::size_t i = static_cast<std::size_t>(it - p.knots.begin()) - 1;
      double t = (x - p.knots[i].first) / (p.knots[i + 1].first - p.knots[i].first);
      return p.knots[i].second + t * (p.knots[i + 1].second - p.knots[i].second);
    }
    double operator()(const SampledShape& s) const {
      return interp_clamped(s.xs, s.vs, x);
    }
  };
  return std::visit(Visitor{spec, x}, spec.shape);
}

}  // namespace

void PotentialSpec::validate() const {
  params.validate();
  if (!(x_min <= x_max))
    fail(ErrorCode::InvalidArgument, "x_min must not exceed x_max");
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Washboard>) {
          if (!(s.l > 0.0))
            fail(ErrorCode::InvalidArgument, "washboard period l must be positive");
        } else if constexpr (std::is_same_v<T, SquareBarrier>) {
          if (s.width < 0.0 || s.width > x_max - x_min)
            fail(ErrorCode::InvalidArgument,
                 "barrier width must lie within [0, x_max - x_min]");
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          if (s.knots.size() < 2)
            fail(ErrorCode::InvalidArgument, "piecewise_linear needs >= 2 knots");
          for (std::size_t i = 1; i < s.knots.size(); ++i)
            if (!(s.knots[i].first > s.knots[i - 1].first))
              fail(ErrorCode::InvalidArgument, "knot x values must be increasing");
        } else if constexpr (std::is_same_v<T, SampledShape>) {
          if (s.xs.size() < 2 || s.xs.size() != s.vs.size())
            fail(ErrorCode::InvalidArgument, "sampled shape needs matching xs/vs");
          for (std::size_t i = 1; i < s.xs.size(); ++i)
            if (!(s.xs[i] > s.xs[i - 1]))
              fail(ErrorCode::InvalidArgument, "sampled xs must be strictly increasing");
        }
      },
      shape);
  if (x_min < x_max) {
    // Asymptotes must continue the profile: V_L matches the left endpoint,
    // V_R is a constant continuation at or above the right endpoint.
    double at_min = profile_value(*this, x_min);
    if (std::abs(at_min - v_left) > 1e-9)
      fail(ErrorCode::InvalidArgument,
           "v_left_asymptote must equal the profile value at x_min");
    double at_max = profile_value(*this, x_max);
    if (v_right < at_max - 1e-9)
      fail(ErrorCode::InvalidArgument,
           "v_right_asymptote must not undercut the profile value at x_max");
  }
}

double evaluate(const PotentialSpec& spec, double x) {
  if (x < spec.x_min) return spec.v_left_effective();
  if (x > spec.x_max) return spec.v_right_effective();
  return profile_value(spec, x) + spec.offset;
}

PotentialSpec apply_bias(const PotentialSpec& spec, double bias) {
  PotentialSpec out = spec;
  out.offset -= bias;
  return out;
}

DiscretizedPotential discretize(const PotentialSpec& spec, std::size_t n_slices) {
  if (n_slices == 0)
    fail(ErrorCode::InvalidArgument, "n_slices must be >= 1");
  DiscretizedPotential out;
  out.v_left = spec.v_left_effective();
  out.v_right = spec.v_right_effective();
  out.params = spec.params;
  if (spec.x_min == spec.x_max) return out;  // bare interface, no slices

  out.slices.reserve(n_slices);
  const double span = spec.x_max - spec.x_min;
  double left = spec.x_min;
  for (std::size_t i = 0; i < n_slices; ++i) {
    double right = (i + 1 == n_slices)
                       ? spec.x_max
                       : spec.x_min + span * static_cast<double>(i + 1) /
                                          static_cast<double>(n_slices);
    double mid = 0.5 * (left + right);
    out.slices.push_back({left, right - left, evaluate(spec, mid)});
    left = right;
  }
  return out;
}

}  // namespace rres
