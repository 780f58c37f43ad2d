#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "constants.hpp"
#include "interferometer.hpp"

using namespace rres;

namespace {

PotentialSpec washboard() {
  PotentialSpec spec;
  spec.shape = Washboard{-10.0, 1.0, 1.0};
  spec.x_min = 0.0;
  spec.x_max = 9.7;
  spec.v_left = -10.0;
  spec.v_right = 19.9;
  spec.params.mass_me = 0.01;
  return spec;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) g.push_back(lo + step * i);
  return g;
}

// Intensity for a synthetic phase profile phi(V).
IntensityCurve synth_intensity(const std::vector<double>& v,
                               const std::function<double(double)>& phi,
                               double a1, double a2, double dalpha, double dv) {
  IntensityCurve out;
  out.v = v;
  out.i.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.i[i] = a1 * a1 + a2 * a2 +
               2 * a1 * a2 * std::cos(dalpha + 2 * (phi(v[i]) - phi(v[i] + dv)));
  out.i_max_observed = *std::max_element(out.i.begin(), out.i.end());
  out.i_min_observed = *std::min_element(out.i.begin(), out.i.end());
  return out;
}

constexpr double kE0 = 7.9, kHw = 0.011, kDv = 0.2;

double lorentz_phase(double v) {
  return std::atan((v - kE0) / kHw) + 0.3 * v;
}
double lorentz_dphase(double v) {
  return kHw / ((v - kE0) * (v - kE0) + kHw * kHw) + 0.3;
}

}  // namespace

TEST_CASE("vanishing bias separation freezes the pattern") {
  PotentialSpec spec = washboard();
  InterferometerConfig cfg;
  cfg.a1 = 1.0;
  cfg.a2 = 0.7;
  cfg.alpha1 = 0.3;
  cfg.alpha2 = 1.1;
  cfg.delta_v = 1e-12;
  cfg.v_grid = grid(7.5, 8.2, 0.01);
  IntensityCurve ic = simulate_intensity(spec, cfg);
  const double expected =
      1.0 + 0.49 + 2 * 0.7 * std::cos(cfg.alpha1 - cfg.alpha2);
  for (double y : ic.i) CHECK(y == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("synthetic Lorentzian phase: exact midpoint symmetry") {
  // grid symmetric about vbar = e0 - dv/2 = 7.8 so mirrored samples pair up
  auto v = grid(7.2, 8.4, 0.00025);
  IntensityCurve ic =
      synth_intensity(v, lorentz_phase, 1.0, 0.7, -0.4 * kPi, kDv);
  const std::size_t n = ic.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = n - 1 - i;
    CHECK(std::abs(ic.i[i] - ic.i[j]) < 1e-10);
  }
}

TEST_CASE("synthetic Lorentzian phase: five critical points, bounds") {
  auto v = grid(7.2, 8.4, 0.00025);
  IntensityCurve ic =
      synth_intensity(v, lorentz_phase, 1.0, 0.7, -0.4 * kPi, kDv);
  CHECK(count_critical_points(ic) == 5);
  for (double y : ic.i) {
    CHECK(y <= 2.89 + 1e-12);
    CHECK(y >= 0.09 - 1e-12);
  }
  CHECK(ic.i_max_observed > 2.889);
  CHECK(ic.i_min_observed < 0.091);
}

TEST_CASE("processing recovers the phase-derivative difference") {
  auto v = grid(7.2, 8.4, 0.00025);
  IntensityCurve ic =
      synth_intensity(v, lorentz_phase, 1.0, 0.7, -0.4 * kPi, kDv);
  ProcessedCurve pc = process_intensity(ic);
  REQUIRE(pc.samples.size() == v.size());

  // refined envelope nails the true one
  CHECK(pc.i_max_refined == doctest::Approx(2.89).epsilon(1e-5));
  CHECK(pc.i_min_refined == doctest::Approx(0.09).epsilon(1e-3));

  double peak = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    peak = std::max(peak,
                    std::abs(2 * (lorentz_dphase(v[i]) - lorentz_dphase(v[i] + kDv))));

  double err_regular = 0.0;
  std::size_t n_critical = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double oracle = 2 * (lorentz_dphase(v[i]) - lorentz_dphase(v[i] + kDv));
    const auto& s = pc.samples[i];
    CHECK(std::isfinite(s.value));
    if (s.regime == Regime::Regular)
      err_regular = std::max(err_regular, std::abs(s.value - oracle));
    else
      ++n_critical;
  }
  CHECK(err_regular < 0.01 * peak);
  CHECK(n_critical >= 4);  // two touches per feature get regularized

  // the difference of the two Lorentzians vanishes at the midpoint
  double vbar = kE0 - kDv / 2;
  for (const auto& s : pc.samples)
    if (std::abs(s.v - vbar) < 1.3e-4)
      CHECK(std::abs(s.value) < 0.002 * peak);
}

TEST_CASE("recover_resonance: synthetic two-Lorentzian profile") {
  // processed curve built directly as the difference of two Lorentzians
  auto v = grid(7.5, 8.5, 0.0005);
  ProcessedCurve pc;
  for (double x : v) {
    double val = 0.01 / ((x - 8.1) * (x - 8.1) + 1e-4) -
                 0.01 / ((x - 7.9) * (x - 7.9) + 1e-4);
    pc.samples.push_back({x, val, Regime::Regular});
  }
  auto fits = recover_resonance(pc, 0.2);
  REQUIRE(fits.size() == 2);
  // arm-1 (higher-V) peak first
  CHECK(std::abs(fits[0].e0 - 8.1) < 1e-3);
  CHECK(std::abs(fits[1].e0 - 7.9) < 1e-3);
  CHECK(std::abs(std::abs(fits[0].e0 - fits[1].e0) - 0.2) < 0.002);
  CHECK(fits[0].halfwidth == doctest::Approx(0.01).epsilon(0.02));
  CHECK(fits[1].halfwidth == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("recover_resonance refuses merged features") {
  auto v = grid(7.5, 8.5, 0.0005);
  ProcessedCurve pc;
  for (double x : v) {
    // separation comparable to the width: no clean dip betwen the features
    double val = 0.02 / ((x - 8.01) * (x - 8.01) + 4e-4) -
                 0.02 / ((x - 7.99) * (x - 7.99) + 4e-4);
    pc.samples.push_back({x, val, Regime::Regular});
  }
  CHECK_THROWS_AS(recover_resonance(pc, 0.02), Error);
  try {
    recover_resonance(pc, 0.02);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PeaksNotSeparated);
  }
}

TEST_CASE("washboard interferometer reproduces the five-point pattern") {
  PotentialSpec spec = washboard();
  InterferometerConfig cfg;
  cfg.a1 = 1.0;
  cfg.a2 = 0.7;
  cfg.alpha1 = 0.0;
  cfg.alpha2 = 0.2 * 2 * kPi;
  cfg.delta_v = 0.2;
  auto v = grid(7.17, 8.37, 0.00025);
  cfg.v_grid = v;
  IntensityCurve ic = simulate_intensity(spec, cfg);

  CHECK(count_critical_points(ic) == 5);
  for (double y : ic.i) {
    CHECK(y <= 2.89 + 1e-9);
    CHECK(y >= 0.09 - 1e-9);
  }

  ProcessedCurve pc = process_intensity(ic);
  auto fits = recover_resonance(pc, cfg.delta_v);
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].e0 == doctest::Approx(7.8715).epsilon(2e-4));
  CHECK(std::abs(std::abs(fits[0].e0 - fits[1].e0) - 0.2) < 0.02 * 0.2);
  // both features image the same resonance
  CHECK(std::abs(fits[0].halfwidth - fits[1].halfwidth) <
        0.02 * fits[0].halfwidth);

  // approximate symmetry about the midpoint between the features
  double vbar = 0.5 * (fits[0].e0 + fits[1].e0);
  double range = ic.i_max_observed - ic.i_min_observed;
  double defect = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double u = v[i] - vbar;
    if (std::abs(u) > 0.55) continue;
    double mirror = vbar - u;
    std::size_t j = static_cast<std::size_t>(
        std::llround((mirror - v.front()) / 0.00025));
    if (j >= v.size()) continue;
    defect = std::max(defect, std::abs(ic.i[i] - ic.i[j]));
  }
  CHECK(defect < 0.02 * range);
}

TEST_CASE("recovered center is stable against arm imbalance") {
  PotentialSpec spec = washboard();
  auto v = grid(7.3, 8.25, 0.0005);  // the contracted spacing, <= hw/20
  double reference = 0.0;
  double hw = 0.0111;
  for (double a2 : {0.3, 0.65, 1.0}) {
    for (double alpha2 : {0.0, 1.7, 4.4}) {
      InterferometerConfig cfg;
      cfg.a1 = 1.0;
      cfg.a2 = a2;
      cfg.alpha1 = 0.0;
      cfg.alpha2 = alpha2;
      cfg.delta_v = 0.2;
      cfg.v_grid = v;
      IntensityCurve ic = simulate_intensity(spec, cfg);
      ProcessedCurve pc = process_intensity(ic);
      auto fits = recover_resonance(pc, cfg.delta_v);
      REQUIRE(fits.size() == 2);
      if (reference == 0.0) reference = fits[0].e0;
      CHECK(std::abs(fits[0].e0 - reference) < 0.01 * hw);
    }
  }
}

TEST_CASE("simulation validates its inputs") {
  PotentialSpec spec = washboard();
  InterferometerConfig cfg;
  cfg.a1 = 1.0;
  cfg.a2 = 0.7;
  cfg.delta_v = 0.2;

  InterferometerConfig bad_amp = cfg;
  bad_amp.a2 = 0.0;
  bad_amp.v_grid = grid(7.5, 8.0, 0.01);
  CHECK_THROWS_AS(simulate_intensity(spec, bad_amp), Error);

  InterferometerConfig bad_dv = cfg;
  bad_dv.delta_v = 0.0;
  bad_dv.v_grid = grid(7.5, 8.0, 0.01);
  CHECK_THROWS_AS(simulate_intensity(spec, bad_dv), Error);

  InterferometerConfig bad_grid = cfg;
  bad_grid.v_grid = {7.5, 7.5};
  CHECK_THROWS_AS(simulate_intensity(spec, bad_grid), Error);

  // grid pushing V + delta_v past the right asymptote leaves the band
  InterferometerConfig off_band = cfg;
  off_band.v_grid = grid(19.0, 19.9, 0.05);
  CHECK_THROWS_AS(simulate_intensity(spec, off_band), Error);
}

TEST_CASE("noise knob is deterministic per seed and off by default") {
  PotentialSpec spec = washboard();
  InterferometerConfig cfg;
  cfg.a1 = 1.0;
  cfg.a2 = 0.7;
  cfg.delta_v = 0.2;
  cfg.v_grid = grid(7.8, 8.0, 0.002);
  IntensityCurve clean1 = simulate_intensity(spec, cfg);
  IntensityCurve clean2 = simulate_intensity(spec, cfg);
  CHECK(clean1.i == clean2.i);

  cfg.noise_sigma = 0.01;
  cfg.seed = 42;
  IntensityCurve noisy1 = simulate_intensity(spec, cfg);
  IntensityCurve noisy2 = simulate_intensity(spec, cfg);
  CHECK(noisy1.i == noisy2.i);
  CHECK(noisy1.i != clean1.i);

  cfg.seed = 43;
  IntensityCurve other = simulate_intensity(spec, cfg);
  CHECK(other.i != noisy1.i);
}

TEST_CASE("process_intensity input guards") {
  IntensityCurve tiny;
  tiny.v = {1.0, 2.0};
  tiny.i = {0.5, 0.6};
  CHECK_THROWS_AS(process_intensity(tiny), Error);

  IntensityCurve flat;
  for (int i = 0; i < 32; ++i) {
    flat.v.push_back(i * 0.1);
    flat.i.push_back(1.25);
  }
  flat.i_max_observed = flat.i_min_observed = 1.25;
  try {
    process_intensity(flat);
    FAIL("expected DegenerateIntensity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateIntensity);
  }
}

TEST_CASE("intensity CSV round-trips bit-exactly") {
  auto v = grid(7.6, 7.7, 0.005);
  IntensityCurve ic =
      synth_intensity(v, lorentz_phase, 1.0, 0.7, -0.4 * kPi, kDv);
  std::ostringstream os;
  write_intensity_csv(ic, os);
  std::istringstream is(os.str());
  IntensityCurve back = read_intensity_csv(is);
  REQUIRE(back.v.size() == ic.v.size());
  CHECK(back.v == ic.v);
  CHECK(back.i == ic.i);

  std::istringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_intensity_csv(bad_header), Error);
  std::istringstream bad_row("V_eV,I\n1.0,zap\n");
  CHECK_THROWS_AS(read_intensity_csv(bad_row), Error);
}

TEST_CASE("processed CSV carries the regime tags") {
  auto v = grid(7.2, 8.4, 0.0005);
  IntensityCurve ic =
      synth_intensity(v, lorentz_phase, 1.0, 0.7, -0.4 * kPi, kDv);
  ProcessedCurve pc = process_intensity(ic);
  std::ostringstream os;
  write_processed_csv(pc, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "V_eV,processed,regime");
  std::size_t rows = 0, critical = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++rows;
    char tag = line.back();
    CHECK((tag == 'R' || tag == 'C'));
    if (tag == 'C') ++critical;
  }
  CHECK(rows == pc.samples.size());
  CHECK(critical >= 4);
}
