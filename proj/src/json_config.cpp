#include "json_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "constants.hpp"

namespace rres {

using nlohmann::json;

std::vector<double> BiasGridSettings::build() const {
  if (!(v_step > 0.0) || !(v_max > v_min))
    fail(ErrorCode::InvalidArgument, "bias grid requires v_max > v_min, v_step > 0");
  std::vector<double> grid;
  std::size_t n = static_cast<std::size_t>(std::floor((v_max - v_min) / v_step)) + 1;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid.push_back(v_min + v_step * i);
  return grid;
}

namespace {

json parse_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::ParseError, "invalid JSON document");
  return doc;
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(ErrorCode::ParseError, std::string("missing numeric field: ") + key);
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    fail(ErrorCode::ParseError, std::string("field must be numeric: ") + key);
  return j.at(key).get<double>();
}

PotentialSpec parse_potential(const json& p) {
  if (!p.contains("shape") || !p.at("shape").is_string())
    fail(ErrorCode::ParseError, "potential needs a string field: shape");
  const std::string shape = p.at("shape").get<std::string>();

  PotentialSpec spec;
  spec.x_min = require_number(p, "x_min");
  spec.x_max = require_number(p, "x_max");
  spec.v_left = require_number(p, "v_left_asymptote");
  spec.v_right = require_number(p, "v_right_asymptote");
  spec.offset = number_or(p, "offset", 0.0);
  spec.params.mass_me = number_or(p, "mass_me", 1.0);
  spec.params.hbar2_over_2me =
      number_or(p, "hbar2_over_2me", kHbar2Over2MeEvNm2);

  if (shape == "washboard") {
    Washboard w;
    w.v0 = require_number(p, "v0");
    w.v1 = require_number(p, "v1");
    w.l = require_number(p, "l");
    spec.shape = w;
  } else if (shape == "step") {
    StepShape s;
    s.v_left = require_number(p, "v_left");
    s.v_right = require_number(p, "v_right");
    spec.shape = s;
  } else if (shape == "square_barrier") {
    SquareBarrier b;
    b.v_base = require_number(p, "v_base");
    b.v_top = require_number(p, "v_top");
    b.width = require_number(p, "width");
    spec.shape = b;
  } else if (shape == "piecewise_linear") {
    PiecewiseLinear pl;
    if (!p.contains("knots") || !p.at("knots").is_array())
      fail(ErrorCode::ParseError, "piecewise_linear needs a knots array");
    for (const auto& k : p.at("knots")) {
      if (!k.is_array() || k.size() != 2)
        fail(ErrorCode::ParseError, "each knot must be [x, V]");
      pl.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    spec.shape = pl;
  } else if (shape == "sampled") {
    SampledShape s;
    if (!p.contains("xs") || !p.contains("vs"))
      fail(ErrorCode::ParseError, "sampled shape needs xs and vs arrays");
    for (const auto& x : p.at("xs")) s.xs.push_back(x.get<double>());
    for (const auto& v : p.at("vs")) s.vs.push_back(v.get<double>());
    spec.shape = s;
  } else {
    fail(ErrorCode::ParseError, "unknown shape: " + shape);
  }
  spec.validate();
  return spec;
}

const json& potential_section(const json& doc) {
  if (doc.contains("potential")) return doc.at("potential");
  return doc;
}

}  // namespace

PotentialSpec potential_from_json(const std::string& text) {
  return parse_potential(potential_section(parse_text(text)));
}

PotentialSpec potential_from_json_file(const std::string& path) {
  return parse_potential(potential_section(load_file(path)));
}

void interferometer_from_json_file(const std::string& path,
                                   InterferometerConfig* cfg,
                                   BiasGridSettings* grid) {
  json doc = load_file(path);
  if (!doc.contains("interferometer"))
    fail(ErrorCode::ParseError, "config has no interferometer section");
  const json& s = doc.at("interferometer");
  cfg->a1 = number_or(s, "a1", 1.0);
  cfg->a2 = number_or(s, "a2", 1.0);
  cfg->alpha1 = number_or(s, "alpha1", 0.0);
  cfg->alpha2 = number_or(s, "alpha2", 0.0);
  cfg->delta_v = require_number(s, "delta_v");
  cfg->e_incident = number_or(s, "e_incident", 0.0);
  cfg->noise_sigma = number_or(s, "noise_sigma", 0.0);
  grid->v_min = require_number(s, "v_min");
  grid->v_max = require_number(s, "v_max");
  grid->v_step = require_number(s, "v_step");
}

namespace {

json fit_to_json(const ResonanceFit& f) {
  json j;
  j["e0_ev"] = f.e0;
  j["halfwidth_ev"] = f.halfwidth;
  j["e_r_ev"] = f.e_r;
  j["e_i_ev"] = f.e_i;
  j["alpha"] = f.alpha;
  j["beta"] = f.beta;
  j["peak_dphi_de"] = f.peak_height;
  j["method"] = f.method == FitMethod::ZeroCrossing ? "ZeroCrossing" : "PeakFWHM";
  return j;
}

}  // namespace

std::string resonance_report_json(const PhaseCurve& curve,
                                  const std::vector<ResonanceFit>& fits) {
  json j;
  j["resonances"] = json::array();
  for (const auto& f : fits) {
    json r = fit_to_json(f);
    r["wigner_delay_s"] = wigner_delay(curve, f.e0);
    j["resonances"].push_back(r);
  }
  j["count"] = fits.size();
  return j.dump(2) + "\n";
}

std::string recovered_report_json(const std::vector<ResonanceFit>& fits,
                                  double delta_v) {
  json j;
  j["delta_v_ev"] = delta_v;
  j["recovered"] = json::array();
  for (const auto& f : fits) j["recovered"].push_back(fit_to_json(f));
  if (!fits.empty()) j["resonance_bias_ev"] = fits.front().e0;
  if (fits.size() >= 2)
    j["peak_separation_ev"] = std::abs(fits[0].e0 - fits[1].e0);
  return j.dump(2) + "\n";
}

}  // namespace rres
