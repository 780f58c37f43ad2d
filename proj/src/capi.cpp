#include "rres/rres.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "json_config.hpp"

namespace {

thread_local std::string g_last_error;

rres_status map_code(rres::ErrorCode code) {
  using rres::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return RRES_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return RRES_ERR_PARSE;
    case ErrorCode::IoError: return RRES_ERR_IO;
    case ErrorCode::EnergyBelowLeftAsymptote:
      return RRES_ERR_ENERGY_BELOW_LEFT_ASYMPTOTE;
    case ErrorCode::TransmissionChannelOpen:
      return RRES_ERR_TRANSMISSION_CHANNEL_OPEN;
    case ErrorCode::NoConvergence: return RRES_ERR_NO_CONVERGENCE;
    case ErrorCode::GridExploded: return RRES_ERR_GRID_EXPLODED;
    case ErrorCode::NoZeroCrossing: return RRES_ERR_NO_ZERO_CROSSING;
    case ErrorCode::MultipleCrossings: return RRES_ERR_MULTIPLE_CROSSINGS;
    case ErrorCode::OutOfRange: return RRES_ERR_OUT_OF_RANGE;
    case ErrorCode::DegenerateIntensity: return RRES_ERR_DEGENERATE_INTENSITY;
    case ErrorCode::PeaksNotSeparated: return RRES_ERR_PEAKS_NOT_SEPARATED;
  }
  return RRES_ERR_INTERNAL;
}

// Runs the body, translating exceptions into statuses + thread-local message.
template <typename Fn>
rres_status guarded(Fn&& fn) {
  try {
    fn();
    return RRES_OK;
  } catch (const rres::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RRES_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RRES_ERR_INTERNAL;
  }
}

rres_status require(bool ok, const char* message) {
  if (ok) return RRES_OK;
  g_last_error = message;
  return RRES_ERR_INVALID_ARGUMENT;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) rres::fail(rres::ErrorCode::IoError, "cannot open " + path);
  out << text;
  if (!out) rres::fail(rres::ErrorCode::IoError, "write failed: " + path);
}

rres_resonance_fit to_c(const rres::ResonanceFit& f) {
  rres_resonance_fit out;
  out.e0_ev = f.e0;
  out.halfwidth_ev = f.halfwidth;
  out.e_r_ev = f.e_r;
  out.e_i_ev = f.e_i;
  out.alpha = f.alpha;
  out.beta = f.beta;
  out.peak_dphi_de = f.peak_height;
  out.method = f.method == rres::FitMethod::ZeroCrossing ? 0 : 1;
  return out;
}

rres_reflection_point to_c(const rres::ReflectionPoint& p) {
  rres_reflection_point out;
  out.energy_ev = p.energy;
  out.r_re = p.r.real();
  out.r_im = p.r.imag();
  out.phi_rad = p.phi;
  out.a = p.a;
  out.b = p.b;
  out.t11_sq_log = p.t11_sq_log;
  return out;
}

}  // namespace

struct rres_potential {
  rres::PotentialSpec spec;
};
struct rres_phase_curve {
  rres::PhaseCurve curve;
};
struct rres_resonance_list {
  std::vector<rres::ResonanceFit> fits;
};
struct rres_intensity_curve {
  rres::IntensityCurve curve;
};
struct rres_processed_curve {
  rres::ProcessedCurve curve;
};

extern "C" {

const char* rres_status_name(rres_status status) {
  switch (status) {
    case RRES_OK: return "Ok";
    case RRES_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case RRES_ERR_PARSE: return "ParseError";
    case RRES_ERR_IO: return "IoError";
    case RRES_ERR_ENERGY_BELOW_LEFT_ASYMPTOTE: return "EnergyBelowLeftAsymptote";
    case RRES_ERR_TRANSMISSION_CHANNEL_OPEN: return "TransmissionChannelOpen";
    case RRES_ERR_NO_CONVERGENCE: return "NoConvergence";
    case RRES_ERR_GRID_EXPLODED: return "GridExploded";
    case RRES_ERR_NO_ZERO_CROSSING: return "NoZeroCrossing";
    case RRES_ERR_MULTIPLE_CROSSINGS: return "MultipleCrossings";
    case RRES_ERR_OUT_OF_RANGE: return "OutOfRange";
    case RRES_ERR_DEGENERATE_INTENSITY: return "DegenerateIntensity";
    case RRES_ERR_PEAKS_NOT_SEPARATED: return "PeaksNotSeparated";
    case RRES_ERR_INTERNAL: return "InternalError";
  }
  return "UnknownStatus";
}

const char* rres_last_error(void) { return g_last_error.c_str(); }

rres_status rres_potential_from_json_file(const char* path, rres_potential** out) {
  if (rres_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_potential{rres::potential_from_json_file(path)};
  });
}

rres_status rres_potential_from_json(const char* text, rres_potential** out) {
  if (rres_status s = require(text && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_potential{rres::potential_from_json(text)};
  });
}

void rres_potential_free(rres_potential* pot) { delete pot; }

rres_status rres_potential_evaluate(const rres_potential* pot, double x_nm,
                                    double* v_ev) {
  if (rres_status s = require(pot && v_ev, "null argument")) return s;
  return guarded([&] { *v_ev = rres::evaluate(pot->spec, x_nm); });
}

rres_status rres_potential_bias(const rres_potential* pot, double bias_ev,
                                rres_potential** out) {
  if (rres_status s = require(pot && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_potential{rres::apply_bias(pot->spec, bias_ev)};
  });
}

rres_status rres_potential_range(const rres_potential* pot, double* x_min,
                                 double* x_max, double* v_left, double* v_right) {
  if (rres_status s = require(pot != nullptr, "null potential")) return s;
  if (x_min) *x_min = pot->spec.x_min;
  if (x_max) *x_max = pot->spec.x_max;
  if (v_left) *v_left = pot->spec.v_left_effective();
  if (v_right) *v_right = pot->spec.v_right_effective();
  return RRES_OK;
}

rres_status rres_potential_write_profile_csv(const rres_potential* pot,
                                             double x_lo, double x_hi, size_t n,
                                             const char* path) {
  if (rres_status s = require(pot && path && n >= 1, "need potential, path, n >= 1"))
    return s;
  return guarded([&] {
    std::string text = "x_nm,V_eV\n";
    char buf[128];
    for (size_t i = 0; i < n; ++i) {
      double x = n == 1 ? x_lo
                        : x_lo + (x_hi - x_lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x,
                    rres::evaluate(pot->spec, x));
      text += buf;
    }
    write_text_file(path, text);
  });
}

rres_status rres_reflection(const rres_potential* pot, double energy_ev,
                            int n_slices, rres_reflection_point* out) {
  if (rres_status s = require(pot && out, "null argument")) return s;
  return guarded([&] {
    std::size_t n = n_slices > 0 ? static_cast<std::size_t>(n_slices) : 8192;
    *out = to_c(rres::reflection(rres::discretize(pot->spec, n), energy_ev));
  });
}

rres_status rres_reflection_converged(const rres_potential* pot, double energy_ev,
                                      double tol_rad, rres_reflection_point* out,
                                      size_t* n_slices_used) {
  if (rres_status s = require(pot && out, "null argument")) return s;
  return guarded([&] {
    rres::ConvergedReflection c =
        rres::converge_reflection(pot->spec, energy_ev, tol_rad);
    *out = to_c(c.point);
    if (n_slices_used) *n_slices_used = c.n_slices;
  });
}

rres_status rres_scan_phase(const rres_potential* pot, double e_lo, double e_hi,
                            const rres_scan_options* opts_or_null,
                            rres_phase_curve** out) {
  if (rres_status s = require(pot && out, "null argument")) return s;
  return guarded([&] {
    rres::ScanOptions opts;
    if (opts_or_null) {
      if (opts_or_null->jump_tol_rad > 0) opts.jump_tol = opts_or_null->jump_tol_rad;
      if (opts_or_null->initial_points > 0)
        opts.initial_points = opts_or_null->initial_points;
      if (opts_or_null->n_slices > 0) opts.n_slices = opts_or_null->n_slices;
      if (opts_or_null->min_peak_samples > 0)
        opts.min_peak_samples = opts_or_null->min_peak_samples;
      if (opts_or_null->max_samples > 0) opts.max_samples = opts_or_null->max_samples;
    }
    *out = new rres_phase_curve{rres::scan_phase(pot->spec, e_lo, e_hi, opts)};
  });
}

void rres_phase_curve_free(rres_phase_curve* curve) { delete curve; }

size_t rres_phase_curve_size(const rres_phase_curve* curve) {
  return curve ? curve->curve.samples().size() : 0;
}

rres_status rres_phase_curve_sample(const rres_phase_curve* curve, size_t index,
                                    rres_phase_sample* out) {
  if (rres_status s = require(curve && out, "null argument")) return s;
  if (index >= curve->curve.samples().size()) {
    g_last_error = "sample index out of range";
    return RRES_ERR_OUT_OF_RANGE;
  }
  const rres::PhaseSample& p = curve->curve.samples()[index];
  out->energy_ev = p.energy;
  out->phi_rad = p.phi;
  out->dphi_de = p.dphi_de;
  out->a = p.a;
  out->b = p.b;
  out->inv_t11_sq = p.inv_t11_sq;
  return RRES_OK;
}

rres_status rres_phase_curve_write_csv(const rres_phase_curve* curve,
                                       const char* path) {
  if (rres_status s = require(curve && path, "null argument")) return s;
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("cannot open ") + path);
    curve->curve.write_csv(os);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("write failed: ") + path);
  });
}

rres_status rres_wigner_delay(const rres_phase_curve* curve, double energy_ev,
                              double* delay_s) {
  if (rres_status s = require(curve && delay_s, "null argument")) return s;
  return guarded([&] { *delay_s = rres::wigner_delay(curve->curve, energy_ev); });
}

rres_status rres_find_resonances(const rres_phase_curve* curve,
                                 rres_resonance_list** out) {
  if (rres_status s = require(curve && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_resonance_list{rres::find_resonances(curve->curve)};
  });
}

void rres_resonance_list_free(rres_resonance_list* list) { delete list; }

size_t rres_resonance_list_size(const rres_resonance_list* list) {
  return list ? list->fits.size() : 0;
}

rres_status rres_resonance_list_get(const rres_resonance_list* list, size_t index,
                                    rres_resonance_fit* out) {
  if (rres_status s = require(list && out, "null argument")) return s;
  if (index >= list->fits.size()) {
    g_last_error = "fit index out of range";
    return RRES_ERR_OUT_OF_RANGE;
  }
  *out = to_c(list->fits[index]);
  return RRES_OK;
}

rres_status rres_fit_resonance(const rres_phase_curve* curve, double window_lo,
                               double window_hi, rres_resonance_fit* out) {
  if (rres_status s = require(curve && out, "null argument")) return s;
  return guarded([&] {
    *out = to_c(rres::fit_resonance(curve->curve, {window_lo, window_hi}));
  });
}

rres_status rres_lorentz_profile(const rres_phase_curve* curve, double window_lo,
                                 double window_hi, double* energy_ev,
                                 double* inv_t11_sq_norm, double* parabola_residual,
                                 size_t cap, size_t* n_out) {
  if (rres_status s = require(curve && n_out, "null argument")) return s;
  return guarded([&] {
    auto profile = rres::lorentz_profile(curve->curve, {window_lo, window_hi});
    *n_out = profile.size();
    size_t n = profile.size() < cap ? profile.size() : cap;
    for (size_t i = 0; i < n; ++i) {
      if (energy_ev) energy_ev[i] = profile[i].energy;
      if (inv_t11_sq_norm) inv_t11_sq_norm[i] = profile[i].inv_t11_sq_norm;
      if (parabola_residual) parabola_residual[i] = profile[i].parabola_residual;
    }
  });
}

rres_status rres_resonance_report_write_json(const rres_phase_curve* curve,
                                             const rres_resonance_list* list,
                                             const char* path) {
  if (rres_status s = require(curve && list && path, "null argument")) return s;
  return guarded([&] {
    write_text_file(path, rres::resonance_report_json(curve->curve, list->fits));
  });
}

rres_status rres_interferometer_config_from_json_file(
    const char* path, rres_interferometer_config* cfg, double* v_min,
    double* v_max, double* v_step) {
  if (rres_status s = require(path && cfg, "null argument")) return s;
  return guarded([&] {
    rres::InterferometerConfig c;
    rres::BiasGridSettings grid;
    rres::interferometer_from_json_file(path, &c, &grid);
    cfg->a1 = c.a1;
    cfg->a2 = c.a2;
    cfg->alpha1 = c.alpha1;
    cfg->alpha2 = c.alpha2;
    cfg->delta_v_ev = c.delta_v;
    cfg->e_incident_ev = c.e_incident;
    cfg->noise_sigma = c.noise_sigma;
    cfg->seed = 0;
    if (v_min) *v_min = grid.v_min;
    if (v_max) *v_max = grid.v_max;
    if (v_step) *v_step = grid.v_step;
  });
}

rres_status rres_simulate_intensity(const rres_potential* pot,
                                    const rres_interferometer_config* cfg,
                                    const double* v_grid, size_t n,
                                    rres_intensity_curve** out) {
  if (rres_status s = require(pot && cfg && v_grid && out, "null argument"))
    return s;
  return guarded([&] {
    rres::InterferometerConfig c;
    c.a1 = cfg->a1;
    c.a2 = cfg->a2;
    c.alpha1 = cfg->alpha1;
    c.alpha2 = cfg->alpha2;
    c.delta_v = cfg->delta_v_ev;
    c.e_incident = cfg->e_incident_ev;
    c.noise_sigma = cfg->noise_sigma;
    c.seed = cfg->seed;
    c.v_grid.assign(v_grid, v_grid + n);
    *out = new rres_intensity_curve{rres::simulate_intensity(pot->spec, c)};
  });
}

void rres_intensity_curve_free(rres_intensity_curve* curve) { delete curve; }

rres_status rres_intensity_from_arrays(const double* v, const double* i, size_t n,
                                       rres_intensity_curve** out) {
  if (rres_status s = require(v && i && out && n >= 2, "need arrays with n >= 2"))
    return s;
  return guarded([&] {
    rres::IntensityCurve c;
    c.v.assign(v, v + n);
    c.i.assign(i, i + n);
    for (size_t k = 1; k < n; ++k)
      if (!(c.v[k] > c.v[k - 1]))
        rres::fail(rres::ErrorCode::InvalidArgument,
                   "bias grid must be strictly increasing");
    c.i_max_observed = *std::max_element(c.i.begin(), c.i.end());
    c.i_min_observed = *std::min_element(c.i.begin(), c.i.end());
    *out = new rres_intensity_curve{std::move(c)};
  });
}

rres_status rres_intensity_read_csv(const char* path, rres_intensity_curve** out) {
  if (rres_status s = require(path && out, "null argument")) return s;
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) rres::fail(rres::ErrorCode::IoError, std::string("cannot open ") + path);
    *out = new rres_intensity_curve{rres::read_intensity_csv(is)};
  });
}

rres_status rres_intensity_write_csv(const rres_intensity_curve* curve,
                                     const char* path) {
  if (rres_status s = require(curve && path, "null argument")) return s;
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("cannot open ") + path);
    rres::write_intensity_csv(curve->curve, os);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("write failed: ") + path);
  });
}

size_t rres_intensity_curve_size(const rres_intensity_curve* curve) {
  return curve ? curve->curve.v.size() : 0;
}

rres_status rres_intensity_curve_sample(const rres_intensity_curve* curve,
                                        size_t index, double* v_ev, double* i) {
  if (rres_status s = require(curve != nullptr, "null curve")) return s;
  if (index >= curve->curve.v.size()) {
    g_last_error = "sample index out of range";
    return RRES_ERR_OUT_OF_RANGE;
  }
  if (v_ev) *v_ev = curve->curve.v[index];
  if (i) *i = curve->curve.i[index];
  return RRES_OK;
}

rres_status rres_intensity_extrema(const rres_intensity_curve* curve,
                                   double* i_max, double* i_min) {
  if (rres_status s = require(curve != nullptr, "null curve")) return s;
  if (i_max) *i_max = curve->curve.i_max_observed;
  if (i_min) *i_min = curve->curve.i_min_observed;
  return RRES_OK;
}

rres_status rres_count_critical_points(const rres_intensity_curve* curve,
                                       double prominence_rel, size_t* count) {
  if (rres_status s = require(curve && count, "null argument")) return s;
  return guarded([&] {
    double prom = prominence_rel > 0 ? prominence_rel : 1e-4;
    *count = rres::count_critical_points(curve->curve, prom);
  });
}

rres_status rres_process_intensity(const rres_intensity_curve* curve,
                                   rres_processed_curve** out) {
  if (rres_status s = require(curve && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_processed_curve{rres::process_intensity(curve->curve)};
  });
}

void rres_processed_curve_free(rres_processed_curve* curve) { delete curve; }

size_t rres_processed_curve_size(const rres_processed_curve* curve) {
  return curve ? curve->curve.samples.size() : 0;
}

rres_status rres_processed_curve_sample(const rres_processed_curve* curve,
                                        size_t index, double* v_ev, double* value,
                                        char* regime) {
  if (rres_status s = require(curve != nullptr, "null curve")) return s;
  if (index >= curve->curve.samples.size()) {
    g_last_error = "sample index out of range";
    return RRES_ERR_OUT_OF_RANGE;
  }
  const rres::ProcessedSample& p = curve->curve.samples[index];
  if (v_ev) *v_ev = p.v;
  if (value) *value = p.value;
  if (regime) *regime = p.regime == rres::Regime::Regular ? 'R' : 'C';
  return RRES_OK;
}

rres_status rres_processed_write_csv(const rres_processed_curve* curve,
                                     const char* path) {
  if (rres_status s = require(curve && path, "null argument")) return s;
  return guarded([&] {
    std::ofstream os(path, std::ios::binary);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("cannot open ") + path);
    rres::write_processed_csv(curve->curve, os);
    if (!os) rres::fail(rres::ErrorCode::IoError, std::string("write failed: ") + path);
  });
}

rres_status rres_recover_resonances(const rres_processed_curve* curve,
                                    double delta_v_ev, rres_resonance_list** out) {
  if (rres_status s = require(curve && out, "null argument")) return s;
  return guarded([&] {
    *out = new rres_resonance_list{
        rres::recover_resonance(curve->curve, delta_v_ev)};
  });
}

rres_status rres_recovered_report_write_json(const rres_resonance_list* list,
                                             double delta_v_ev, const char* path) {
  if (rres_status s = require(list && path, "null argument")) return s;
  return guarded([&] {
    write_text_file(path, rres::recovered_report_json(list->fits, delta_v_ev));
  });
}

}  // extern "C"
