/* rres — reflection resonance toolkit, C API.
 *
 * Every object is an opaque handle created and destroyed here; every fallible
 * call returns an rres_status (RRES_OK on success) and leaves a human-readable
 * message in rres_last_error() (thread-local). Pointers returned through out
 * parameters are owned by the caller and released with the matching _free.
 */
#ifndef RRES_H
#define RRES_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rres_status {
  RRES_OK = 0,
  RRES_ERR_INVALID_ARGUMENT = 1,
  RRES_ERR_PARSE = 2,
  RRES_ERR_IO = 3,
  RRES_ERR_ENERGY_BELOW_LEFT_ASYMPTOTE = 4,
  RRES_ERR_TRANSMISSION_CHANNEL_OPEN = 5,
  RRES_ERR_NO_CONVERGENCE = 6,
  RRES_ERR_GRID_EXPLODED = 7,
  RRES_ERR_NO_ZERO_CROSSING = 8,
  RRES_ERR_MULTIPLE_CROSSINGS = 9,
  RRES_ERR_OUT_OF_RANGE = 10,
  RRES_ERR_DEGENERATE_INTENSITY = 11,
  RRES_ERR_PEAKS_NOT_SEPARATED = 12,
  RRES_ERR_INTERNAL = 13
} rres_status;

/* Spec-level error name for a status (e.g. "TransmissionChannelOpen"). */
const char* rres_status_name(rres_status status);

/* Message for the most recent failure on this thread. */
const char* rres_last_error(void);

typedef struct rres_potential rres_potential;
typedef struct rres_phase_curve rres_phase_curve;
typedef struct rres_resonance_list rres_resonance_list;
typedef struct rres_intensity_curve rres_intensity_curve;
typedef struct rres_processed_curve rres_processed_curve;

/* ---- potentials ---------------------------------------------------- */

/* JSON may be a bare potential object or a run config with a "potential"
 * key; fields: shape, v0/v1/l (washboard), x_min, x_max, v_left_asymptote,
 * v_right_asymptote, mass_me, optional hbar2_over_2me. */
rres_status rres_potential_from_json_file(const char* path, rres_potential** out);
rres_status rres_potential_from_json(const char* text, rres_potential** out);
void rres_potential_free(rres_potential* pot);

rres_status rres_potential_evaluate(const rres_potential* pot, double x_nm,
                                    double* v_ev);
rres_status rres_potential_bias(const rres_potential* pot, double bias_ev,
                                rres_potential** out);
rres_status rres_potential_range(const rres_potential* pot, double* x_min,
                                 double* x_max, double* v_left, double* v_right);

/* Uniform profile samples x_nm,V_eV; n >= 1 (n == 1 emits x_lo only). */
rres_status rres_potential_write_profile_csv(const rres_potential* pot,
                                             double x_lo, double x_hi, size_t n,
                                             const char* path);

/* ---- reflection ---------------------------------------------------- */

typedef struct rres_reflection_point {
  double energy_ev;
  double r_re, r_im;   /* reflection amplitude, |r| = 1 in the reflecting band */
  double phi_rad;      /* principal value arg(r)/2 in (-pi/2, pi/2] */
  double a, b;         /* Re/Im of the scaled t11 */
  double t11_sq_log;   /* ln |t11|^2 (physical) */
} rres_reflection_point;

/* n_slices <= 0 selects the default (8192). */
rres_status rres_reflection(const rres_potential* pot, double energy_ev,
                            int n_slices, rres_reflection_point* out);

/* Doubles the slice count from 256 until the phase settles below tol_rad. */
rres_status rres_reflection_converged(const rres_potential* pot, double energy_ev,
                                      double tol_rad, rres_reflection_point* out,
                                      size_t* n_slices_used);

/* ---- phase curves --------------------------------------------------- */

typedef struct rres_scan_options {
  double jump_tol_rad;   /* <= 0 -> 0.3 */
  int initial_points;    /* <= 0 -> 129 */
  int n_slices;          /* <= 0 -> 8192 */
  int min_peak_samples;  /* <= 0 -> 20 */
  size_t max_samples;    /* 0 -> 1e6 */
} rres_scan_options;

rres_status rres_scan_phase(const rres_potential* pot, double e_lo, double e_hi,
                            const rres_scan_options* opts_or_null,
                            rres_phase_curve** out);
void rres_phase_curve_free(rres_phase_curve* curve);

size_t rres_phase_curve_size(const rres_phase_curve* curve);

typedef struct rres_phase_sample {
  double energy_ev;
  double phi_rad;      /* unwrapped modulo pi */
  double dphi_de;      /* rad/eV */
  double a, b;
  double inv_t11_sq;   /* normalized to unit curve maximum */
} rres_phase_sample;

rres_status rres_phase_curve_sample(const rres_phase_curve* curve, size_t index,
                                    rres_phase_sample* out);

/* CSV with header E_eV,phi_rad,dphi_dE,a,b,inv_t11sq at %.17g. */
rres_status rres_phase_curve_write_csv(const rres_phase_curve* curve,
                                       const char* path);

/* Wigner delay hbar * dphi/dE in seconds at an interpolated energy. */
rres_status rres_wigner_delay(const rres_phase_curve* curve, double energy_ev,
                              double* delay_s);

/* ---- resonance fits -------------------------------------------------- */

typedef struct rres_resonance_fit {
  double e0_ev;
  double halfwidth_ev;
  double e_r_ev, e_i_ev; /* zero crossings of Re/Im t11 */
  double alpha, beta;    /* local slopes at the crossings */
  double peak_dphi_de;
  int method;            /* 0 = zero crossing, 1 = peak FWHM */
} rres_resonance_fit;

rres_status rres_find_resonances(const rres_phase_curve* curve,
                                 rres_resonance_list** out);
void rres_resonance_list_free(rres_resonance_list* list);
size_t rres_resonance_list_size(const rres_resonance_list* list);
rres_status rres_resonance_list_get(const rres_resonance_list* list, size_t index,
                                    rres_resonance_fit* out);

rres_status rres_fit_resonance(const rres_phase_curve* curve, double window_lo,
                               double window_hi, rres_resonance_fit* out);

/* Normalized 1/|t11|^2 over a window plus the quadratic-fit residual of its
 * inverse. Call with buffers of capacity `cap`; *n_out gets the sample count
 * (query it first with cap = 0). */
rres_status rres_lorentz_profile(const rres_phase_curve* curve, double window_lo,
                                 double window_hi, double* energy_ev,
                                 double* inv_t11_sq_norm, double* parabola_residual,
                                 size_t cap, size_t* n_out);

/* JSON report for the fits of a curve (includes Wigner delays). */
rres_status rres_resonance_report_write_json(const rres_phase_curve* curve,
                                             const rres_resonance_list* list,
                                             const char* path);

/* ---- interferometer -------------------------------------------------- */

typedef struct rres_interferometer_config {
  double a1, a2;           /* arm amplitudes, > 0 */
  double alpha1, alpha2;   /* arm phases, rad */
  double delta_v_ev;       /* bias separation, > 0 */
  double e_incident_ev;
  double noise_sigma;      /* additive gaussian noise on I; 0 = off */
  uint64_t seed;
} rres_interferometer_config;

/* Loads the "interferometer" section of a run config plus its bias grid. */
rres_status rres_interferometer_config_from_json_file(
    const char* path, rres_interferometer_config* cfg, double* v_min,
    double* v_max, double* v_step);

rres_status rres_simulate_intensity(const rres_potential* pot,
                                    const rres_interferometer_config* cfg,
                                    const double* v_grid, size_t n,
                                    rres_intensity_curve** out);
void rres_intensity_curve_free(rres_intensity_curve* curve);

rres_status rres_intensity_from_arrays(const double* v, const double* i, size_t n,
                                       rres_intensity_curve** out);
rres_status rres_intensity_read_csv(const char* path, rres_intensity_curve** out);
rres_status rres_intensity_write_csv(const rres_intensity_curve* curve,
                                     const char* path);
size_t rres_intensity_curve_size(const rres_intensity_curve* curve);
rres_status rres_intensity_curve_sample(const rres_intensity_curve* curve,
                                        size_t index, double* v_ev, double* i);
rres_status rres_intensity_extrema(const rres_intensity_curve* curve,
                                   double* i_max, double* i_min);

/* Interior extrema of I(V) above a relative prominence (<= 0 -> 1e-4). */
rres_status rres_count_critical_points(const rres_intensity_curve* curve,
                                       double prominence_rel, size_t* count);

rres_status rres_process_intensity(const rres_intensity_curve* curve,
                                   rres_processed_curve** out);
void rres_processed_curve_free(rres_processed_curve* curve);
size_t rres_processed_curve_size(const rres_processed_curve* curve);

/* regime: 'R' regular, 'C' critical point. */
rres_status rres_processed_curve_sample(const rres_processed_curve* curve,
                                        size_t index, double* v_ev, double* value,
                                        char* regime);
rres_status rres_processed_write_csv(const rres_processed_curve* curve,
                                     const char* path);

/* Two-peak recovery; the arm-1 (resonance-bias) peak comes first. */
rres_status rres_recover_resonances(const rres_processed_curve* curve,
                                    double delta_v_ev, rres_resonance_list** out);

rres_status rres_recovered_report_write_json(const rres_resonance_list* list,
                                             double delta_v_ev, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RRES_H */
