#pragma once

#include <string>
#include <vector>

#include "interferometer.hpp"
#include "potential.hpp"
#include "resonance.hpp"

namespace rres {

// Grid settings read alongside InterferometerConfig from a run config.
struct BiasGridSettings {
  double v_min = 0.0;
  double v_max = 0.0;
  double v_step = 0.0;

  std::vector<double> build() const;
};

// Parses a potential from JSON text. Accepts either a bare potential object
// or a run config holding it under the "potential" key.
PotentialSpec potential_from_json(const std::string& text);
PotentialSpec potential_from_json_file(const std::string& path);

// Parses the "interferometer" section of a run config.
void interferometer_from_json_file(const std::string& path,
                                   InterferometerConfig* cfg,
                                   BiasGridSettings* grid);

// JSON resonance report: e0, halfwidth, crossings, slopes, method, wigner
// delay at the peak.
std::string resonance_report_json(const PhaseCurve& curve,
                                  const std::vector<ResonanceFit>& fits);

std::string recovered_report_json(const std::vector<ResonanceFit>& fits,
                                  double delta_v);

}  // namespace rres
