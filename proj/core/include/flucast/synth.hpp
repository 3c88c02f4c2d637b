// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flucast/comparison.hpp"
#include "flucast/epi_week.hpp"
#include "flucast/panel.hpp"

namespace flucast {

struct SynthCountry {
  std::string name;
  Hemisphere hemisphere = Hemisphere::Northern;
  double base = 0.0;
  std::optional<double> amplitude;  // falls back to SynthScenario::amplitude
};

struct SynthCoupling {
  std::string source;
  std::string sink;
  std::size_t lag = 1;
  double strength = 0.0;
};

struct SynthScenario {
  std::vector<SynthCountry> countries;
  std::size_t n_weeks = 312;
  EpiWeek start{2012, 1};
  double amplitude = 1000.0;
  double phase_offset = 26.0;  // southern peak shift, weeks
  double season_width = 13.0;  // half-width of the seasonal bump, weeks
  double peak_week = 6.0;      // northern peak position within each 52-week season
  double timing_jitter = 0.0;  // sd of per-season peak shift, weeks
  double severity_jitter = 0.0;  // sd of per-season relative amplitude
  double noise = 0.0;          // sd of additive observation noise, counts
  double missing_rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<SynthCoupling> couplings;

  /// Throws Error(InvalidScenario).
  void validate() const;
};

/// Plain `key=value` text, one setting per line, `#` comments:
///   n_weeks=312
///   start=2012-W01
///   country=<name> <northern|southern> <base> [amplitude]
///   coupling=<source> <sink> <lag> <strength>
/// plus amplitude, phase_offset, season_width, peak_week, timing_jitter,
/// severity_jitter, noise, missing_rate and seed. Names are percent-encoded.
SynthScenario parse_scenario(std::istream& in);
SynthScenario load_scenario_file(const std::string& path);
void format_scenario(const SynthScenario& scenario, std::ostream& out);

/// Seasonal kernel value at `distance` weeks from a peak.
double raised_cosine(double distance, double half_width) noexcept;

/// Deterministic per seed. Countries keep the scenario order.
CountryPanel generate(const SynthScenario& scenario);

/// Hemisphere assignment of the scenario's countries.
HemisphereMap scenario_hemispheres(const SynthScenario& scenario);

}  // namespace flucast
