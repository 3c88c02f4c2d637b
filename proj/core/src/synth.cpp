// SPDX-License-Identifier: Apache-2.0
#include "flucast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include "flucast/rng.hpp"

namespace flucast {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); }

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double number(std::string_view key, std::string_view text) {
  double v = 0.0;
  if (!parse_double(text, v)) invalid("bad number for " + std::string(key) + ": '" + std::string(text) + "'");
  return v;
}

std::size_t count(std::string_view key, std::string_view text) {
  long long v = 0;
  if (!parse_int(text, v) || v < 0) invalid("bad count for " + std::string(key) + ": '" + std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : split(text, ' ')) {
    if (!trim(w).empty()) out.emplace_back(trim(w));
  }
  return out;
}

}  // namespace

void SynthScenario::validate() const {
  if (countries.empty()) invalid("no countries");
  std::set<std::string> names;
  for (const auto& c : countries) {
    if (c.name.empty()) invalid("empty country name");
    if (!names.insert(c.name).second) invalid("duplicate country '" + c.name + "'");
    if (!finite_nonneg(c.base)) invalid("base level of '" + c.name + "' must be >= 0");
    if (c.amplitude && !finite_nonneg(*c.amplitude)) invalid("amplitude of '" + c.name + "' must be >= 0");
  }
  if (n_weeks == 0) invalid("n_weeks must be positive");
  if (!finite_nonneg(amplitude)) invalid("amplitude must be >= 0");
  if (!std::isfinite(phase_offset)) invalid("phase_offset must be finite");
  if (!(season_width > 0.0) || !std::isfinite(season_width)) invalid("season_width must be positive");
  if (!std::isfinite(peak_week)) invalid("peak_week must be finite");
  if (!finite_nonneg(timing_jitter) || !finite_nonneg(severity_jitter) || !finite_nonneg(noise)) {
    invalid("jitter and noise scales must be >= 0");
  }
  if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) invalid("missing_rate must lie in [0, 1]");
  if (!couplings.empty() && n_weeks < 104) invalid("coupled scenarios need n_weeks >= 104");
  for (const auto& k : couplings) {
    if (!names.count(k.source)) invalid("coupling source '" + k.source + "' is not a country");
    if (!names.count(k.sink)) invalid("coupling sink '" + k.sink + "' is not a country");
    if (k.lag < 1) invalid("coupling lag must be >= 1");
    if (!(k.strength >= 0.0 && k.strength <= 1.0)) invalid("coupling strength must lie in [0, 1]");
  }
}

SynthScenario parse_scenario(std::istream& in) {
  SynthScenario s;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n_countries;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(std::string_view(line).substr(0, std::min(line.find('#'), line.size())));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) invalid("line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    try {
      if (key == "country") {
        const auto w = words(value);
        if (w.size() < 3 || w.size() > 4) invalid("country needs <name> <hemisphere> <base> [amplitude]");
        SynthCountry c;
        c.name = decode_token(w[0]);
        const auto h = parse_hemisphere(w[1]);
        if (!h) invalid("bad hemisphere '" + w[1] + "'");
        c.hemisphere = *h;
        c.base = number("base", w[2]);
        if (w.size() == 4) c.amplitude = number("amplitude", w[3]);
        s.countries.push_back(std::move(c));
      } else if (key == "coupling") {
        const auto w = words(value);
        if (w.size() != 4) invalid("coupling needs <source> <sink> <lag> <strength>");
        s.couplings.push_back({decode_token(w[0]), decode_token(w[1]), count("lag", w[2]), number("strength", w[3])});
      } else if (key == "n_countries") {
        n_countries = count(key, value);
      } else if (key == "n_weeks") {
        s.n_weeks = count(key, value);
      } else if (key == "start") {
        const auto w = EpiWeek::parse(value);
        if (!w) invalid("bad start week '" + std::string(value) + "'");
        s.start = *w;
      } else if (key == "seed") {
        long long v = 0;
        if (!parse_int(value, v)) invalid("bad seed");
        s.seed = static_cast<std::uint64_t>(v);
      } else if (key == "amplitude") {
        s.amplitude = number(key, value);
      } else if (key == "phase_offset") {
        s.phase_offset = number(key, value);
      } else if (key == "season_width") {
        s.season_width = number(key, value);
      } else if (key == "peak_week") {
        s.peak_week = number(key, value);
      } else if (key == "timing_jitter") {
        s.timing_jitter = number(key, value);
      } else if (key == "severity_jitter") {
        s.severity_jitter = number(key, value);
      } else if (key == "noise") {
        s.noise = number(key, value);
      } else if (key == "missing_rate") {
        s.missing_rate = number(key, value);
      } else {
        invalid("unknown key '" + std::string(key) + "'");
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidScenario) throw;
      throw Error(ErrorCode::InvalidScenario, "line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  if (n_countries && *n_countries != s.countries.size()) {
    invalid("n_countries=" + std::to_string(*n_countries) + " but " + std::to_string(s.countries.size()) +
            " countries listed");
  }
  s.validate();
  return s;
}

SynthScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario '" + path + "'");
  return parse_scenario(in);
}

void format_scenario(const SynthScenario& s, std::ostream& out) {
  out << "n_countries=" << s.countries.size() << '\n'
      << "n_weeks=" << s.n_weeks << '\n'
      << "start=" << s.start.str() << '\n'
      << "seed=" << s.seed << '\n'
      << "amplitude=" << format_double(s.amplitude) << '\n'
      << "phase_offset=" << format_double(s.phase_offset) << '\n'
      << "season_width=" << format_double(s.season_width) << '\n'
      << "peak_week=" << format_double(s.peak_week) << '\n'
      << "timing_jitter=" << format_double(s.timing_jitter) << '\n'
      << "severity_jitter=" << format_double(s.severity_jitter) << '\n'
      << "noise=" << format_double(s.noise) << '\n'
      << "missing_rate=" << format_double(s.missing_rate) << '\n';
  for (const auto& c : s.countries) {
    out << "country=" << encode_token(c.name) << ' ' << to_string(c.hemisphere) << ' ' << format_double(c.base);
    if (c.amplitude) out << ' ' << format_double(*c.amplitude);
    out << '\n';
  }
  for (const auto& k : s.couplings) {
    out << "coupling=" << encode_token(k.source) << ' ' << encode_token(k.sink) << ' ' << k.lag << ' '
        << format_double(k.strength) << '\n';
  }
}

double raised_cosine(double distance, double half_width) noexcept {
  if (std::abs(distance) >= half_width) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * distance / half_width));
}

CountryPanel generate(const SynthScenario& s) {
  s.validate();
  const std::size_t nc = s.countries.size();
  const std::size_t nw = s.n_weeks;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nc; ++i) index[s.countries[i].name] = i;

  // Seasons that can touch [0, nw): one before the first through one after the last.
  const long first_season = -1;
  const long last_season = static_cast<long>(nw / 52) + 1;

  Rng rng(derive_seed(s.seed, 0));
  Matrix seasonal(nc, nw, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& country = s.countries[c];
    const double amp = country.amplitude.value_or(s.amplitude);
    const double phase = country.hemisphere == Hemisphere::Southern ? s.phase_offset : 0.0;
    for (long season = first_season; season <= last_season; ++season) {
      const double shift = s.timing_jitter > 0.0 ? s.timing_jitter * rng.normal() : 0.0;
      const double scale = s.severity_jitter > 0.0 ? std::max(0.0, 1.0 + s.severity_jitter * rng.normal()) : 1.0;
      const double peak = s.peak_week + phase + 52.0 * static_cast<double>(season) + shift;
      for (std::size_t t = 0; t < nw; ++t) {
        seasonal(c, t) += amp * scale * raised_cosine(static_cast<double>(t) - peak, s.season_width);
      }
    }
  }

  // Latent series built week by week so couplings see lagged latent values.
  Matrix latent(nc, nw, 0.0);
  Matrix values(nc, nw, 0.0);
  for (std::size_t t = 0; t < nw; ++t) {
    for (std::size_t c = 0; c < nc; ++c) {
      double v = s.countries[c].base + seasonal(c, t);
      for (const auto& k : s.couplings) {
        if (index[k.sink] != c || t < k.lag) continue;
        v += k.strength * latent(index[k.source], t - k.lag);
      }
      if (s.noise > 0.0) v += s.noise * rng.normal();
      latent(c, t) = std::max(0.0, v);
      values(c, t) = std::round(latent(c, t));
    }
  }

  std::vector<std::uint8_t> missing(nc * nw, 0);
  if (s.missing_rate > 0.0) {
    Rng miss(derive_seed(s.seed, 1));
    for (auto& m : missing) m = miss.uniform() < s.missing_rate ? 1 : 0;
  }

  std::vector<std::string> names;
  for (const auto& c : s.countries) names.push_back(c.name);
  return CountryPanel(std::move(names), s.start, std::move(values), std::move(missing));
}

HemisphereMap scenario_hemispheres(const SynthScenario& s) {
  HemisphereMap m;
  for (const auto& c : s.countries) m.set(c.name, c.hemisphere);
  return m;
}

}  // namespace flucast
