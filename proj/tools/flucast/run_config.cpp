// SPDX-License-Identifier: Apache-2.0
#include "flucast/run_config.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>

#include "flucast/delimited.hpp"

namespace flucast::cli {

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Setting {
  std::string key;
  std::string help;
  Setter set;
  Getter get;
};

struct BadValue {
  std::string what;
};

[[noreturn]] void bad(std::string what) { throw BadValue{std::move(what)}; }

std::size_t to_size(std::string_view v) {
  long long n = 0;
  if (!parse_int(v, n) || n < 0) bad("expected a non-negative integer, got '" + std::string(v) + "'");
  return static_cast<std::size_t>(n);
}

std::uint64_t to_u64(std::string_view v) {
  std::uint64_t n = 0;
  const auto t = trim(v);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string_view::npos) {
    bad("expected an unsigned integer, got '" + std::string(v) + "'");
  }
  for (char c : t) n = n * 10 + static_cast<std::uint64_t>(c - '0');
  return n;
}

double to_double(std::string_view v) {
  double d = 0.0;
  if (!parse_double(v, d)) bad("expected a number, got '" + std::string(v) + "'");
  return d;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad("expected true or false, got '" + std::string(v) + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::vector<std::string> to_list(std::string_view v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) {
    const auto t = trim(item);
    if (t.empty()) bad("empty item in list '" + std::string(v) + "'");
    out.push_back(decode_token(t));
  }
  return out;
}

std::string from_list(const std::vector<std::string>& items) {
  std::vector<std::string> enc;
  for (const auto& s : items) enc.push_back(encode_token(s));
  return join(enc, ",");
}

template <typename T, typename F>
std::vector<T> map_list(std::string_view v, F f) {
  std::vector<T> out;
  for (const auto& item : to_list(v)) out.push_back(f(item));
  return out;
}

template <typename T, typename F>
std::string join_mapped(const std::vector<T>& items, F f) {
  std::vector<std::string> parts;
  for (const auto& item : items) parts.push_back(f(item));
  return join(parts, ",");
}

ModelKind to_model(std::string_view v) {
  const auto k = parse_model_kind(v);
  if (!k) bad("unknown model '" + std::string(v) + "' (lstm, rf, svr, naive, seasonal52)");
  return *k;
}

char to_delimiter(std::string_view v) {
  if (v == "tab" || v == "\\t") return '\t';
  if (v == "comma") return ',';
  if (v == "semicolon") return ';';
  if (v.size() == 1 && v[0] != '"') return v[0];
  bad("delimiter must be one character, 'tab', 'comma' or 'semicolon'");
}

std::string from_delimiter(char c) {
  if (c == '\t') return "tab";
  if (c == ',') return "comma";
  if (c == ';') return "semicolon";
  return std::string(1, c);
}

std::string fraction_text(double f) {
  auto s = format_double(f);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

#define PATH_SETTING(name, member, help) \
  Setting{name, help, [](RunConfig& c, std::string_view v) { c.member = std::string(v); }, \
          [](const RunConfig& c) { return c.member; }}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      PATH_SETTING("csv", csv, "FluNet-style CSV to ingest"),
      PATH_SETTING("panel", panel, "panel file (FLUPANEL v1)"),
      PATH_SETTING("out", out, "output file or directory"),
      PATH_SETTING("scenario", scenario, "synthetic scenario file"),
      PATH_SETTING("features", features, "feature matrix file"),
      PATH_SETTING("bundle", bundle, "model bundle directory"),
      PATH_SETTING("report", report, "report output file (default: stdout)"),
      PATH_SETTING("plot", plot, "forecast-vs-actual plot data output file"),
      PATH_SETTING("hemispheres", hemispheres, "country=northern|southern file merged over built-in defaults"),
      PATH_SETTING("hemispheres-out", hemispheres_out, "write the scenario's hemisphere map here"),
      {"country-column", "CSV header of the country column",
       [](RunConfig& c, std::string_view v) { c.mapping.country = std::string(v); },
       [](const RunConfig& c) { return c.mapping.country; }},
      {"year-column", "CSV header of the ISO year column",
       [](RunConfig& c, std::string_view v) { c.mapping.year = std::string(v); },
       [](const RunConfig& c) { return c.mapping.year; }},
      {"week-column", "CSV header of the ISO week column",
       [](RunConfig& c, std::string_view v) { c.mapping.week = std::string(v); },
       [](const RunConfig& c) { return c.mapping.week; }},
      {"count-column", "CSV header of the case-count column",
       [](RunConfig& c, std::string_view v) { c.mapping.count = std::string(v); },
       [](const RunConfig& c) { return c.mapping.count; }},
      {"delimiter", "CSV field delimiter (one character, tab, comma, semicolon)",
       [](RunConfig& c, std::string_view v) { c.mapping.delimiter = to_delimiter(v); },
       [](const RunConfig& c) { return from_delimiter(c.mapping.delimiter); }},
      {"lag-depth", "lag depth L", [](RunConfig& c, std::string_view v) { c.spec.lag_depth = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.spec.lag_depth); }},
      {"windows", "rolling windows, comma separated",
       [](RunConfig& c, std::string_view v) { c.spec.windows = map_list<std::size_t>(v, to_size); },
       [](const RunConfig& c) {
         return join_mapped(c.spec.windows, [](std::size_t w) { return std::to_string(w); });
       }},
      {"stats", "rolling statistics (mean, median, std, max, min)",
       [](RunConfig& c, std::string_view v) {
         c.spec.stats = map_list<RollingStat>(v, [](const std::string& s) {
           const auto st = parse_rolling_stat(s);
           if (!st) bad("unknown statistic '" + s + "'");
           return *st;
         });
       },
       [](const RunConfig& c) {
         return join_mapped(c.spec.stats, [](RollingStat s) { return std::string(to_string(s)); });
       }},
      {"diff", "include first differences", [](RunConfig& c, std::string_view v) {
         c.spec.include_first_diff = to_bool(v);
       },
       [](const RunConfig& c) { return from_bool(c.spec.include_first_diff); }},
      {"spatial", "include other countries' lags (featurize)",
       [](RunConfig& c, std::string_view v) { c.spec.spatial = to_bool(v); },
       [](const RunConfig& c) { return from_bool(c.spec.spatial); }},
      {"horizons", "forecast horizons in weeks, comma separated",
       [](RunConfig& c, std::string_view v) { c.spec.horizons = map_list<std::size_t>(v, to_size); },
       [](const RunConfig& c) {
         return join_mapped(c.spec.horizons, [](std::size_t h) { return std::to_string(h); });
       }},
      {"target", "target country", [](RunConfig& c, std::string_view v) { c.target = decode_token(v); },
       [](const RunConfig& c) { return encode_token(c.target); }},
      {"targets", "target countries, comma separated",
       [](RunConfig& c, std::string_view v) { c.targets = to_list(v); },
       [](const RunConfig& c) { return from_list(c.targets); }},
      {"model", "model kind (lstm, rf, svr, naive, seasonal52)",
       [](RunConfig& c, std::string_view v) { c.model = to_model(v); },
       [](const RunConfig& c) { return std::string(to_string(c.model)); }},
      {"models", "model kinds, comma separated",
       [](RunConfig& c, std::string_view v) { c.models = map_list<ModelKind>(v, to_model); },
       [](const RunConfig& c) {
         return join_mapped(c.models, [](ModelKind k) { return std::string(to_string(k)); });
       }},
      {"lstm-layers", "LSTM stacked layers",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.layers = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.lstm.layers); }},
      {"lstm-hidden", "LSTM hidden units per layer",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.hidden_size = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.lstm.hidden_size); }},
      {"lstm-epochs", "LSTM training epochs",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.epochs = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.lstm.epochs); }},
      {"lstm-batch", "LSTM minibatch size",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.batch_size = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.lstm.batch_size); }},
      {"lstm-lr", "LSTM learning rate",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.learning_rate = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.lstm.learning_rate); }},
      {"lstm-momentum", "LSTM SGD momentum",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.momentum = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.lstm.momentum); }},
      {"lstm-lr-decay", "LSTM per-epoch learning-rate multiplier",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.lr_decay = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.lstm.lr_decay); }},
      {"lstm-clip", "LSTM global gradient-norm clip (0 disables)",
       [](RunConfig& c, std::string_view v) { c.configs.lstm.gradient_clip = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.lstm.gradient_clip); }},
      {"lstm-sequence", "LSTM input layout (windowed, flat)",
       [](RunConfig& c, std::string_view v) {
         if (v == "windowed") c.configs.lstm.sequence_mode = SequenceMode::Windowed;
         else if (v == "flat") c.configs.lstm.sequence_mode = SequenceMode::Flat;
         else bad("expected windowed or flat, got '" + std::string(v) + "'");
       },
       [](const RunConfig& c) { return std::string(to_string(c.configs.lstm.sequence_mode)); }},
      {"rf-trees", "random forest tree count",
       [](RunConfig& c, std::string_view v) { c.configs.forest.n_trees = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.forest.n_trees); }},
      {"rf-max-depth", "random forest max depth (0 = unlimited)",
       [](RunConfig& c, std::string_view v) { c.configs.forest.max_depth = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.forest.max_depth); }},
      {"rf-min-leaf", "random forest minimum leaf size",
       [](RunConfig& c, std::string_view v) { c.configs.forest.min_leaf = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.forest.min_leaf); }},
      {"rf-features", "features tried per split: a fraction (0.33) or a count (40)",
       [](RunConfig& c, std::string_view v) {
         if (v.find_first_of(".eE") != std::string_view::npos) c.configs.forest.features_per_split = to_double(v);
         else c.configs.forest.features_per_split = to_size(v);
       },
       [](const RunConfig& c) {
         const auto& f = c.configs.forest.features_per_split;
         if (const auto* frac = std::get_if<double>(&f)) return fraction_text(*frac);
         return std::to_string(std::get<std::size_t>(f));
       }},
      {"rf-bootstrap", "bootstrap rows per tree",
       [](RunConfig& c, std::string_view v) { c.configs.forest.bootstrap = to_bool(v); },
       [](const RunConfig& c) { return from_bool(c.configs.forest.bootstrap); }},
      {"svr-epsilon", "SVR tube half-width (standardized units)",
       [](RunConfig& c, std::string_view v) { c.configs.svr.epsilon = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.svr.epsilon); }},
      {"svr-c", "SVR loss weight C",
       [](RunConfig& c, std::string_view v) { c.configs.svr.c = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.svr.c); }},
      {"svr-epochs", "SVR SGD epochs",
       [](RunConfig& c, std::string_view v) { c.configs.svr.epochs = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.configs.svr.epochs); }},
      {"svr-lr", "SVR base step size",
       [](RunConfig& c, std::string_view v) { c.configs.svr.learning_rate = to_double(v); },
       [](const RunConfig& c) { return format_double(c.configs.svr.learning_rate); }},
      {"test-from", "first forecast origin of the test period (YYYY-Www)",
       [](RunConfig& c, std::string_view v) {
         if (trim(v).empty()) {
           c.test_from.reset();
           return;
         }
         const auto w = EpiWeek::parse(trim(v));
         if (!w) bad("invalid epi-week '" + std::string(v) + "' (expected YYYY-Www with a week valid for that year)");
         c.test_from = *w;
       },
       [](const RunConfig& c) { return c.test_from ? c.test_from->str() : std::string(); }},
      {"denominator", "MAPE denominator (current, previous)",
       [](RunConfig& c, std::string_view v) {
         if (v == "current") c.metric.denominator = Denominator::Current;
         else if (v == "previous") c.metric.denominator = Denominator::Previous;
         else bad("expected current or previous, got '" + std::string(v) + "'");
       },
       [](const RunConfig& c) {
         return std::string(c.metric.denominator == Denominator::Current ? "current" : "previous");
       }},
      {"zero-policy", "MAPE handling of zero denominators (skip, epsilon)",
       [](RunConfig& c, std::string_view v) {
         if (v == "skip") c.metric.zero_policy = ZeroPolicy::Skip;
         else if (v == "epsilon") c.metric.zero_policy = ZeroPolicy::Epsilon;
         else bad("expected skip or epsilon, got '" + std::string(v) + "'");
       },
       [](const RunConfig& c) { return std::string(c.metric.zero_policy == ZeroPolicy::Skip ? "skip" : "epsilon"); }},
      {"mape-epsilon", "denominator used for zeros under zero-policy=epsilon",
       [](RunConfig& c, std::string_view v) { c.metric.epsilon = to_double(v); },
       [](const RunConfig& c) { return format_double(c.metric.epsilon); }},
      {"seed", "training seed", [](RunConfig& c, std::string_view v) { c.seed = to_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"seeds", "training seeds, comma separated (median reported)",
       [](RunConfig& c, std::string_view v) { c.seeds = map_list<std::uint64_t>(v, to_u64); },
       [](const RunConfig& c) {
         return join_mapped(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
       }},
      {"jobs", "worker threads for evaluate", [](RunConfig& c, std::string_view v) { c.jobs = to_size(v); },
       [](const RunConfig& c) { return std::to_string(c.jobs); }},
      {"format", "report format (table, csv, json)",
       [](RunConfig& c, std::string_view v) {
         if (!v.empty() && v != "table" && v != "csv" && v != "json") {
           bad("expected table, csv or json, got '" + std::string(v) + "'");
         }
         c.format = std::string(v);
       },
       [](const RunConfig& c) { return c.format; }},
  };
  return table;
}

#undef PATH_SETTING

const Setting* find_setting(std::string_view key) {
  for (const auto& s : settings()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : settings()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value, std::string_view source) {
  const auto* s = find_setting(key);
  if (!s) throw UsageError(std::string(source) + ": unknown setting '" + std::string(key) + "'");
  try {
    s->set(config, value);
  } catch (const BadValue& e) {
    throw UsageError(std::string(source) + ": " + e.what);
  }
}

std::string setting_value(const RunConfig& config, std::string_view key) {
  const auto* s = find_setting(key);
  if (!s) throw UsageError("unknown setting '" + std::string(key) + "'");
  return s->get(config);
}

std::string setting_help(std::string_view key) {
  const auto* s = find_setting(key);
  return s ? s->help : std::string();
}

std::vector<std::pair<std::string, std::string>> read_config_entries(std::istream& in, std::string_view origin) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    const auto where = std::string(origin) + " line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw UsageError(where + ": expected key=value");
    const auto key = std::string(trim(body.substr(0, eq)));
    if (!find_setting(key)) throw UsageError(where + ": unknown setting '" + key + "'");
    entries.emplace_back(key, std::string(trim(body.substr(eq + 1))));
  }
  return entries;
}

RunConfig parse_run_config(std::istream& in, std::string_view origin) {
  RunConfig config;
  for (const auto& [key, value] : read_config_entries(in, origin)) {
    apply_setting(config, key, value, std::string(origin) + " key '" + key + "'");
  }
  return config;
}

void format_run_config(const RunConfig& config, std::ostream& out) {
  for (const auto& s : settings()) out << s.key << '=' << s.get(config) << '\n';
}

}  // namespace flucast::cli
