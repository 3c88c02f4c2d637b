// SPDX-License-Identifier: Apache-2.0
#include "flucast/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "flucast/comparison.hpp"
#include "flucast/delimited.hpp"
#include "flucast/error.hpp"
#include "flucast/features.hpp"
#include "flucast/msop.hpp"
#include "flucast/panel.hpp"
#include "flucast/report_io.hpp"
#include "flucast/run_config.hpp"
#include "flucast/synth.hpp"
#include <nlohmann/json.hpp>

namespace flucast::cli {

namespace {

struct Invocation {
  RunConfig config;
  std::set<std::string> given;  // keys set by a flag or the config file
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

using Handler = std::function<void(Invocation&)>;

struct Command {
  std::string name;
  std::string help;
  std::vector<std::string> keys;
  Handler handler;
};

void require(const Invocation& inv, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (setting_value(inv.config, k).empty()) throw UsageError("--" + std::string(k) + " is required");
  }
}

void write_to(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  body(file);
  if (!file) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

std::string format_of(const Invocation& inv, const char* fallback) {
  return inv.config.format.empty() ? fallback : inv.config.format;
}

/// Left-aligned plain text table.
void emit_aligned(const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << '\n';
  }
}

void emit_rows(const std::vector<std::vector<std::string>>& rows, const std::string& format, std::ostream& out) {
  if (format == "table") {
    emit_aligned(rows, out);
    return;
  }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << quote_field(r[i], ',');
    out << '\n';
  }
}

void validate_model_config(const RunConfig& c, ModelKind kind) {
  try {
    switch (kind) {
      case ModelKind::Lstm: c.configs.lstm.validate(); break;
      case ModelKind::Forest: c.configs.forest.validate(); break;
      case ModelKind::Svr: c.configs.svr.validate(); break;
      default: break;
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void validate_spec(const FeatureSpec& spec) {
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------

void cmd_ingest(Invocation& inv) {
  require(inv, {"csv", "out"});
  const auto& c = inv.config;
  std::ifstream in(c.csv, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + c.csv + "'");
  const auto panel = ingest_panel(in, c.mapping);
  save_panel_file(panel, c.out);
  std::size_t missing = 0;
  for (std::size_t i = 0; i < panel.num_countries(); ++i) missing += panel.missing_count(i);
  if (format_of(inv, "table") == "json") {
    nlohmann::ordered_json j;
    j["countries"] = panel.num_countries();
    j["weeks"] = panel.num_weeks();
    j["start"] = panel.start().str();
    j["end"] = panel.end().str();
    j["missing_cells"] = missing;
    *inv.out << j.dump(2) << '\n';
  } else {
    *inv.out << panel.num_countries() << " countries, " << panel.num_weeks() << " weeks (" << panel.start().str()
             << " to " << panel.end().str() << "), " << missing << " missing cells\n";
  }
}

void cmd_select(Invocation& inv) {
  require(inv, {"panel"});
  const auto& c = inv.config;
  const auto panel = load_panel_file(c.panel);
  const auto sel = select_complete_countries(panel);
  if (!c.out.empty()) save_panel_file(subset_countries(panel, sel.kept), c.out);
  const auto format = format_of(inv, "table");
  write_to(c.report, *inv.out, [&](std::ostream& out) {
    if (format == "json") {
      nlohmann::ordered_json j;
      j["kept"] = sel.kept;
      j["dropped"] = nlohmann::ordered_json::array();
      for (const auto& [name, n] : sel.dropped) j["dropped"].push_back({{"country", name}, {"missing", n}});
      out << j.dump(2) << '\n';
      return;
    }
    std::vector<std::vector<std::string>> rows{{"country", "status", "missing"}};
    for (const auto& k : sel.kept) rows.push_back({k, "kept", "0"});
    for (const auto& [name, n] : sel.dropped) rows.push_back({name, "dropped", std::to_string(n)});
    emit_rows(rows, format, out);
  });
}

void cmd_synth(Invocation& inv) {
  require(inv, {"scenario", "out"});
  const auto& c = inv.config;
  const auto scenario = load_scenario_file(c.scenario);
  const auto panel = generate(scenario);
  save_panel_file(panel, c.out);
  if (!c.hemispheres_out.empty()) {
    write_to(c.hemispheres_out, *inv.out, [&](std::ostream& out) { scenario_hemispheres(scenario).save(out); });
  }
}

void cmd_featurize(Invocation& inv) {
  require(inv, {"panel", "target", "out"});
  const auto& c = inv.config;
  validate_spec(c.spec);
  const auto panel = load_panel_file(c.panel);
  save_features_file(build_features(panel, c.target, c.spec), c.out);
}

FeatureMatrix restrict_horizons(const FeatureMatrix& fm, const std::vector<std::size_t>& horizons) {
  std::vector<std::size_t> cols;
  for (auto h : horizons) {
    const auto it = std::find(fm.spec.horizons.begin(), fm.spec.horizons.end(), h);
    if (it == fm.spec.horizons.end()) {
      throw UsageError("--horizons: horizon " + std::to_string(h) + " is not in the feature file");
    }
    cols.push_back(static_cast<std::size_t>(it - fm.spec.horizons.begin()));
  }
  FeatureMatrix out = fm;
  out.spec.horizons = horizons;
  out.y = fm.y.select_cols(cols);
  return out;
}

void cmd_train(Invocation& inv) {
  require(inv, {"features", "bundle"});
  const auto& c = inv.config;
  validate_model_config(c, c.model);
  auto fm = load_features_file(c.features);
  if (inv.given.count("horizons")) fm = restrict_horizons(fm, c.spec.horizons);
  if (c.test_from) fm = split_walk_forward(fm, *c.test_from).first;
  const auto bundle = train_msop(fm, c.model, c.configs, c.seed);
  save_bundle(bundle, c.bundle);
  *inv.err << "trained " << to_string(c.model) << " for " << bundle.target_country << " on " << fm.rows()
           << " rows, " << bundle.horizon_models.size() << " horizons\n";
}

void cmd_predict(Invocation& inv) {
  require(inv, {"bundle", "features"});
  const auto& c = inv.config;
  const auto bundle = load_bundle(c.bundle);
  const auto fm = load_features_file(c.features);
  if (fm.target_country != bundle.target_country) {
    throw Error(ErrorCode::SchemaMismatch, "features are for '" + fm.target_country + "' but the bundle is for '" +
                                               bundle.target_country + "'");
  }
  const auto pred = predict_msop(bundle, fm);
  const auto format = format_of(inv, "csv");
  struct Line {
    EpiWeek origin;
    std::size_t horizon;
    double forecast;
    double actual;
  };
  std::vector<Line> lines;
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    for (std::size_t j = 0; j < bundle.horizon_models.size(); ++j) {
      const auto h = bundle.horizon_models[j].horizon;
      const auto it = std::find(fm.spec.horizons.begin(), fm.spec.horizons.end(), h);
      const double actual = it == fm.spec.horizons.end()
                                ? std::nan("")
                                : fm.y(r, static_cast<std::size_t>(it - fm.spec.horizons.begin()));
      lines.push_back({fm.origins[r], h, pred(r, j), actual});
    }
  }
  write_to(c.out, *inv.out, [&](std::ostream& out) {
    if (format == "json") {
      nlohmann::ordered_json j;
      j["country"] = bundle.target_country;
      j["model"] = to_string(bundle.model_kind);
      j["rows"] = nlohmann::ordered_json::array();
      for (const auto& l : lines) {
        nlohmann::ordered_json row;
        row["origin"] = l.origin.str();
        row["horizon"] = l.horizon;
        row["target_week"] = l.origin.plus(static_cast<std::int64_t>(l.horizon)).str();
        row["forecast"] = l.forecast;
        if (std::isfinite(l.actual)) row["actual"] = l.actual;
        else row["actual"] = nullptr;
        j["rows"].push_back(std::move(row));
      }
      out << j.dump(2) << '\n';
      return;
    }
    std::vector<std::vector<std::string>> rows{{"country", "model", "origin", "horizon", "target_week", "forecast", "actual"}};
    for (const auto& l : lines) {
      rows.push_back({bundle.target_country, std::string(to_string(bundle.model_kind)), l.origin.str(),
                      std::to_string(l.horizon), l.origin.plus(static_cast<std::int64_t>(l.horizon)).str(),
                      format_double(l.forecast), std::isfinite(l.actual) ? format_double(l.actual) : "NA"});
    }
    emit_rows(rows, format, out);
  });
}

void cmd_evaluate(Invocation& inv) {
  require(inv, {"panel", "test-from"});
  const auto& c = inv.config;
  validate_spec(c.spec);
  if (c.models.empty()) throw UsageError("--models: at least one model is required");
  if (c.seeds.empty()) throw UsageError("--seeds: at least one seed is required");
  for (auto m : c.models) validate_model_config(c, m);
  try {
    c.metric.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  const auto panel = load_panel_file(c.panel);
  ComparisonPlan plan;
  plan.targets = c.targets.empty() ? panel.countries() : c.targets;
  plan.models = c.models;
  plan.spec = c.spec;
  plan.test_from = *c.test_from;
  plan.metric = c.metric;
  plan.seeds = c.seeds;
  plan.configs = c.configs;
  if (!c.hemispheres.empty()) plan.hemispheres.merge(HemisphereMap::load_file(c.hemispheres));
  plan.jobs = std::max<std::size_t>(1, c.jobs);

  const auto result = run_comparison(panel, plan);
  const auto format = *parse_report_format(format_of(inv, "table"));
  write_to(c.report, *inv.out, [&](std::ostream& out) { emit_report(result.report, format, out); });
  if (!c.plot.empty()) {
    write_to(c.plot, *inv.out, [&](std::ostream& out) { emit_plot_data(result.plot, out); });
  }
}

void cmd_config(Invocation& inv) {
  write_to(inv.config.out, *inv.out, [&](std::ostream& out) { format_run_config(inv.config, out); });
}

const std::vector<Command>& commands() {
  static const std::vector<std::string> mapping{"country-column", "year-column", "week-column", "count-column",
                                                "delimiter"};
  static const std::vector<std::string> spec{"lag-depth", "windows", "stats", "diff", "horizons"};
  static const std::vector<std::string> models{
      "lstm-layers", "lstm-hidden", "lstm-epochs", "lstm-batch", "lstm-lr", "lstm-momentum",
      "lstm-lr-decay", "lstm-clip", "lstm-sequence", "rf-trees", "rf-max-depth", "rf-min-leaf",
      "rf-features", "rf-bootstrap", "svr-epsilon", "svr-c", "svr-epochs", "svr-lr"};
  auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  static const std::vector<Command> table = {
      {"ingest", "Read a FluNet-style CSV into a panel file", cat({"csv", "out", "format"}, mapping), cmd_ingest},
      {"select", "List countries kept or dropped for missing weeks", {"panel", "out", "report", "format"},
       cmd_select},
      {"synth", "Generate a synthetic panel from a scenario file", {"scenario", "out", "hemispheres-out"},
       cmd_synth},
      {"featurize", "Build the feature matrix for one target country",
       cat({"panel", "target", "out", "spatial"}, spec), cmd_featurize},
      {"train", "Train one model per horizon and write a bundle",
       cat({"features", "bundle", "model", "seed", "test-from", "horizons"}, models), cmd_train},
      {"predict", "Forecast every row of a feature file with a bundle", {"bundle", "features", "out", "format"},
       cmd_predict},
      {"evaluate", "Compare models with and without spatial features",
       cat(cat({"panel", "targets", "models", "test-from", "seeds", "jobs", "hemispheres", "report", "plot",
                "format", "denominator", "zero-policy", "mape-epsilon"},
               spec),
           models),
       cmd_evaluate},
      {"config", "Print the effective settings as a config file", cat(setting_keys(), {}), cmd_config},
  };
  return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flucast: multi-horizon influenza forecasting with spatial features", "flucast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flucast 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path,
                 std::string("settings file (key=value); its values override flags. Default: $") + kConfigEnv);

  // Raw flag text per command and key; converted after parsing so that errors
  // name the flag.
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    for (const auto& key : cmd.keys) {
      opts[cmd.name][key] = sub->add_option("--" + key, raw[cmd.name][key], setting_help(key));
    }
    sub->add_option("--config", config_path, "settings file; overrides flags");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Command* active = nullptr;
  for (const auto& cmd : commands()) {
    if (subs[cmd.name]->parsed()) active = &cmd;
  }
  if (!active) return kUsage;

  Invocation inv;
  inv.out = &out;
  inv.err = &err;
  try {
    for (const auto& key : active->keys) {
      if (opts[active->name][key]->count() == 0) continue;
      apply_setting(inv.config, key, raw[active->name][key], "--" + key);
      inv.given.insert(key);
    }
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv)) config_path = env;
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("--config: cannot open '" + config_path + "'");
      for (const auto& [key, value] : read_config_entries(in, config_path)) {
        apply_setting(inv.config, key, value, config_path + " key '" + key + "'");
        inv.given.insert(key);
      }
    }
    active->handler(inv);
  } catch (const UsageError& e) {
    err << "flucast " << active->name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "flucast " << active->name << ": " << e.what() << '\n';
    return category_of(e.code()) == ErrorCategory::Training ? kTrainingError : kDataError;
  } catch (const std::exception& e) {
    err << "flucast " << active->name << ": " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace flucast::cli
