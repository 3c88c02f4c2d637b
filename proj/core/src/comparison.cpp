// SPDX-License-Identifier: Apache-2.0
#include "flucast/comparison.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "flucast/delimited.hpp"
#include "flucast/error.hpp"

namespace flucast {

std::string_view to_string(Hemisphere h) noexcept { return h == Hemisphere::Northern ? "northern" : "southern"; }

std::optional<Hemisphere> parse_hemisphere(std::string_view text) noexcept {
  if (text == "northern") return Hemisphere::Northern;
  if (text == "southern") return Hemisphere::Southern;
  return std::nullopt;
}

HemisphereMap HemisphereMap::defaults() {
  HemisphereMap m;
  for (const char* c : {"Australia", "Brazil"}) m.set(c, Hemisphere::Southern);
  for (const char* c : {"China", "Japan", "UK", "USA", "United Kingdom of Great Britain and Northern Ireland",
                        "United States of America"}) {
    m.set(c, Hemisphere::Northern);
  }
  return m;
}

HemisphereMap HemisphereMap::parse(std::istream& in) {
  HemisphereMap m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.rfind('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "hemisphere map line " + std::to_string(line_no) + ": expected country=hemisphere");
    }
    const auto h = parse_hemisphere(trim(body.substr(eq + 1)));
    if (!h) throw Error(ErrorCode::InvalidConfig, "hemisphere map line " + std::to_string(line_no) + ": bad hemisphere");
    m.set(std::string(trim(body.substr(0, eq))), *h);
  }
  return m;
}

HemisphereMap HemisphereMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return parse(in);
}

void HemisphereMap::save(std::ostream& out) const {
  for (const auto& [country, h] : entries_) out << country << '=' << to_string(h) << '\n';
}

Hemisphere HemisphereMap::at(const std::string& country) const {
  auto it = entries_.find(country);
  if (it == entries_.end()) throw Error(ErrorCode::UnknownCountry, "no hemisphere recorded for '" + country + "'");
  return it->second;
}

void HemisphereMap::merge(const HemisphereMap& other) {
  for (const auto& [c, h] : other.entries_) entries_[c] = h;
}

const ReportRow* ForecastReport::find(const std::string& country, ModelKind model, std::size_t horizon,
                                      bool spatial) const {
  for (const auto& r : rows) {
    if (r.country == country && r.model == model && r.horizon == horizon && r.spatial == spatial) return &r;
  }
  return nullptr;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::DimensionMismatch, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct Split {
  FeatureMatrix train;
  FeatureMatrix test;
};

struct WorkItem {
  std::size_t split;  // index into splits
  std::size_t model;  // index into plan.models
  std::size_t seed;   // index into plan.seeds
};

}  // namespace

ComparisonResult run_comparison(const CountryPanel& panel, const ComparisonPlan& plan) {
  if (plan.targets.empty() || plan.models.empty() || plan.seeds.empty()) {
    throw Error(ErrorCode::InvalidConfig, "comparison needs at least one target, model and seed");
  }
  plan.metric.validate();
  plan.spec.validate();

  // splits[2 * target + (spatial ? 0 : 1)]
  std::vector<Split> splits;
  std::vector<Hemisphere> hemispheres;
  for (const auto& target : plan.targets) {
    hemispheres.push_back(plan.hemispheres.at(target));
    for (bool spatial : {true, false}) {
      FeatureSpec spec = plan.spec;
      spec.spatial = spatial;
      try {
        auto fm = build_features(panel, target, spec);
        auto [train, test] = split_walk_forward(fm, plan.test_from);
        splits.push_back({std::move(train), std::move(test)});
      } catch (const Error& e) {
        throw Error(e.code(), target + (spatial ? " (with spatial)" : " (without spatial)") + ": " + e.message());
      }
    }
  }

  std::vector<WorkItem> items;
  for (std::size_t s = 0; s < splits.size(); ++s)
    for (std::size_t m = 0; m < plan.models.size(); ++m)
      for (std::size_t k = 0; k < plan.seeds.size(); ++k) items.push_back({s, m, k});

  std::vector<Matrix> forecasts(items.size());
  std::vector<std::exception_ptr> failures(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const auto& item = items[i];
      const auto& split = splits[item.split];
      try {
        const auto bundle = train_msop(split.train, plan.models[item.model], plan.configs, plan.seeds[item.seed]);
        forecasts[i] = predict_msop(bundle, split.test);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(plan.jobs, items.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!failures[i]) continue;
    const auto& item = items[i];
    const std::string where = plan.targets[item.split / 2] + "/" + std::string(to_string(plan.models[item.model])) +
                              (item.split % 2 == 0 ? "/with" : "/without") + "/seed " +
                              std::to_string(plan.seeds[item.seed]);
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.message());
    }
  }

  auto item_index = [&](std::size_t split, std::size_t model, std::size_t seed) {
    return (split * plan.models.size() + model) * plan.seeds.size() + seed;
  };

  ComparisonResult result;
  for (std::size_t t = 0; t < plan.targets.size(); ++t) {
    for (std::size_t m = 0; m < plan.models.size(); ++m) {
      for (std::size_t j = 0; j < plan.spec.horizons.size(); ++j) {
        for (bool spatial : {true, false}) {
          const std::size_t s = 2 * t + (spatial ? 0 : 1);
          const auto& test = splits[s].test;
          const auto actual = test.y.col(j);
          std::vector<double> mapes, rmses;
          MapeResult first;
          std::vector<std::vector<double>> per_row(test.rows());
          for (std::size_t k = 0; k < plan.seeds.size(); ++k) {
            const auto forecast = forecasts[item_index(s, m, k)].col(j);
            const auto mr = mape(forecast, actual, plan.metric);
            if (k == 0) first = mr;
            mapes.push_back(mr.value);
            rmses.push_back(rmse(forecast, actual));
            for (std::size_t r = 0; r < test.rows(); ++r) per_row[r].push_back(forecast[r]);
          }
          ReportRow row;
          row.country = plan.targets[t];
          row.hemisphere = hemispheres[t];
          row.model = plan.models[m];
          row.horizon = plan.spec.horizons[j];
          row.spatial = spatial;
          row.mape = median(mapes);
          row.rmse = median(rmses);
          row.n_evaluated = first.n_evaluated;
          row.skipped = first.skipped;
          result.report.rows.push_back(row);

          for (std::size_t r = 0; r < test.rows(); ++r) {
            PlotPoint p;
            p.country = row.country;
            p.model = row.model;
            p.spatial = spatial;
            p.horizon = row.horizon;
            p.origin = test.origins[r];
            p.target_week = test.origins[r].plus(static_cast<std::int64_t>(row.horizon));
            p.forecast = median(per_row[r]);
            p.actual = actual[r];
            result.plot.push_back(std::move(p));
          }
        }
      }
    }
  }
  return result;
}

}  // namespace flucast
