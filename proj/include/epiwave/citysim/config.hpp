#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/preprocess/district_map.hpp"
#include "epiwave/util/date.hpp"
#include "epiwave/util/flat_config.hpp"

namespace epiwave::citysim {

/// Parameters of the synthetic city. Defaults give 23 districts, 2,000
/// panel users and four epidemic waves over 300 days.
struct CityConfig {
  std::size_t n_districts = 23;
  std::size_t users = 2000;            ///< permanent panel users
  std::size_t transient_users = 100;   ///< visitors seen on a few days only
  int days = 300;
  std::string start_date = "2020-04-01";
  std::uint64_t seed = 0;
  preprocess::BoundingBox area{35.55, 139.60, 35.80, 139.90};
  std::int64_t utc_offset_seconds = 9 * 3600;

  // Epidemic.
  double population_min = 60000;
  double population_max = 140000;
  double sigma = 0.2;          ///< E -> I rate per day
  double gamma = 0.25;         ///< I -> R rate per day
  double initial_infectious = 5;
  double import_rate = 0.05;   ///< imported exposures per district per day
  double mobility_coupling = 0.35;
  /// Cases are reported this many days after symptom onset, uniform over
  /// the inclusive range; reports falling past the last day are lost.
  int report_delay_min = 3;
  int report_delay_max = 9;
  /// Reproduction number R(t) = base + sum of Gaussian humps; the daily
  /// transmission rate is gamma * R(t). An explicit `beta` list overrides it.
  double r_base = 0.75;
  std::vector<double> hump_centers{35, 105, 175, 255};
  std::vector<double> hump_widths{14, 14, 14, 14};
  std::vector<double> hump_heights{1.0, 0.9, 0.85, 0.55};
  std::vector<double> beta;

  // Mobility.
  double outing_probability = 0.4;
  int max_destinations = 3;
  double pass_through_probability = 0.3;

  // Web search.
  double search_propensity = 0.06;     ///< a: queries per (E + I) person for the top symptom
  double delta_min = 0.003;            ///< awareness decay per day, per district uniform
  double delta_max = 0.008;
  std::vector<double> delta;           ///< explicit per-district override
  double search_noise = 1.5;           ///< background queries per district/day, top symptom
  double noise_queries_per_user = 0.3; ///< unrelated queries per user per day

  Date start() const { return Date::parse_iso(start_date); }

  std::vector<double> beta_schedule() const {
    if (!beta.empty()) return beta;
    std::vector<double> out(static_cast<std::size_t>(days));
    for (int t = 0; t < days; ++t) {
      double r = r_base;
      for (std::size_t h = 0; h < hump_centers.size(); ++h) {
        const double z = (t - hump_centers[h]) / hump_widths.at(h);
        r += hump_heights.at(h) * std::exp(-0.5 * z * z);
      }
      out[static_cast<std::size_t>(t)] = gamma * r;
    }
    return out;
  }

  void validate() const {
    if (n_districts == 0 || users < n_districts || days <= 0) {
      throw std::invalid_argument("city config: need districts > 0, users >= districts, days > 0");
    }
    for (double v : {population_min, population_max, sigma, gamma, initial_infectious, import_rate,
                     mobility_coupling, r_base, outing_probability, search_propensity, delta_min,
                     delta_max, search_noise, noise_queries_per_user, pass_through_probability}) {
      if (!(v >= 0.0)) throw std::invalid_argument("city config: rates must be nonnegative");
    }
    if (population_max < population_min || delta_max < delta_min) {
      throw std::invalid_argument("city config: max below min");
    }
    if (hump_widths.size() != hump_centers.size() || hump_heights.size() != hump_centers.size()) {
      throw std::invalid_argument("city config: hump lists differ in length");
    }
    if (!beta.empty() && beta.size() != static_cast<std::size_t>(days)) {
      throw std::invalid_argument("city config: beta schedule length must equal days");
    }
    for (double b : beta)
      if (!(b >= 0.0)) throw std::invalid_argument("city config: beta must be nonnegative");
    if (!delta.empty() && delta.size() != n_districts) {
      throw std::invalid_argument("city config: delta list length must equal n_districts");
    }
    for (double d : delta)
      if (!(d >= 0.0)) throw std::invalid_argument("city config: delta must be nonnegative");
    if (report_delay_min < 0 || report_delay_max < report_delay_min) {
      throw std::invalid_argument("city config: need 0 <= report_delay_min <= report_delay_max");
    }
    if (max_destinations < 1) throw std::invalid_argument("city config: max_destinations < 1");
    (void)start();
  }

  static CityConfig from_flat(const FlatConfig& f) {
    CityConfig c;
    c.n_districts = static_cast<std::size_t>(f.integer("n_districts", static_cast<long long>(c.n_districts)));
    c.users = static_cast<std::size_t>(f.integer("users", static_cast<long long>(c.users)));
    c.transient_users =
        static_cast<std::size_t>(f.integer("transient_users", static_cast<long long>(c.transient_users)));
    c.days = static_cast<int>(f.integer("days", c.days));
    c.start_date = f.string("start_date", c.start_date);
    c.seed = static_cast<std::uint64_t>(f.integer("seed", static_cast<long long>(c.seed)));
    c.area.min_lat = f.number("min_lat", c.area.min_lat);
    c.area.min_lon = f.number("min_lon", c.area.min_lon);
    c.area.max_lat = f.number("max_lat", c.area.max_lat);
    c.area.max_lon = f.number("max_lon", c.area.max_lon);
    c.utc_offset_seconds = f.integer("utc_offset_seconds", c.utc_offset_seconds);
    c.population_min = f.number("population_min", c.population_min);
    c.population_max = f.number("population_max", c.population_max);
    c.sigma = f.number("sigma", c.sigma);
    c.gamma = f.number("gamma", c.gamma);
    c.initial_infectious = f.number("initial_infectious", c.initial_infectious);
    c.import_rate = f.number("import_rate", c.import_rate);
    c.mobility_coupling = f.number("mobility_coupling", c.mobility_coupling);
    c.report_delay_min = static_cast<int>(f.integer("report_delay_min", c.report_delay_min));
    c.report_delay_max = static_cast<int>(f.integer("report_delay_max", c.report_delay_max));
    c.r_base = f.number("r_base", c.r_base);
    c.hump_centers = f.numbers("hump_centers", c.hump_centers);
    c.hump_widths = f.numbers("hump_widths", c.hump_widths);
    c.hump_heights = f.numbers("hump_heights", c.hump_heights);
    c.beta = f.numbers("beta", c.beta);
    c.outing_probability = f.number("outing_probability", c.outing_probability);
    c.max_destinations = static_cast<int>(f.integer("max_destinations", c.max_destinations));
    c.pass_through_probability = f.number("pass_through_probability", c.pass_through_probability);
    c.search_propensity = f.number("search_propensity", c.search_propensity);
    c.delta_min = f.number("delta_min", c.delta_min);
    c.delta_max = f.number("delta_max", c.delta_max);
    c.delta = f.numbers("delta", c.delta);
    c.search_noise = f.number("search_noise", c.search_noise);
    c.noise_queries_per_user = f.number("noise_queries_per_user", c.noise_queries_per_user);
    const auto unused = f.unused_keys();
    if (!unused.empty()) throw ConfigError("city config: unknown key '" + unused.front() + "'");
    c.validate();
    return c;
  }
};

}  // namespace epiwave::citysim
