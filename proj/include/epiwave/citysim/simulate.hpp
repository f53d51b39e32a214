#pragma once

// Synthetic city: a stochastic metapopulation SEIR epidemic coupled through
// the day's inter-district trips, a panel of phone users whose pings encode
// those trips, and symptom searches whose propensity decays over time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/citysim/config.hpp"
#include "epiwave/core/matrix.hpp"
#include "epiwave/preprocess/district_map.hpp"
#include "epiwave/preprocess/mean_shift.hpp"
#include "epiwave/preprocess/symptoms.hpp"
#include "epiwave/util/rng.hpp"
#include "epiwave/wmn/snapshot.hpp"

namespace epiwave::citysim {

struct RawPing {
  std::uint32_t user = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t time = 0;
};

struct RawSearch {
  std::uint32_t user = 0;
  std::int64_t time = 0;
  std::string query;
};

/// Raw records of one simulated day.
struct DailyRecords {
  Date date;
  std::vector<RawPing> pings;      ///< grouped by user, time-sorted within a user
  std::vector<RawSearch> searches;  ///< time-sorted
};

/// Everything the simulator knows that raw records only imply.
struct GroundTruth {
  preprocess::RectDistrictMap districts;
  std::vector<std::string> user_ids;  ///< panel users first, then transient users
  std::size_t panel_users = 0;
  std::vector<std::size_t> home_district;  ///< per panel user
  std::vector<preprocess::GeoPoint> home_point;
  std::vector<double> population;
  std::vector<double> delta;
  std::vector<double> beta;
  std::vector<double> symptom_weight;  ///< relative search propensity per symptom
  wmn::SnapshotSeries series;          ///< true trips, symptom counts and reported cases
  std::vector<Matrix> compartments;    ///< per day, n x 4 (S, E, I, R) at day end
  std::vector<std::vector<std::int64_t>> onsets;  ///< per day, new infectious per district
  std::vector<Matrix> search_mean;     ///< per day, expected symptom counts

  std::size_t ping_count = 0;
  std::size_t panel_symptom_records = 0;
  std::size_t transient_search_records = 0;
  std::size_t noise_search_records = 0;
};

/// Relative search propensity: a few COVID-typical symptoms dominate and
/// the remaining ones follow a power-law tail.
inline std::vector<double> symptom_weights(const preprocess::SymptomLexicon& lex) {
  const std::vector<std::string> leading{
      "Pyrexia",  "Cough",    "Headache", "Oropharyngeal pain", "Fatigue", "Anosmia",
      "Ageusia",  "Rhinorrhea", "Dyspnea", "Body ache",         "Chills",  "Diarrhea"};
  std::vector<double> w(lex.size(), 0.0);
  std::vector<std::size_t> order;
  for (const auto& name : leading)
    for (std::size_t i = 0; i < lex.size(); ++i)
      if (lex[i].name == name) order.push_back(i);
  for (std::size_t i = 0; i < lex.size(); ++i)
    if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
  for (std::size_t r = 0; r < order.size(); ++r) w[order[r]] = 1.0 / std::pow(1.0 + r, 0.9);
  return w;
}

/// Query text per symptom that the lexicon attributes to that symptom only,
/// whichever suffix from `query_suffixes()` is appended.
inline const std::vector<std::string>& query_suffixes() {
  static const std::vector<std::string> s{"", " symptoms", " remedy", " at night", " medicine",
                                          " how long"};
  return s;
}

inline std::vector<std::string> unique_probes(const preprocess::SymptomLexicon& lex) {
  std::vector<std::string> probes;
  for (std::size_t w = 0; w < lex.size(); ++w) {
    std::vector<std::string> candidates{preprocess::to_lower(lex[w].name)};
    for (const auto& a : lex[w].aliases) candidates.push_back(a);
    std::string chosen;
    for (const auto& c : candidates) {
      bool ok = true;
      for (const auto& suffix : query_suffixes()) {
        const auto hits = lex.match(c + suffix);
        ok = ok && hits.size() == 1 && hits.front() == w;
      }
      if (ok) {
        chosen = c;
        break;
      }
    }
    if (chosen.empty()) throw std::logic_error("no unambiguous query text for " + lex[w].name);
    probes.push_back(chosen);
  }
  return probes;
}

inline const std::vector<std::string>& noise_queries() {
  static const std::vector<std::string> q{"weather tomorrow", "train timetable", "ramen near me",
                                          "baseball score",   "stock prices",    "movie times",
                                          "cherry blossom forecast", "how to cook rice"};
  return q;
}

namespace detail {

inline preprocess::GeoPoint interior_point(const preprocess::BoundingBox& b, Rng& rng,
                                           double margin = 0.2) {
  const double h = b.max_lat - b.min_lat, w = b.max_lon - b.min_lon;
  return {rng.uniform(b.min_lat + margin * h, b.max_lat - margin * h),
          rng.uniform(b.min_lon + margin * w, b.max_lon - margin * w)};
}

inline preprocess::GeoPoint center(const preprocess::BoundingBox& b) {
  return {(b.min_lat + b.max_lat) / 2.0, (b.min_lon + b.max_lon) / 2.0};
}

inline std::int64_t poisson_capped(Rng& rng, double mean, double cap) {
  const auto x = rng.poisson(mean);
  const auto c = static_cast<std::int64_t>(cap);
  return x > c ? c : x;
}

}  // namespace detail

/// Runs the simulation, handing each day's raw records to `on_day` as soon
/// as they exist.
inline GroundTruth simulate(const CityConfig& cfg,
                            const std::function<void(const DailyRecords&)>& on_day) {
  cfg.validate();
  Rng rng(cfg.seed);
  const LocalClock clock{cfg.utc_offset_seconds};
  const std::size_t n = cfg.n_districts;
  const preprocess::SymptomLexicon lex;
  const std::size_t nw = lex.size();
  const auto probes = unique_probes(lex);

  GroundTruth gt;
  gt.districts = preprocess::RectDistrictMap::grid(n, cfg.area);
  gt.beta = cfg.beta_schedule();
  gt.symptom_weight = symptom_weights(lex);

  gt.population.resize(n);
  for (auto& p : gt.population) p = std::round(rng.uniform(cfg.population_min, cfg.population_max));
  gt.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    gt.delta[i] = cfg.delta.empty() ? rng.uniform(cfg.delta_min, cfg.delta_max) : cfg.delta[i];

  // Panel users: one per district first, the rest proportional to population.
  gt.panel_users = cfg.users;
  std::vector<std::vector<std::uint32_t>> residents(n);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    const std::size_t d = u < n ? u : rng.weighted(gt.population);
    char id[16];
    std::snprintf(id, sizeof(id), "u%05zu", u + 1);
    gt.user_ids.push_back(id);
    gt.home_district.push_back(d);
    gt.home_point.push_back(detail::interior_point(gt.districts.box(d), rng));
    residents[d].push_back(static_cast<std::uint32_t>(u));
  }
  for (std::size_t v = 0; v < cfg.transient_users; ++v) {
    char id[16];
    std::snprintf(id, sizeof(id), "t%05zu", v + 1);
    gt.user_ids.push_back(id);
  }

  // Destination choice: gravity on population and distance between centers.
  std::vector<std::vector<double>> gravity(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = preprocess::planar_distance(detail::center(gt.districts.box(i)),
                                                   detail::center(gt.districts.box(j)));
      gravity[i][j] = gt.population[j] / std::pow(0.03 + d, 2.0);
    }

  std::vector<double> S(n), E(n, 0.0), I(n), R(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    I[i] = std::min(cfg.initial_infectious, gt.population[i]);
    S[i] = gt.population[i] - I[i];
  }

  const Date start = cfg.start();
  const auto n_days = static_cast<std::size_t>(cfg.days);
  std::vector<std::vector<std::int64_t>> reported(n_days, std::vector<std::int64_t>(n, 0));
  std::vector<wmn::Snapshot> days;
  auto jitter = [&](preprocess::GeoPoint p, double s) {
    return preprocess::GeoPoint{p.lat + rng.uniform(-s, s), p.lon + rng.uniform(-s, s)};
  };
  constexpr double kHomeJitter = 0.0002;
  constexpr std::int64_t kMinute = 60, kHour = 3600;

  for (int t = 0; t < cfg.days; ++t) {
    const Date date = start + t;
    const std::int64_t midnight = clock.midnight(date);
    DailyRecords raw;
    raw.date = date;
    Matrix trips(n, n);

    for (std::uint32_t u = 0; u < cfg.users; ++u) {
      const std::size_t home = gt.home_district[u];
      const auto hp = gt.home_point[u];
      auto ping = [&](preprocess::GeoPoint p, std::int64_t time) {
        raw.pings.push_back({u, p.lat, p.lon, time});
      };
      auto at = [&](double lo_h, double hi_h) {
        return midnight + static_cast<std::int64_t>(rng.uniform(lo_h, hi_h) * kHour);
      };
      if (!rng.bernoulli(cfg.outing_probability)) {
        ping(jitter(hp, kHomeJitter), at(0.5, 1.5));
        ping(jitter(hp, kHomeJitter), at(6.0, 8.5));
        ping(jitter(hp, kHomeJitter), at(20.0, 23.5));
        continue;
      }
      ping(jitter(hp, kHomeJitter), at(0.5, 1.5));
      std::int64_t clock_t = at(7.0, 10.0);
      ping(jitter(hp, kHomeJitter), clock_t);
      std::vector<std::size_t> visited{home};
      const int stops = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_destinations)));
      for (int k = 0; k < stops; ++k) {
        const std::int64_t travel = static_cast<std::int64_t>(rng.uniform(10.0, 40.0) * kMinute);
        const std::int64_t dwell = static_cast<std::int64_t>(rng.uniform(30.0, 240.0) * kMinute);
        const bool pass = rng.bernoulli(cfg.pass_through_probability);
        const std::size_t via = rng.below(n);
        const auto via_point = detail::interior_point(gt.districts.box(via), rng);
        const std::size_t dest = rng.weighted(gravity[home]);
        const auto dest_point = detail::interior_point(gt.districts.box(dest), rng);
        const std::int64_t arrive = clock_t + travel;
        if (arrive + dwell > midnight + 21 * kHour) break;
        if (pass) {
          // A few minutes in some district on the way: never a valid stay.
          ping(via_point, clock_t + 2 * kMinute);
          ping(jitter(via_point, 0.0005), clock_t + 5 * kMinute);
        }
        ping(dest_point, arrive);
        ping(jitter(dest_point, 0.0005), arrive + dwell);
        visited.push_back(dest);
        clock_t = arrive + dwell;
      }
      const std::int64_t back = clock_t + static_cast<std::int64_t>(rng.uniform(10.0, 40.0) * kMinute);
      ping(jitter(hp, kHomeJitter), back);
      ping(jitter(hp, kHomeJitter), std::max(back + 15 * kMinute, at(21.0, 23.5)));
      visited.push_back(home);
      for (std::size_t k = 1; k < visited.size(); ++k)
        if (visited[k] != visited[k - 1]) trips(visited[k - 1], visited[k]) += 1.0;
    }

    // Visitors: a handful of pings on rare days, never enough to count as residents.
    for (std::size_t v = 0; v < cfg.transient_users; ++v) {
      const auto uid = static_cast<std::uint32_t>(cfg.users + v);
      if (!rng.bernoulli(2.0 / cfg.days)) continue;
      const int k = 2 + static_cast<int>(rng.below(3));
      std::vector<std::int64_t> times;
      for (int j = 0; j < k; ++j) times.push_back(midnight + static_cast<std::int64_t>(rng.below(86400)));
      std::sort(times.begin(), times.end());
      for (auto tm : times) {
        const auto p = detail::interior_point(gt.districts.box(rng.below(n)), rng, 0.05);
        raw.pings.push_back({uid, p.lat, p.lon, tm});
      }
      if (rng.bernoulli(0.5)) {
        const std::size_t w = rng.below(nw);
        raw.searches.push_back({uid, midnight + static_cast<std::int64_t>(rng.below(86400)),
                                probes[w] + query_suffixes()[rng.below(query_suffixes().size())]});
        ++gt.transient_search_records;
      }
    }

    // Epidemic step, coupled through today's trips in both directions.
    const double beta = gt.beta[static_cast<std::size_t>(t)];
    std::vector<double> prevalence(n);
    for (std::size_t j = 0; j < n; ++j) prevalence[j] = I[j] / gt.population[j];
    std::vector<double> new_e(n), new_i(n), new_r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double wsum = static_cast<double>(residents[i].size()), mixed = wsum * prevalence[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = trips(i, j) + trips(j, i);
        wsum += w;
        mixed += w * prevalence[j];
      }
      const double force = beta * ((1.0 - cfg.mobility_coupling) * prevalence[i] +
                                   cfg.mobility_coupling * (wsum > 0.0 ? mixed / wsum : 0.0));
      const double p_inf = 1.0 - std::exp(-force);
      new_e[i] = static_cast<double>(detail::poisson_capped(rng, S[i] * p_inf, S[i]));
      new_e[i] += static_cast<double>(detail::poisson_capped(rng, cfg.import_rate, S[i] - new_e[i]));
      new_i[i] = static_cast<double>(detail::poisson_capped(rng, cfg.sigma * E[i], E[i]));
      new_r[i] = static_cast<double>(detail::poisson_capped(rng, cfg.gamma * I[i], I[i]));
    }
    Matrix comp(n, 4);
    std::vector<std::int64_t> onset_today(n);
    for (std::size_t i = 0; i < n; ++i) {
      S[i] -= new_e[i];
      E[i] += new_e[i] - new_i[i];
      I[i] += new_i[i] - new_r[i];
      R[i] += new_r[i];
      if (S[i] < 0 || E[i] < 0 || I[i] < 0) throw std::logic_error("citysim: negative compartment");
      const auto onset = static_cast<std::int64_t>(new_i[i]);
      for (std::int64_t k = 0; k < onset; ++k) {
        const auto span = static_cast<std::uint64_t>(cfg.report_delay_max - cfg.report_delay_min + 1);
        const auto when = static_cast<std::size_t>(t + cfg.report_delay_min) + rng.below(span);
        if (when < n_days) ++reported[when][i];
      }
      onset_today[i] = onset;
      comp(i, 0) = S[i];
      comp(i, 1) = E[i];
      comp(i, 2) = I[i];
      comp(i, 3) = R[i];
    }

    // Symptom searches by residents, decaying awareness over time.
    Matrix search(n, nw), mean(n, nw);
    for (std::size_t i = 0; i < n; ++i) {
      const double aware = std::exp(-gt.delta[i] * t);
      for (std::size_t w = 0; w < nw; ++w) {
        const double a = gt.symptom_weight[w];
        mean(i, w) = cfg.search_propensity * a * (E[i] + I[i]) * aware + cfg.search_noise * a;
        const auto c = rng.poisson(mean(i, w));
        search(i, w) = static_cast<double>(c);
        for (std::int64_t r = 0; r < c; ++r) {
          const auto user = residents[i][rng.below(residents[i].size())];
          const auto& sfx = query_suffixes()[rng.below(query_suffixes().size())];
          raw.searches.push_back({user, midnight + static_cast<std::int64_t>(rng.below(86400)),
                                  probes[w] + sfx});
        }
        gt.panel_symptom_records += static_cast<std::size_t>(c);
      }
    }
    for (std::uint32_t u = 0; u < cfg.users; ++u) {
      if (!rng.bernoulli(cfg.noise_queries_per_user)) continue;
      raw.searches.push_back({u, midnight + static_cast<std::int64_t>(rng.below(86400)),
                              noise_queries()[rng.below(noise_queries().size())]});
      ++gt.noise_search_records;
    }
    std::stable_sort(raw.searches.begin(), raw.searches.end(),
                     [](const RawSearch& a, const RawSearch& b) { return a.time < b.time; });

    gt.ping_count += raw.pings.size();
    days.push_back({t, std::move(trips), std::move(search), reported[static_cast<std::size_t>(t)]});
    gt.onsets.push_back(std::move(onset_today));
    gt.compartments.push_back(std::move(comp));
    gt.search_mean.push_back(std::move(mean));
    on_day(raw);
  }
  gt.series = wmn::SnapshotSeries(start, gt.districts.ids(), lex.names(), std::move(days));
  return gt;
}

/// Simulation keeping all raw records in memory; for small cities.
inline std::pair<std::vector<DailyRecords>, GroundTruth> simulate(const CityConfig& cfg) {
  std::vector<DailyRecords> raw;
  auto gt = simulate(cfg, [&](const DailyRecords& d) { raw.push_back(d); });
  return {std::move(raw), std::move(gt)};
}

}  // namespace epiwave::citysim
