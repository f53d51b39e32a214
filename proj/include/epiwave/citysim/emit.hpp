#pragma once

// Writes a simulated city in the raw input layout:
//   DIR/mobility/mobility_YYYYMMDD.csv
//   DIR/search/search_YYYYMMDD.csv
//   DIR/cases.csv, DIR/districts.csv
//   DIR/truth/  true snapshot series, compartments, homes, parameters

#include <filesystem>
#include <string>

#include "epiwave/citysim/simulate.hpp"
#include "epiwave/preprocess/records.hpp"
#include "epiwave/util/csv.hpp"
#include "epiwave/wmn/series_io.hpp"

namespace epiwave::citysim {

namespace fs = std::filesystem;

struct CityFiles {
  fs::path root;
  fs::path mobility_dir() const { return root / "mobility"; }
  fs::path search_dir() const { return root / "search"; }
  fs::path cases_file() const { return root / "cases.csv"; }
  fs::path districts_file() const { return root / "districts.csv"; }
  fs::path truth_dir() const { return root / "truth"; }
};

inline GroundTruth simulate_to_directory(const CityConfig& cfg, const fs::path& root) {
  const CityFiles files{root};
  fs::create_directories(files.mobility_dir());
  fs::create_directories(files.search_dir());
  fs::create_directories(files.truth_dir());
  const LocalClock clock{cfg.utc_offset_seconds};

  auto user_id = [](std::uint32_t u, std::size_t panel) {
    char id[16];
    if (u < panel) {
      std::snprintf(id, sizeof(id), "u%05u", u + 1);
    } else {
      std::snprintf(id, sizeof(id), "t%05zu", static_cast<std::size_t>(u) - panel + 1);
    }
    return std::string(id);
  };

  auto gt = simulate(cfg, [&](const DailyRecords& day) {
    const std::string stamp = day.date.compact();
    {
      csv::Writer out((files.mobility_dir() / ("mobility_" + stamp + ".csv")).string(),
                      preprocess::kMobilityHeader);
      for (const auto& p : day.pings)
        out.row(user_id(p.user, cfg.users), p.lat, p.lon, static_cast<long long>(p.time),
                clock.local_date(p.time).compact());
    }
    csv::Writer out((files.search_dir() / ("search_" + stamp + ".csv")).string(),
                    preprocess::kSearchHeader);
    for (const auto& s : day.searches)
      out.row(user_id(s.user, cfg.users), clock.timestamp(s.time), s.query);
  });

  gt.districts.save(files.districts_file().string());
  {
    csv::Writer out(files.cases_file().string(), preprocess::kCasesHeader);
    for (std::size_t t = 0; t < gt.series.size(); ++t)
      for (std::size_t i = 0; i < gt.series.n(); ++i)
        out.row(gt.series.date(t).iso(), gt.series.districts()[i],
                static_cast<long long>(gt.series[t].cases[i]));
  }

  wmn::write_series(gt.series, files.truth_dir() / "series");
  {
    csv::Writer out((files.truth_dir() / "compartments.csv").string(),
                    "date,district,susceptible,exposed,infectious,recovered");
    for (std::size_t t = 0; t < gt.compartments.size(); ++t)
      for (std::size_t i = 0; i < gt.series.n(); ++i) {
        const auto& c = gt.compartments[t];
        out.row(gt.series.date(t).iso(), gt.series.districts()[i], c(i, 0), c(i, 1), c(i, 2), c(i, 3));
      }
  }
  {
    csv::Writer out((files.truth_dir() / "homes.csv").string(), "id,lat,lon,district");
    for (std::size_t u = 0; u < gt.panel_users; ++u)
      out.row(gt.user_ids[u], gt.home_point[u].lat, gt.home_point[u].lon,
              gt.series.districts()[gt.home_district[u]]);
  }
  {
    csv::Writer out((files.truth_dir() / "districts.csv").string(), "district,population,delta");
    for (std::size_t i = 0; i < gt.series.n(); ++i)
      out.row(gt.series.districts()[i], gt.population[i], gt.delta[i]);
  }
  {
    csv::Writer out((files.truth_dir() / "beta.csv").string(), "date,beta");
    for (std::size_t t = 0; t < gt.beta.size(); ++t) out.row(gt.series.date(t).iso(), gt.beta[t]);
  }
  return gt;
}

}  // namespace epiwave::citysim
