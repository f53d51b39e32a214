// End-to-end checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "../unit/fixtures.hpp"
#include "epiwave/citysim/emit.hpp"
#include "epiwave/core/gradcheck.hpp"
#include "epiwave/experiment/commands.hpp"
#include "epiwave/preprocess/pipeline.hpp"

using namespace epiwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int decimals = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(decimals);
  s << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("epiwave_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// ---- 1 ----------------------------------------------------------------------

Outcome gradient_oracle() {
  const auto start = Clock::now();
  const auto data = fixtures::random_prepared(1, 4, 3, 12);
  model::ModelConfig cfg;
  cfg.k = 3;
  cfg.d1 = 5;
  cfg.d2 = 2;
  cfg.hidden = 4;
  cfg.seed = 1;
  const model::SabGnn m(cfg);
  auto p = m.init_params(4, 3);
  p["awareness.lambda"] = Matrix{{0.1}, {0.2}, {0.15}, {0.3}};
  const std::vector<wmn::TrainingWindow> ws{{4, 5, 2}, {7, 5, 2}, {9, 5, 2}};
  const auto report = finite_diff_check(
      [&](const TensorSet& q, TensorSet* g) { return model::batch_loss(m, q, data, ws, model::Dropout{}, g); }, p,
      1e-4);
  double worst = 0.0;
  for (const auto& t : report.tensors) worst = std::max(worst, t.max_relative_error);
  const double secs = seconds_since(start);
  return {report.passed() && secs < 60.0, std::to_string(report.tensors.size()) + " tensors, worst relative error " +
                                               std::to_string(worst) + ", " + fmt(secs) + " s"};
}

// ---- 2 ----------------------------------------------------------------------

Outcome adjacency_columns() {
  Rng rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    Matrix m(n, n);
    for (auto& v : m.values()) v = rng.bernoulli(0.4) ? 0.0 : rng.uniform(0, 1000);
    const Matrix e = wmn::normalize_adjacency(m);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += e(i, j);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return {worst <= 1e-12, "largest column-sum deviation " + std::to_string(worst)};
}

// ---- 3 ----------------------------------------------------------------------

Outcome awareness_identity() {
  Rng rng(3);
  const Matrix h = fixtures::random_matrix(rng, 5, 4);
  ad::Tape t;
  const auto x = t.constant(h);
  const Matrix at_origin = model::awareness_recovery(x, t.constant(fixtures::random_matrix(rng, 5, 1)), 0.0).value();
  const Matrix no_decay = model::awareness_recovery(x, t.constant(Matrix(5, 1)), 250.0).value();
  const double d = std::max(max_abs_diff(at_origin, h), max_abs_diff(no_decay, h));
  return {d == 0.0, "max deviation from identity " + std::to_string(d)};
}

// ---- 4 ----------------------------------------------------------------------

Outcome round_trip(wmn::SnapshotSeries& series_out) {
  const auto start = Clock::now();
  const auto root = scratch("city");
  const citysim::CityConfig cfg;
  const auto gt = citysim::simulate_to_directory(cfg, root);
  const citysim::CityFiles files{root};
  const auto districts = preprocess::RectDistrictMap::load(files.districts_file().string());
  preprocess::PreprocessOptions opt;
  opt.clock.utc_offset_seconds = cfg.utc_offset_seconds;
  const auto r = preprocess::preprocess_directories(files.mobility_dir(), files.search_dir(), files.cases_file(),
                                                    districts, preprocess::SymptomLexicon(), opt);
  std::size_t bad_days = 0;
  bool same_len = r.series.size() == gt.series.size();
  for (std::size_t t = 0; same_len && t < gt.series.size(); ++t)
    if (max_abs_diff(r.series[t].trips, gt.series[t].trips) != 0.0 ||
        max_abs_diff(r.series[t].search, gt.series[t].search) != 0.0)
      ++bad_days;
  fs::remove_all(root);
  const double secs = seconds_since(start);
  series_out = gt.series;
  return {same_len && bad_days == 0 && secs < 300.0,
          std::to_string(cfg.n_districts) + " districts, " + std::to_string(cfg.users) + " users, " +
              std::to_string(r.series.size()) + " days, " + std::to_string(bad_days) + " mismatched days, " +
              fmt(secs, 1) + " s"};
}

// ---- 5, 6, 10 -------------------------------------------------------------

experiment::ExperimentConfig learning_experiment() {
  experiment::ExperimentConfig exp;
  exp.data_dir = "in-memory";
  exp.scenarios = {{21, 7}};
  exp.models = {"sabgnn", "sabgnn_wsa", "ha_window"};
  exp.seeds = {0, 1, 2};
  exp.learning_rates = {1e-4, 1e-3};
  return exp;
}

double mean_rmse(const std::vector<experiment::RunRecord>& rs, const std::string& model, bool& ok) {
  double s = 0;
  int n = 0;
  for (const auto& r : rs)
    if (r.key.model == model) {
      ok = ok && r.ok();
      s += r.metrics.rmse;
      ++n;
    }
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

std::string per_seed(const std::vector<experiment::RunRecord>& rs, const std::string& model) {
  std::string out;
  for (const auto& r : rs)
    if (r.key.model == model) out += (out.empty() ? "" : "/") + fmt(r.metrics.rmse, 2);
  return out;
}

Outcome beats_history(const std::vector<experiment::RunRecord>& rs) {
  bool ok = true;
  const double full = mean_rmse(rs, "sabgnn", ok), ha = mean_rmse(rs, "ha_window", ok);
  double slowest = 0;
  for (const auto& r : rs) slowest = std::max(slowest, r.seconds);
  return {ok && full < ha && slowest < 20 * 60.0,
          "RMSE SAB-GNN " + fmt(full) + " (" + per_seed(rs, "sabgnn") + ") vs HA(past 21 days) " + fmt(ha) +
              ", slowest run " + fmt(slowest, 1) + " s"};
}

Outcome ablation_order(const std::vector<experiment::RunRecord>& rs) {
  bool ok = true;
  const double full = mean_rmse(rs, "sabgnn", ok), wsa = mean_rmse(rs, "sabgnn_wsa", ok);
  const std::string how = full <= wsa ? "better or equal" : "within 5%";
  return {ok && full <= 1.05 * wsa, "RMSE SAB-GNN " + fmt(full) + " (" + per_seed(rs, "sabgnn") + ") vs wsa " +
                                        fmt(wsa) + " (" + per_seed(rs, "sabgnn_wsa") + "), ratio " +
                                        fmt(full / wsa, 4) + (full <= 1.05 * wsa ? ", " + how : "")};
}

Outcome report_consistency(const std::vector<experiment::RunRecord>& rs, const wmn::SnapshotSeries& series) {
  const auto dir = scratch("reports");
  experiment::write_grid_reports(dir, "summary", rs, series);
  std::size_t rows = 0, violations = 0;
  double worst = 0.0;
  std::map<std::string, std::map<std::string, experiment::Metrics>> recomputed;
  csv::read_file((dir / "summary.csv").string(), experiment::kSummaryHeader,
                 [&](const std::vector<std::string>& f, std::size_t) {
                   ++rows;
                   const double mae = csv::parse_double(f[4], "mae"), rmse = csv::parse_double(f[5], "rmse");
                   if (mae > rmse) ++violations;
                   if (f[3] == "mean") return;
                   const std::string file = (dir / "series" / (f[0] + "_d1-" + f[1] + "_d2-" + f[2] + ".csv")).string();
                   if (!recomputed.count(file)) recomputed[file] = experiment::metrics_from_series_file(file);
                   const auto& m = recomputed[file].at(f[3]);
                   worst = std::max({worst, std::abs(m.mae - mae), std::abs(m.rmse - rmse)});
                 });
  fs::remove_all(dir);
  return {rows > 0 && violations == 0 && worst <= 1e-9,
          std::to_string(rows) + " rows, " + std::to_string(violations) +
              " with MAE > RMSE, largest recomputation gap " + std::to_string(worst)};
}

// ---- 7 ----------------------------------------------------------------------

Outcome mean_shift_homes() {
  Rng rng(7);
  int hits = 0;
  for (int user = 0; user < 100; ++user) {
    const preprocess::GeoPoint home{35.55 + rng.uniform(0, 0.25), 139.6 + rng.uniform(0, 0.25)};
    const preprocess::GeoPoint other{home.lat + rng.uniform(-0.05, 0.05), home.lon + rng.uniform(-0.05, 0.05)};
    std::vector<preprocess::GeoPoint> pts;
    for (int k = 0; k < 50; ++k) {
      const auto& c = k % 5 == 0 ? other : home;
      pts.push_back({rng.normal(c.lat, 0.001), rng.normal(c.lon, 0.001)});
    }
    if (preprocess::planar_distance(preprocess::mean_shift_mode(pts, {0.005}), home) <= 1e-3) ++hits;
  }
  return {hits >= 95, std::to_string(hits) + " of 100 users within 1e-3 degrees"};
}

// ---- 8 ----------------------------------------------------------------------

Outcome trip_suite() {
  using preprocess::TimedPoint;
  const preprocess::RectDistrictMap strip({{"A", {0, 0, 1, 1}}, {"B", {0, 1, 1, 2}}, {"C", {0, 2, 1, 3}}});
  const LocalClock clock{};
  const Date d0 = Date::parse_iso("2021-01-10"), d1 = d0 + 1;
  auto at = [&](Date d, int h, int m) { return clock.midnight(d) + h * 3600 + m * 60; };
  auto in = [](std::size_t district, std::int64_t t) { return TimedPoint{0.5, 0.5 + static_cast<double>(district), t}; };
  auto trips = [&](const std::vector<TimedPoint>& track, Date d) {
    const std::vector<std::vector<preprocess::Stay>> users{preprocess::extract_stays(track, strip)};
    return preprocess::count_trips(users, d, 3);
  };
  auto edges = [](std::initializer_list<std::pair<std::size_t, std::size_t>> es) {
    Matrix m(3, 3);
    for (auto [i, j] : es) m(i, j) += 1;
    return m;
  };
  struct Case {
    std::string name;
    std::vector<TimedPoint> track;
    Date day;
    Matrix expected;
  };
  const std::vector<Case> cases{
      {"stay home", {in(0, at(d0, 8, 0)), in(0, at(d0, 20, 0))}, d0, edges({})},
      {"five-minute visit",
       {in(0, at(d0, 8, 0)), in(0, at(d0, 10, 0)), in(1, at(d0, 10, 1)), in(1, at(d0, 10, 6)), in(0, at(d0, 10, 7)),
        in(0, at(d0, 12, 7))},
       d0,
       edges({})},
      {"chain",
       {in(0, at(d0, 8, 0)), in(0, at(d0, 9, 0)), in(1, at(d0, 9, 10)), in(1, at(d0, 9, 40)), in(2, at(d0, 9, 50)),
        in(2, at(d0, 10, 50))},
       d0,
       edges({{0, 1}, {1, 2}})},
      {"exactly ten minutes",
       {in(0, at(d0, 8, 0)), in(0, at(d0, 8, 10)), in(1, at(d0, 8, 11)), in(1, at(d0, 8, 21))},
       d0,
       edges({{0, 1}})},
      {"commute",
       {in(0, at(d0, 7, 0)), in(0, at(d0, 8, 0)), in(1, at(d0, 8, 30)), in(1, at(d0, 17, 0)), in(0, at(d0, 17, 30)),
        in(0, at(d0, 23, 0))},
       d0,
       edges({{0, 1}, {1, 0}})},
      {"midnight, first day",
       {in(1, at(d0, 21, 0)), in(1, at(d0, 22, 0)), in(0, at(d0, 23, 0)), in(0, at(d1, 1, 0)), in(1, at(d1, 1, 30)),
        in(1, at(d1, 3, 0))},
       d0,
       edges({{1, 0}})},
      {"midnight, second day",
       {in(1, at(d0, 21, 0)), in(1, at(d0, 22, 0)), in(0, at(d0, 23, 0)), in(0, at(d1, 1, 0)), in(1, at(d1, 1, 30)),
        in(1, at(d1, 3, 0))},
       d1,
       edges({{0, 1}})},
      {"short piece before midnight",
       {in(2, at(d0, 23, 55)), in(2, at(d1, 0, 30)), in(0, at(d1, 0, 40)), in(0, at(d1, 2, 0))},
       d1,
       edges({{2, 0}})},
  };
  std::string wrong;
  for (const auto& c : cases)
    if (max_abs_diff(trips(c.track, c.day), c.expected) != 0.0) wrong += (wrong.empty() ? "" : ", ") + c.name;
  return {wrong.empty(), std::to_string(cases.size()) + " trajectories" + (wrong.empty() ? "" : "; wrong: " + wrong)};
}

// ---- 9 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The summary with its trailing wall-clock column removed.
std::string summary_without_seconds(const fs::path& p) {
  std::string out;
  csv::read_file(p.string(), experiment::kSummaryHeader, [&](const std::vector<std::string>& f, std::size_t) {
    for (std::size_t i = 0; i + 1 < f.size(); ++i) out += f[i] + ",";
    out += "\n";
  });
  return out;
}

Outcome determinism(const wmn::SnapshotSeries& series) {
  const auto data = scratch("det_data");
  wmn::write_series(series, data);
  std::vector<fs::path> outs{scratch("det_a"), scratch("det_b")};
  for (const auto& out : outs) {
    experiment::ExperimentConfig c;
    c.data_dir = data.string();
    c.out_dir = out.string();
    c.scenarios = {{21, 7}};
    c.models = {"sabgnn", "lstm_iw", "ha_window"};
    c.seeds = {0};
    c.model.epochs = 3;
    experiment::command_train(c);
  }
  std::vector<std::string> differ;
  for (const auto& entry : fs::recursive_directory_iterator(outs[0])) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), outs[0]);
    const auto other = outs[1] / rel;
    const bool same = entry.path().filename() == "summary.csv"
                          ? summary_without_seconds(entry.path()) == summary_without_seconds(other)
                          : fs::exists(other) && slurp(entry.path()) == slurp(other);
    if (!same) differ.push_back(rel.string());
  }
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(outs[0])) files += entry.is_regular_file();
  for (const auto& p : {data, outs[0], outs[1]}) fs::remove_all(p);
  std::string detail = std::to_string(files) + " files compared";
  for (const auto& d : differ) detail += "; differs: " + d;
  return {differ.empty() && files > 0, detail};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& what, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << o.detail << ")"
              << std::endl;
  };

  wmn::SnapshotSeries city;
  report(1, "gradients match finite differences", gradient_oracle);
  report(2, "propagation matrix columns sum to one", adjacency_columns);
  report(3, "awareness recovery is the identity at the origin and at zero lambda", awareness_identity);
  report(4, "preprocessing recovers the simulated trips and searches", [&] { return round_trip(city); });

  std::vector<experiment::RunRecord> runs;
  std::string run_error;
  try {
    if (city.size() == 0) throw std::runtime_error("default city unavailable");
    const auto exp = learning_experiment();
    runs = experiment::run_grid(exp, city, exp.models, exp.scenarios, exp.model, &std::cerr);
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto with_runs = [&](auto check) {
    return [&, check] { return run_error.empty() ? check() : Outcome{false, "grid failed: " + run_error}; };
  };
  report(5, "SAB-GNN beats HA(past D1 days) on the default city",
         with_runs([&] { return beats_history(runs); }));
  report(6, "SAB-GNN is no worse than SAB-GNN-wsa", with_runs([&] { return ablation_order(runs); }));
  report(7, "mean shift finds the dominant night location", mean_shift_homes);
  report(8, "hand-counted trips", trip_suite);
  report(9, "identical seeds give identical reports", [&] { return determinism(city); });
  report(10, "MAE <= RMSE and the summary matches the series files",
         with_runs([&] { return report_consistency(runs, city); }));
  return failures == 0 ? 0 : 1;
}
