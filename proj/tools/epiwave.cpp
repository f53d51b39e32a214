#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "epiwave/citysim/emit.hpp"
#include "epiwave/experiment/commands.hpp"
#include "epiwave/preprocess/pipeline.hpp"

namespace fs = std::filesystem;
using namespace epiwave;

namespace {

int simulate(const std::string& config, const std::string& out) {
  const auto cfg = config.empty() ? citysim::CityConfig{}
                                  : citysim::CityConfig::from_flat(FlatConfig::load(config));
  const auto gt = citysim::simulate_to_directory(cfg, out);
  std::cerr << "simulated " << gt.series.size() << " days, " << gt.series.n() << " districts, "
            << gt.panel_users << " panel users, " << gt.ping_count << " pings -> " << out << '\n';
  return 0;
}

struct PreprocessArgs {
  std::string mobility, search, cases, districts, out;
  int min_stay = 10;
  double bandwidth = 0.005;
  int min_night_records = 20;
  double utc_offset_hours = 9.0;
};

int preprocess_cmd(const PreprocessArgs& a) {
  preprocess::PreprocessOptions opt;
  opt.min_stay_minutes = a.min_stay;
  opt.bandwidth = a.bandwidth;
  opt.min_night_records = a.min_night_records;
  opt.clock.utc_offset_seconds = static_cast<std::int64_t>(std::llround(a.utc_offset_hours * 3600.0));
  const auto districts = preprocess::RectDistrictMap::load(a.districts);
  const auto r = preprocess::preprocess_directories(a.mobility, a.search, a.cases, districts,
                                                    preprocess::SymptomLexicon(), opt);
  wmn::write_series(r.series, a.out);
  preprocess::write_homes(r, districts, (fs::path(a.out) / "homes.csv").string());
  std::cerr << "users seen " << r.stats.users_seen << ", residents with homes " << r.stats.permanent_users
            << ", " << r.series.size() << " days -> " << a.out << '\n';
  return 0;
}

int predict_cmd(const std::string& checkpoint, const std::string& data, long long anchor, const std::string& out) {
  const auto ckpt = model::load_checkpoint(checkpoint);
  const auto series = wmn::read_series(data);
  if (ckpt.districts != series.districts()) throw std::invalid_argument("checkpoint districts differ from the data");
  if (anchor < 0) anchor = static_cast<long long>(series.size()) - 1;
  if (anchor - ckpt.config.d1 + 1 < 0 || anchor >= static_cast<long long>(series.size())) {
    throw std::invalid_argument("anchor " + std::to_string(anchor) + " has no full input window");
  }
  const auto prepared = model::prepare_series(series, ckpt.stats, ckpt.symptom_columns, ckpt.config.adjacency_norm);
  const auto m = experiment::make_forecaster(ckpt.model, ckpt.config);
  const wmn::TrainingWindow w{anchor, ckpt.config.d1, ckpt.config.d2};
  const Matrix f = model::predict(*m, ckpt.params, prepared, w);
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::runtime_error("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "date,district,predicted\n";
  for (std::size_t j = 0; j < f.cols(); ++j)
    for (std::size_t i = 0; i < f.rows(); ++i)
      os << (series.origin() + (w.first_target() + static_cast<std::int64_t>(j))).iso() << ','
         << series.districts()[i] << ',' << csv::format_double(f(i, j)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiwave epidemic forecasting from mobility and symptom searches"};
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  auto* sim = app.add_subcommand("simulate", "Write a synthetic city's raw records and ground truth");
  sim->add_option("--config", sim_config, "City config (key = value); defaults when omitted");
  sim->add_option("--out", sim_out, "Output directory")->required();

  PreprocessArgs pa;
  auto* pre = app.add_subcommand("preprocess", "Turn raw records into a daily snapshot series");
  pre->add_option("--mobility", pa.mobility, "Directory of mobility CSVs")->required();
  pre->add_option("--search", pa.search, "Directory of search-log CSVs")->required();
  pre->add_option("--cases", pa.cases, "Daily case CSV (date,district,count)")->required();
  pre->add_option("--districts", pa.districts, "District boxes CSV")->required();
  pre->add_option("--out", pa.out, "Output series directory")->required();
  pre->add_option("--min-stay", pa.min_stay, "Minimum stay in minutes")->capture_default_str();
  pre->add_option("--bandwidth", pa.bandwidth, "Mean-shift bandwidth in degrees")->capture_default_str();
  pre->add_option("--min-night-records", pa.min_night_records, "Night pings needed for a home")->capture_default_str();
  pre->add_option("--utc-offset-hours", pa.utc_offset_hours, "Local time offset")->capture_default_str();

  std::string exp_config;
  std::vector<CLI::App*> grid_cmds;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"train", "Train and score every model, scenario and seed"},
           {"evaluate", "Score checkpoints saved by train"},
           {"ablate", "Compare the model variants"},
           {"sweep", "Run the configured parameter sweeps"}}) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--config", exp_config, "Experiment config")->required();
    grid_cmds.push_back(c);
  }

  std::string ckpt, data, pred_out;
  long long anchor = -1;
  auto* pred = app.add_subcommand("predict", "Forecast from a checkpoint");
  pred->add_option("--checkpoint", ckpt, "Checkpoint directory")->required();
  pred->add_option("--data", data, "Snapshot series directory")->required();
  pred->add_option("--anchor", anchor, "Last input day index (default: last day)");
  pred->add_option("--out", pred_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return simulate(sim_config, sim_out);
    if (pre->parsed()) return preprocess_cmd(pa);
    if (pred->parsed()) return predict_cmd(ckpt, data, anchor, pred_out);
    const auto cfg = experiment::ExperimentConfig::load(exp_config);
    experiment::CommandResult r;
    if (grid_cmds[0]->parsed()) r = experiment::command_train(cfg, &std::cerr);
    if (grid_cmds[1]->parsed()) r = experiment::command_evaluate(cfg, &std::cerr);
    if (grid_cmds[2]->parsed()) r = experiment::command_ablate(cfg, &std::cerr);
    if (grid_cmds[3]->parsed()) r = experiment::command_sweep(cfg, &std::cerr);
    if (r.hard_failure) std::cerr << "some runs failed; see failures CSV in " << cfg.out_dir << '\n';
    return r.hard_failure ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
