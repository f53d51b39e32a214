#include <gtest/gtest.h>

#include "epiwave/baselines/historical_average.hpp"
#include "epiwave/baselines/recurrent.hpp"
#include "epiwave/core/gradcheck.hpp"
#include "epiwave/model/train.hpp"
#include "fixtures.hpp"

using namespace epiwave;
using namespace epiwave::baselines;
using epiwave::fixtures::random_prepared;
using epiwave::fixtures::random_series;

namespace {

wmn::SnapshotSeries with_cases(std::size_t n, const std::vector<std::int64_t>& per_day) {
  auto s = random_series(11, n, 2, per_day.size());
  for (std::size_t t = 0; t < per_day.size(); ++t)
    for (auto& c : s.mutable_day(t).cases) c = per_day[t];
  return s;
}

model::ModelConfig small_config() {
  model::ModelConfig c;
  c.k = 3;
  c.d1 = 5;
  c.d2 = 3;
  c.hidden = 4;
  c.epochs = 5;
  c.batch_size = 3;
  c.learning_rate = 1e-3;
  c.seed = 5;
  return c;
}

LossWithGrad loss_of(const model::Forecaster& m, const model::PreparedSeries& data,
                     std::vector<wmn::TrainingWindow> ws) {
  return [&m, &data, ws](const TensorSet& p, TensorSet* grads) {
    return model::batch_loss(m, p, data, ws, model::Dropout{}, grads);
  };
}

}  // namespace

TEST(HistoricalAverage, ConstantSeries) {
  const auto s = with_cases(3, std::vector<std::int64_t>(10, 4));
  EXPECT_EQ(max_abs_diff(ha_all(s, 9, 7), Matrix(3, 7, 4.0)), 0.0);
  EXPECT_EQ(max_abs_diff(ha_window(s, 9, 5, 2), Matrix(3, 2, 4.0)), 0.0);
}

TEST(HistoricalAverage, TwoDayMean) {
  const auto s = with_cases(2, {0, 10});
  EXPECT_EQ(max_abs_diff(ha_all(s, 1, 3), Matrix(2, 3, 5.0)), 0.0);
}

TEST(HistoricalAverage, FlatAcrossHorizon) {
  const auto s = random_series(12, 3, 2, 30);
  const Matrix a = ha_all(s, 25, 1), b = ha_all(s, 25, 21);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 21; ++j) EXPECT_EQ(b(i, j), a(i, 0));
}

TEST(HistoricalAverage, WindowIgnoresEarlierDays) {
  auto s = random_series(13, 3, 2, 40);
  for (std::size_t t = 19; t < 40; ++t)
    for (auto& c : s.mutable_day(t).cases) c = 6;
  EXPECT_EQ(max_abs_diff(ha_window(s, 39, 21, 7), Matrix(3, 7, 6.0)), 0.0);
}

TEST(HistoricalAverage, RampAveragesToMidpoint) {
  std::vector<std::int64_t> ramp;
  for (int v = 1; v <= 21; ++v) ramp.push_back(v);
  EXPECT_EQ(max_abs_diff(ha_window(with_cases(2, ramp), 20, 21, 7), Matrix(2, 7, 11.0)), 0.0);
}

TEST(HistoricalAverage, WindowCoincidingWithHistory) {
  const auto s = random_series(14, 4, 2, 30);
  EXPECT_EQ(max_abs_diff(ha_window(s, 20, 21, 7), ha_all(s, 20, 7)), 0.0);
}

TEST(HistoricalAverage, ShortHistoryThrows) {
  const auto s = random_series(15, 2, 2, 30);
  EXPECT_THROW(ha_window(s, 10, 21, 7), std::invalid_argument);
  EXPECT_THROW(ha_all(s, 30, 7), std::invalid_argument);
}

TEST(HistoricalAverage, DistrictsIndependent) {
  auto s = random_series(16, 4, 2, 30);
  const Matrix before = ha_window(s, 29, 21, 7);
  for (std::size_t t = 0; t < 30; ++t) s.mutable_day(t).cases[2] += 100;
  const Matrix after = ha_window(s, 29, 21, 7);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(after(i, j), before(i, j) + (i == 2 ? 100.0 : 0.0), 1e-12);
}

class RecurrentGradients
    : public ::testing::TestWithParam<std::tuple<bool, Features, model::Readout>> {};

TEST_P(RecurrentGradients, MatchFiniteDifferences) {
  const auto [seq2seq, features, readout] = GetParam();
  const auto data = random_prepared(21, 4, 3, 12);
  auto cfg = small_config();
  cfg.readout = readout;
  std::unique_ptr<model::Forecaster> m;
  if (seq2seq)
    m = std::make_unique<Seq2SeqBaseline>(cfg, features);
  else
    m = std::make_unique<LstmBaseline>(cfg, features);
  const auto p = m->init_params(4, 3);
  const auto report = finite_diff_check(loss_of(*m, data, {{4, 5, 3}, {6, 5, 3}, {8, 5, 3}}), p, 1e-4);
  for (const auto& c : report.tensors) EXPECT_TRUE(c.passed) << c.name << " " << c.max_relative_error;
}

INSTANTIATE_TEST_SUITE_P(
    BothKinds, RecurrentGradients,
    ::testing::Combine(::testing::Bool(), ::testing::Values(Features::cases, Features::cases_and_search),
                       ::testing::Values(model::Readout::rollout, model::Readout::direct)));

TEST(Recurrent, InputWidths) {
  const auto cfg = small_config();
  const auto pi = LstmBaseline(cfg, Features::cases).init_params(4, 3);
  const auto piw = LstmBaseline(cfg, Features::cases_and_search).init_params(4, 3);
  EXPECT_EQ(pi.at("lstm.l0.wx").rows(), 1u);
  EXPECT_EQ(piw.at("lstm.l0.wx").rows(), 4u);
  EXPECT_EQ(Seq2SeqBaseline(cfg, Features::cases_and_search).init_params(4, 3).at("encoder.l0.wx").rows(), 4u);
  EXPECT_EQ(Seq2SeqBaseline(cfg, Features::cases).init_params(4, 3).at("decoder.l0.wx").rows(), 1u);
}

TEST(Recurrent, IgnoresMobility) {
  const auto data = random_prepared(22, 4, 3, 12);
  auto shuffled = data;
  for (auto& a : shuffled.adjacency) a = Matrix::identity(4);
  const auto cfg = small_config();
  for (const auto& m : std::vector<std::shared_ptr<model::Forecaster>>{
           std::make_shared<LstmBaseline>(cfg, Features::cases_and_search),
           std::make_shared<Seq2SeqBaseline>(cfg, Features::cases_and_search)}) {
    const auto p = m->init_params(4, 3);
    const wmn::TrainingWindow w{7, 5, 3};
    EXPECT_EQ(max_abs_diff(model::predict_normalized(*m, p, data, w), model::predict_normalized(*m, p, shuffled, w)),
              0.0);
  }
}

TEST(Seq2Seq, ZeroedEncoderStateForgetsInput) {
  const auto a = random_prepared(23, 4, 3, 12), b = random_prepared(24, 4, 3, 12);
  const Seq2SeqBaseline m(small_config(), Features::cases);
  const auto p = m.init_params(4, 3);
  auto decode_from_zero = [&](const model::PreparedSeries&) {
    ad::Tape t;
    const auto vars = model::bind_params(t, p, {});
    const model::LstmStack enc(vars, "encoder", 2);
    return m.decode(t, vars, enc.zero_states(t, 4), 3, model::Dropout{}).value();
  };
  const Matrix za = decode_from_zero(a), zb = decode_from_zero(b);
  EXPECT_EQ(max_abs_diff(za, zb), 0.0);
  for (std::size_t i = 1; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(za(i, j), za(0, j));
}

TEST(Seq2Seq, StatelessDecoderPredictsConstantSequence) {
  // no recurrent weights and a shut forget gate: every decoder step sees the
  // same zero input and zero memory, so every output is the same
  const Seq2SeqBaseline m(small_config(), Features::cases);
  auto p = m.init_params(4, 3);
  for (int l = 0; l < 2; ++l) {
    const std::string base = "decoder.l" + std::to_string(l);
    p[base + ".wh"] = Matrix(4, 16);
    for (std::size_t c = 4; c < 8; ++c) p[base + ".b"](0, c) = -1e4;
  }
  const auto data = random_prepared(25, 4, 3, 12);
  const Matrix out = model::predict_normalized(m, p, data, {8, 5, 3});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 1; j < 3; ++j) EXPECT_NEAR(out(i, j), out(i, 0), 1e-15);
}

TEST(Recurrent, LstmFitsConstantSeries) {
  const auto series = with_cases(3, std::vector<std::int64_t>(60, 9));
  std::vector<std::int64_t> all;
  for (std::int64_t t = 0; t < 60; ++t) all.push_back(t);
  const auto data = model::prepare_series(series, all, 2, wmn::AdjacencyNorm::column);
  model::ModelConfig cfg;
  cfg.k = 2;
  cfg.seed = 0;
  cfg.dropout = 0.0;
  cfg.learning_rate = 1e-3;
  const LstmBaseline m(cfg, Features::cases);
  const auto windows = wmn::build_windows(60, cfg.d1, cfg.d2);
  const auto res = model::train(m, data, windows, {});
  EXPECT_LT(model::evaluate_loss(m, res.params, data, windows), 1e-3);
  EXPECT_EQ(max_abs_diff(model::predict(m, res.params, data, windows.front()), Matrix(3, 7, 9.0)), 0.0);
}
