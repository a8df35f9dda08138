#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "emoclass/baselines.hpp"
#include "support.hpp"

using namespace emoclass;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an emoclass::Error";
  return Errc::io;
}

Matrix column_matrix(const std::vector<double>& xs) {
  Matrix m(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
  return m;
}

struct Embedded {
  Dataset train, test;
  EmbeddingStore store{EmbedderConfig::kHashingDim, EmbedderConfig{}.fingerprint()};
};

Embedded separable(std::uint64_t seed) {
  const auto corpus = emoclass::testing::make_separable_corpus(seed, 48, 8, 24);
  Embedded e;
  e.train = parse_dataset(corpus.train_csv, LabelSchema::english(), Split::train);
  e.test = parse_dataset(corpus.test_csv, LabelSchema::english(), Split::test);
  emoclass::testing::embed_into(e.train, e.store);
  emoclass::testing::embed_into(e.test, e.store);
  return e;
}

}  // namespace

TEST(LogReg, SeparatesOneDimensionalData) {
  const auto x = column_matrix({-2, -1.5, -1, 1, 1.5, 2});
  const std::vector<std::uint8_t> y{0, 0, 0, 1, 1, 1};
  const auto p = fit_logreg(x, y);
  for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(predict_binary(p, x.row(i)).label, y[i]);
  EXPECT_GT(p.w[0], 0.0);
}

TEST(LogReg, SymmetricDataGivesZeroBias) {
  const auto x = column_matrix({-1, -0.5, 0.5, 1});
  const std::vector<std::uint8_t> y{0, 0, 1, 1};
  EXPECT_LT(std::abs(fit_logreg(x, y).bias), 1e-6);
}

TEST(LogReg, ObjectiveTraceNeverIncreases) {
  detail::Engine rng(8);
  Matrix x(40, 3);
  std::vector<std::uint8_t> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t d = 0; d < 3; ++d) x(i, d) = detail::uniform(rng, -1, 1);
    y[i] = detail::bounded(rng, 2);
  }
  std::vector<double> trace;
  const auto p = fit_logreg(x, y, {}, &trace);
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace.size(), p.iterations + 1);
  EXPECT_NEAR(trace.front(), std::log(2.0), 1e-12);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]);
}

TEST(LogReg, ZeroInitGivesOneHalf) {
  LogRegParams p;
  p.w = {0.0, 0.0};
  const auto d = predict_binary(p, std::vector<double>{3.0, -1.0});
  EXPECT_EQ(d.score, 0.5);
  EXPECT_EQ(d.label, 1);
}

TEST(LogReg, DesignErrors) {
  EXPECT_EQ(code_of([] { (void)fit_logreg(Matrix{}, {}); }), Errc::empty_training);
  const auto x = column_matrix({1, 2});
  const std::vector<std::uint8_t> y{1};
  EXPECT_EQ(code_of([&] { (void)fit_logreg(x, y); }), Errc::dim_mismatch);
}

TEST(Gnb, MeansPriorsAndDecisions) {
  const auto x = column_matrix({-1, -1, 1, 1});
  const std::vector<std::uint8_t> y{0, 0, 1, 1};
  const auto p = fit_gnb(x, y);
  EXPECT_EQ(p.mean[0], (Vector{-1.0}));
  EXPECT_EQ(p.mean[1], (Vector{1.0}));
  EXPECT_DOUBLE_EQ(p.log_prior[0], std::log(0.5));
  EXPECT_DOUBLE_EQ(p.log_prior[1], std::log(0.5));
  // Class variances are 0 and get the floor 1e-9 * overall variance (1).
  EXPECT_DOUBLE_EQ(p.var[0][0], 1e-9);
  EXPECT_EQ(predict_binary(p, std::vector<double>{0.0}).label, 0);
  EXPECT_EQ(predict_binary(p, std::vector<double>{0.9}).label, 1);
  EXPECT_EQ(predict_binary(p, std::vector<double>{-0.9}).label, 0);
}

TEST(Gnb, IdenticalRowsUseAbsoluteFloor) {
  const auto x = column_matrix({0.5, 0.5, 0.5});
  const std::vector<std::uint8_t> y{0, 1, 1};
  const auto p = fit_gnb(x, y);
  EXPECT_DOUBLE_EQ(p.var[0][0], 1e-9);
  EXPECT_DOUBLE_EQ(p.var[1][0], 1e-9);
  const auto lj = gnb_log_joint(p, std::vector<double>{0.5});
  EXPECT_TRUE(std::isfinite(lj[0]));
  EXPECT_EQ(predict_binary(p, std::vector<double>{0.5}).label, 1);
}

TEST(Gnb, SingleClassRejected) {
  const auto x = column_matrix({1, 2});
  const std::vector<std::uint8_t> y{1, 1};
  EXPECT_EQ(code_of([&] { (void)fit_gnb(x, y); }), Errc::single_class);
}

TEST(Gnb, WrongDimRejected) {
  const auto p = fit_gnb(column_matrix({-1, 1}), std::vector<std::uint8_t>{0, 1});
  EXPECT_EQ(code_of([&] { (void)gnb_log_joint(p, std::vector<double>{1, 2}); }), Errc::dim_mismatch);
}

TEST(MultiOutput, ConstantLabelsGetConstantLearners) {
  const auto e = separable(1);
  auto [x, y] = gather(e.train, e.store);
  for (std::size_t r = 0; r < y.rows(); ++r) y(r, 2) = 0;
  const auto model = fit_multioutput(LearnerKind::gnb, x, y, e.train.schema);
  ASSERT_EQ(model.learners.size(), 5u);
  EXPECT_EQ(std::get<ConstantLearner>(model.learners[2]).value, 0);
  EXPECT_TRUE(std::holds_alternative<GnbParams>(model.learners[0]));
}

TEST(MultiOutput, FitsSeparableCorpus) {
  const auto e = separable(2);
  const auto [x, y] = gather(e.train, e.store);
  const auto [tx, ty] = gather(e.test, e.store);
  for (const auto kind : {LearnerKind::logreg, LearnerKind::gnb}) {
    const auto model = fit_multioutput(kind, x, y, e.train.schema, e.store.fingerprint());
    EXPECT_EQ(macro_f1(confusion(predict_all(model, x), y)), 1.0) << learner_kind_name(kind);
    EXPECT_EQ(macro_f1(confusion(predict_all(model, tx), ty)), 1.0) << learner_kind_name(kind);
  }
}

TEST(MultiOutput, ShapeErrors) {
  const auto e = separable(2);
  const auto [x, y] = gather(e.train, e.store);
  EXPECT_EQ(code_of([&] { (void)fit_multioutput(LearnerKind::logreg, x, y, LabelSchema::full("x")); }),
            Errc::dim_mismatch);
  EXPECT_EQ(code_of([&] { (void)fit_multioutput(LearnerKind::logreg, Matrix{}, BinaryMatrix{}, e.train.schema); }),
            Errc::empty_training);
  const auto model = fit_multioutput(LearnerKind::logreg, x, y, e.train.schema);
  EXPECT_EQ(code_of([&] { (void)predict_row(model, std::vector<double>{1.0, 2.0}); }), Errc::dim_mismatch);
}

TEST(MultiOutput, DeterministicFits) {
  const auto e = separable(3);
  const auto [x, y] = gather(e.train, e.store);
  for (const auto kind : {LearnerKind::logreg, LearnerKind::gnb}) {
    EXPECT_EQ(format_baseline(fit_multioutput(kind, x, y, e.train.schema)),
              format_baseline(fit_multioutput(kind, x, y, e.train.schema)));
  }
}

// Property: labels are fitted independently, so permuting label columns
// permutes the prediction columns and nothing else.
TEST(MultiOutput, LabelPermutationInvariance) {
  const auto e = separable(4);
  const auto [x, y] = gather(e.train, e.store);
  const auto [tx, ty] = gather(e.test, e.store);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  BinaryMatrix permuted(y.rows(), y.cols());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t l = 0; l < perm.size(); ++l) permuted(r, l) = y(r, perm[l]);
  }
  for (const auto kind : {LearnerKind::logreg, LearnerKind::gnb}) {
    const auto a = predict_all(fit_multioutput(kind, x, y, e.train.schema), tx);
    const auto b = predict_all(fit_multioutput(kind, x, permuted, e.train.schema), tx);
    for (std::size_t r = 0; r < tx.rows(); ++r) {
      for (std::size_t l = 0; l < perm.size(); ++l) EXPECT_EQ(b(r, l), a(r, perm[l]));
    }
  }
}

TEST(MultiOutput, PredictDictHasOneEntryPerLabel) {
  const auto e = separable(5);
  const auto [x, y] = gather(e.train, e.store);
  const auto model = fit_multioutput(LearnerKind::logreg, x, y, e.train.schema, e.store.fingerprint());
  const auto embedder = make_hashing_embedder({});
  const auto dict = predict_dict(model, e.test.samples[0].text, embedder);
  ASSERT_EQ(dict.size(), 5u);
  for (std::size_t l = 0; l < 5; ++l) EXPECT_EQ(dict.at(e.test.schema.names()[l]), e.test.samples[0].labels[l]);
  EXPECT_EQ(code_of([&] { (void)predict_dict(model, "  ", embedder); }), Errc::empty_text);
  EmbedderConfig other;
  other.seed = 9;
  EXPECT_EQ(code_of([&] { (void)predict_dict(model, "hello", make_hashing_embedder(other)); }),
            Errc::fingerprint_mismatch);
}

TEST(Checkpoint, BaselineRoundTripIsExact) {
  const auto e = separable(6);
  auto [x, y] = gather(e.train, e.store);
  for (std::size_t r = 0; r < y.rows(); ++r) y(r, 4) = 1;
  const auto [tx, ty] = gather(e.test, e.store);
  emoclass::testing::TempDir dir;
  for (const auto kind : {LearnerKind::logreg, LearnerKind::gnb}) {
    const auto model = fit_multioutput(kind, x, y, e.train.schema, e.store.fingerprint());
    save_baseline(model, dir.file("b.txt"));
    const auto back = load_baseline(dir.file("b.txt"));
    EXPECT_EQ(format_baseline(back), format_baseline(model));
    EXPECT_EQ(back.learners, model.learners);
    EXPECT_EQ(back.scaler, model.scaler);
    for (std::size_t r = 0; r < tx.rows(); ++r) {
      const auto a = predict_row(model, tx.row(r));
      const auto b = predict_row(back, tx.row(r));
      for (std::size_t l = 0; l < a.size(); ++l) {
        EXPECT_EQ(a[l].label, b[l].label);
        EXPECT_EQ(a[l].score, b[l].score);
      }
    }
  }
  EXPECT_EQ(code_of([] { (void)parse_baseline("emoclass-head v1\n"); }), Errc::parse);
}

TEST(Kinds, ParseNames) {
  EXPECT_EQ(parse_learner_kind("gnb"), LearnerKind::gnb);
  EXPECT_EQ(learner_kind_name(parse_learner_kind("logreg")), "logreg");
  EXPECT_EQ(code_of([] { (void)parse_learner_kind("svm"); }), Errc::config);
}
