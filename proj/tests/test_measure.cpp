#include "indep/error.hpp"
#include "indep/measure.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace indep;

using th::code_of;
using th::col;
using th::vec;

TEST_CASE("make_measure renormalizes masses") {
  const auto d = make_measure(col({0.0}), vec({1.0}));
  CHECK(d.size() == 1);
  CHECK(d.weight(0) == 1.0);

  const auto two = make_measure(col({0.0, 1.0}), vec({2.0, 2.0}));
  CHECK(two.weight(0) == 0.5);
  CHECK(two.weight(1) == 0.5);

  Matrix p(2, 2);
  p << 0, 0, 1, 1;
  const auto planar = make_measure(p, vec({1.0, 3.0}));
  CHECK(planar.weight(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(planar.weight(1) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("make_measure rejects bad input") {
  CHECK(code_of([] { make_measure(Matrix(0, 1), Vector(0)); }) == ErrorCode::EmptySupport);
  CHECK(code_of([] { make_measure(col({0.0, 1.0}), vec({1.0, -0.5})); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([] { make_measure(col({0.0, 1.0}), vec({1.0})); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { make_measure(col({0.0, 1.0}), vec({0.0, 0.0})); }) == ErrorCode::InvalidWeights);
}

TEST_CASE("constructor tolerates rounding but not corrupt weights") {
  const DiscreteMeasure ok(col({0.0, 1.0}), vec({0.5, 0.5 + 5e-7}));
  CHECK(ok.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(code_of([] { DiscreteMeasure(col({0.0, 1.0}), vec({0.5, 0.6})); }) == ErrorCode::InvalidWeights);
}

TEST_CASE("second moment") {
  CHECK(second_moment(dirac(vec({0.0}))) == 0.0);
  CHECK(second_moment(make_measure(col({0.0, 2.0}), vec({0.5, 0.5}))) == 2.0);
  CHECK(second_moment(dirac(vec({3.0, 4.0}))) == 25.0);
}

TEST_CASE("mean") {
  CHECK(mean(dirac(vec({1.5, -2.0}))) == vec({1.5, -2.0}));
  CHECK(mean(make_measure(col({0.0, 2.0}), vec({0.5, 0.5})))(0) == 1.0);
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  CHECK(mean(make_measure(p, vec({0.5, 0.5}))) == vec({0.5, 0.5}));
}

TEST_CASE("mixture of a family") {
  const auto mu = make_measure(col({0.0, 3.0}), vec({1.0, 2.0}));
  const auto single = mixture(ConditionalFamily({{"a", 1.0, mu}}));
  CHECK(single.points() == mu.points());
  CHECK(single.weights().isApprox(mu.weights(), 1e-15));

  const auto pair = coalesce(mixture(ConditionalFamily({{"a", 0.5, dirac(vec({0.0}))}, {"b", 0.5, dirac(vec({1.0}))}})));
  CHECK(pair.points() == col({0.0, 1.0}));
  CHECK(pair.weights() == vec({0.5, 0.5}));

  // Mass accounting: 0.25 * 1 + 0.75 * 0.5 on 0, 0.75 * 0.5 on 1.
  const auto mixed = coalesce(mixture(ConditionalFamily(
      {{"a", 0.25, dirac(vec({0.0}))}, {"b", 0.75, make_measure(col({0.0, 1.0}), vec({0.5, 0.5}))}})));
  CHECK(mixed.weight(0) == doctest::Approx(0.25 * 1.0 + 0.75 * 0.5).epsilon(1e-15));
  CHECK(mixed.weight(1) == doctest::Approx(0.75 * 0.5).epsilon(1e-15));
}

TEST_CASE("coalesce merges exact duplicates and sorts") {
  const auto mu = make_measure(col({2.0, 0.0, 2.0, 1.0}), vec({1.0, 1.0, 1.0, 1.0}));
  const auto c = coalesce(mu);
  CHECK(c.points() == col({0.0, 1.0, 2.0}));
  CHECK(c.weights().isApprox(vec({0.25, 0.25, 0.5}), 1e-15));
  // Duplicates stay separate until coalesced.
  CHECK(mu.size() == 4);
}

TEST_CASE("lex_order is stable on ties") {
  Matrix p(4, 2);
  p << 1, 0, 0, 5, 1, 0, 0, 1;
  CHECK(lex_order(p) == std::vector<Index>{3, 1, 0, 2});
}

TEST_CASE("total variation") {
  CHECK(total_variation(vec({1.0, 0.0}), vec({0.0, 1.0})) == 1.0);
  CHECK(total_variation(vec({0.5, 0.5}), vec({0.5, 0.5})) == 0.0);
}

TEST_CASE("property: scaling all masses leaves the measure unchanged") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(8));
    Matrix p = Matrix::Random(n, 2);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w(i) = 0.01 + rng.uniform();
    const double c = std::exp(10.0 * (rng.uniform() - 0.5));
    const auto a = make_measure(p, w);
    const auto b = make_measure(p, c * w);
    CHECK((a.weights() - b.weights()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("property: mixture conserves mass, mean and second moment") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto family = oracle::random_family(rng, 1 + static_cast<Index>(rng.below(5)), 8, 1 + static_cast<Index>(rng.below(3)), 3.0);
    const auto mix = mixture(family);
    CHECK(std::abs(mix.weights().sum() - 1.0) <= 1e-15);
    double moment = 0.0;
    Vector m = Vector::Zero(family.dim());
    for (const auto& a : family.atoms()) {
      moment += a.probability * second_moment(a.measure);
      m += a.probability * mean(a.measure);
    }
    CHECK(std::abs(second_moment(mix) - moment) <= 1e-12 * std::max(1.0, moment));
    CHECK((mean(mix) - m).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
    CHECK((family_mean(family) - m).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("conditional family validation") {
  CHECK(code_of([] { ConditionalFamily({}); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([] { ConditionalFamily({{"a", 0.5, dirac(vec({0.0}))}}); }) == ErrorCode::InvalidWeights);
  CHECK(code_of([] {
          ConditionalFamily({{"a", 0.5, dirac(vec({0.0}))}, {"b", 0.5, dirac(vec({0.0, 1.0}))}});
        }) == ErrorCode::DimensionMismatch);
  const ConditionalFamily f({{"a", 0.25, dirac(vec({0.0}))}, {"b", 0.75, dirac(vec({1.0}))}});
  CHECK(f.find("b") == std::optional<Index>(1));
  CHECK_FALSE(f.find("c").has_value());
}

TEST_CASE("dataset validation") {
  auto row = [](std::string g, double x, double w, std::optional<double> u = std::nullopt) {
    return Row{std::move(g), Vector::Constant(1, x), w, u};
  };
  CHECK(code_of([] { Dataset({}); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([&] { Dataset({row("a", 0, 1), row("a", 1, 0)}); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([&] { Dataset({row("a", 0, 1, 0.5), row("a", 1, 1)}); }) == ErrorCode::MissingU);
  CHECK(code_of([&] { Dataset({row("a", 0, 1, 1.5)}); }) == ErrorCode::UOutOfRange);
  CHECK(code_of([&] {
          Dataset({row("a", 0, 1), Row{"b", Vector::Zero(2), 1.0, std::nullopt}});
        }) == ErrorCode::DimensionMismatch);

  const Dataset d({row("b", 0, 1), row("a", 1, 3), row("b", 2, 4)});
  CHECK(d.groups() == std::vector<std::string>{"b", "a"});
  CHECK(d.row(1).weight == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK_FALSE(d.has_u());
}
