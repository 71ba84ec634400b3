#include <cmath>

#include "doctest.h"
#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"
#include "mole2d/rng.hpp"
#include "test_support.hpp"

using namespace mole2d;

TEST_CASE("wrap maps into the half-open interval") {
  CHECK(wrap(0.0) == 0.0);
  CHECK(wrap(kPi) == kPi);
  CHECK(wrap(-kPi) == kPi);  // boundary resolves towards +pi
  CHECK(wrap(1.5 * kPi) == doctest::Approx(-0.5 * kPi).epsilon(1e-15));
  CHECK(wrap(7.0) == doctest::Approx(7.0 - kTwoPi));
  CHECK_THROWS_AS(wrap(std::nan("")), Error);

  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double w = rng.uniform(-40.0, 40.0);
    const double r = wrap(w);
    CHECK(r > -kPi);
    CHECK(r <= kPi);
  }
}

TEST_CASE("wrap is a homomorphism for addition") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-20.0, 20.0);
    const double b = rng.uniform(-20.0, 20.0);
    CHECK(wrap(wrap(a) + wrap(b)) == doctest::Approx(wrap(a + b)).epsilon(1e-9));
  }
}

TEST_CASE("wrap minimizes the absolute value over 2 pi shifts") {
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const double w = rng.uniform(-30.0, 30.0);
    const double best = std::abs(wrap(w));
    for (int k = -5; k <= 5; ++k)
      CHECK(best <= std::abs(w + kTwoPi * k) + 1e-12);
  }
}

TEST_CASE("regularizer matches the wrap decomposition") {
  CHECK(regularizer(0.0) == 0);
  CHECK(regularizer(1.5 * kPi) == -1);
  CHECK(regularizer(-kPi) == +1);

  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double w = rng.uniform(-40.0, 40.0);
    const long long k = regularizer(w);
    CHECK(wrap(w) == doctest::Approx(w + kTwoPi * static_cast<double>(k)).epsilon(1e-12));
  }
}

TEST_CASE("wrapped pdf approaches the uniform density for large variance") {
  for (double x : {0.0, kPi / 2.0, kPi})
    CHECK(wrapped_pdf(x, 100.0) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-3));
}

TEST_CASE("wrapped pdf is symmetric and matches the unwrapped peak") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0.0, kPi);
    CHECK(wrapped_pdf(x, 0.3) == doctest::Approx(wrapped_pdf(-x, 0.3)).epsilon(1e-14));
  }
  // sigma = 0.1 at the mode: alias terms are negligible
  const double expected = 1.0 / (0.1 * std::sqrt(kTwoPi));
  CHECK(std::abs(wrapped_pdf(0.0, 0.01) - expected) < 1e-9);
}

TEST_CASE("wrapped pdf integrates to one") {
  const int points = 10000;
  const double h = kTwoPi / points;
  for (double sigma : {0.05, 0.3, 1.0, 3.0}) {
    const WrappedGaussian wg(sigma * sigma);
    double integral = 0.0;
    for (int i = 0; i < points; ++i) {
      const double a = -kPi + i * h;
      integral += 0.5 * (wg.pdf(a) + wg.pdf(a + h)) * h;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("negative log pdf is quadratic in the small-noise regime") {
  for (double sigma : {0.05, 0.2, kPi / 9.0}) {
    const WrappedGaussian wg(sigma * sigma);
    for (int i = -10; i <= 10; ++i) {
      const double x = 3.0 * sigma * i / 10.0;
      const double quadratic =
          x * x / (2.0 * sigma * sigma) + std::log(sigma * std::sqrt(kTwoPi));
      CHECK(std::abs(-std::log(wg.pdf(x)) - quadratic) < 1e-6);
    }
  }
}

TEST_CASE("samples concentrate as sigma goes to zero") {
  Rng rng(23);
  const WrappedGaussian wg(1e-8);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(wg.sample(rng)) < 1e-3);
}

TEST_CASE("sum of two wrapped samples follows the convolved distribution") {
  const double v1 = 0.3 * 0.3, v2 = 0.4 * 0.4;
  Rng rng(29);
  const int trials = 100000;
  double sum_cos = 0.0;
  for (int i = 0; i < trials; ++i)
    sum_cos += std::cos(wrap(sample_wrapped(v1, rng) + sample_wrapped(v2, rng)));
  // first circular moment of a zero-mean wrapped Gaussian: exp(-var / 2)
  const double expected = std::exp(-0.5 * (v1 + v2));
  CHECK(std::abs(sum_cos / trials - expected) < 3.0 / std::sqrt(trials));
}

TEST_CASE("circular mean of wrapped samples is near zero") {
  Rng rng(31);
  const int trials = 100000;
  double sum_sin = 0.0, sum_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double s = std::sin(sample_wrapped(0.25, rng));
    sum_sin += s;
    sum_sq += s * s;
  }
  const double mean = sum_sin / trials;
  const double sd = std::sqrt(sum_sq / trials - mean * mean);
  CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(trials));
}

TEST_CASE("edge splitting leaves compliant graphs alone") {
  const PoseGraph g = testing::toy_graph(0.01);
  const PoseGraph out = split_large_variance_edges(g);
  CHECK(out.m() == g.m());
  CHECK(out.node_count == g.node_count);
}

TEST_CASE("edge splitting subdivides large-variance edges") {
  std::vector<EdgeSpec> edges = {
      {0, 1, 0.5, 1.44},  // sigma = 1.2 -> q = 6 pieces of variance 0.24
      {1, 2, 0.2, 0.01},
      {2, 0, -0.3, 0.01},
  };
  const PoseGraph g = build_graph(3, edges);
  const PoseGraph out = split_large_variance_edges(g, kPi / 2.0);

  CHECK(out.m() == 6 + 2);
  CHECK(out.node_count == 3 + 5);
  CHECK(out.ell() == g.ell());  // serial subdivision preserves the cycle space
  int pieces = 0;
  for (int e = 0; e < out.m(); ++e)
    if (out.variances[e] == doctest::Approx(0.24)) {
      ++pieces;
      CHECK(out.measurements[e] == doctest::Approx(0.5 / 6.0));
    }
  CHECK(pieces == 6);
}
