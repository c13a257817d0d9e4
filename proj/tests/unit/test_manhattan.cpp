#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manhattan/error.hpp"
#include "manhattan/manhattan.hpp"

using namespace manhattan;

namespace {

std::vector<std::pair<double, double>> sampled(const std::function<double(double)>& f, double lo, double hi, int n) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    out.emplace_back(t, f(t));
  }
  return out;
}

// Samples of the curve r(theta) on the given angles.
CurveEstimate synthetic(const std::function<double(double)>& r, const std::vector<double>& thetas) {
  CurveEstimate c;
  for (double t : thetas) {
    CurveSample s;
    s.theta = t;
    s.r = r(t);
    s.x = s.r * std::cos(t);
    s.y = s.r * std::sin(t);
    c.samples.push_back(s);
  }
  return c;
}

double chordRadius(double t) { return 1.0 / (std::cos(t) + std::sin(t)); }

}  // namespace

TEST_SUITE("manhattan") {
  TEST_CASE("pure exponential growth") {
    const auto counts = sampled([](double t) { return std::floor(40 * std::exp(0.5 * t)); }, 12.0, 20.0, 24);
    const GrowthEstimate g = growthExponent(counts);
    CHECK(g.exponent == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(g.sampleCount == 24);
    CHECK(g.tMin == doctest::Approx(12.0));
    CHECK(g.tMax == doctest::Approx(20.0));
  }

  TEST_CASE("the log-integral model removes the 1/T factor") {
    // N = Ei(hT) ~ e^{hT}/(hT): the raw slope is biased low, the model is not.
    GrowthOptions o;
    o.logCorrection = true;
    o.model = Correction::LogIntegral;
    const double h = 0.5;
    const auto counts = sampled([&](double t) { return 50 * std::expint(h * t); }, 12.0, 20.0, 24);
    const GrowthEstimate g = growthExponent(counts, o);
    CHECK(g.uncorrected < h - 0.02);
    CHECK(g.exponent == doctest::Approx(h).epsilon(1e-3));
    CHECK(g.correctionApplied);
  }

  TEST_CASE("flat or tiny counts are insufficient") {
    CHECK_THROWS_AS(growthExponent(sampled([](double) { return 500.0; }, 1.0, 10.0, 24)), InsufficientData);
    CHECK_THROWS_AS(growthExponent(sampled([](double t) { return t; }, 1.0, 10.0, 24)), InsufficientData);
    CHECK_THROWS_AS(growthExponent(sampled([](double t) { return std::exp(t); }, 1.0, 10.0, 3)), InsufficientData);
  }

  TEST_CASE("tolerance policy") {
    const TolerancePolicy tol;
    CHECK(tol(0.001) == doctest::Approx(0.02));
    CHECK(tol(0.05) == doctest::Approx(0.1));
  }

  TEST_CASE("theta grid") {
    const auto t = chebyshevThetas(17, 0.05, true);
    REQUIRE(t.size() == 19);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(std::numbers::pi / 2));
    CHECK(t[9] == doctest::Approx(std::numbers::pi / 4));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
    // Symmetric about the diagonal.
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] + t[t.size() - 1 - i] == doctest::Approx(std::numbers::pi / 2));
    CHECK(chebyshevThetas(17, 0.05, false).size() == 17);
  }

  TEST_CASE("chord geometry") {
    const CurveEstimate c = synthetic(chordRadius, chebyshevThetas());
    for (double d : convexityDefects(c)) CHECK(std::fabs(d) < 1e-12);
    CHECK(diagonalPoint(c) == doctest::Approx(0.5));
    CHECK(normalSlope(c, 0.5) == doctest::Approx(1.0));
    CHECK(normalSlope(c, 0.9) == doctest::Approx(1.0));
  }

  TEST_CASE("convexity defects have the right sign") {
    const auto thetas = chebyshevThetas();
    // A quarter circle bulges away from the origin: not convex in this sense.
    const CurveEstimate circle = synthetic([](double) { return 1.0; }, thetas);
    double worst = -1;
    for (double d : convexityDefects(circle)) worst = std::max(worst, d);
    CHECK(worst > 1e-3);
    // sqrt(x) + sqrt(y) = 1 bends toward it.
    const CurveEstimate concave = synthetic(
        [](double t) { return 1.0 / std::pow(std::sqrt(std::cos(t)) + std::sqrt(std::sin(t)), 2); }, thetas);
    for (double d : convexityDefects(concave)) CHECK(d <= 1e-12);
  }

  TEST_CASE("normal slope follows the level sets of a weighted norm") {
    // x/2 + y = 1 has slope -1/2, so the normal slope is 2.
    const CurveEstimate c =
        synthetic([](double t) { return 1.0 / (0.5 * std::cos(t) + std::sin(t)); }, chebyshevThetas(17, 0.05, false));
    CHECK(normalSlope(c, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(normalSlope(c, 5.0), OutOfRange);
  }

  TEST_CASE("lambda grid stays inside the dilation range") {
    const DilationBounds d{0.5, 2.0, std::log(2.0)};
    const auto g = lambdaGrid(d, 13);
    REQUIRE(g.size() == 13);
    CHECK(g.front() > 0.5);
    CHECK(g.back() < 2.0);
    CHECK(g.front() == doctest::Approx(0.575));
  }
}
