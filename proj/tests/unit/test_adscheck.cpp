#include <doctest.h>

#include <numbers>
#include <random>

#include "manhattan/adscheck.hpp"
#include "manhattan/error.hpp"

using namespace manhattan;

namespace {

struct Gen {
  std::mt19937_64 rng{3};
  Moebius element() {
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi), shift(-1.5, 1.5);
    return Moebius::rotation(angle(rng)) * Moebius::translation(shift(rng)) * Moebius::rotation(angle(rng));
  }
  Moebius hyperbolic(double lo, double hi) {
    std::uniform_real_distribution<double> len(lo, hi);
    const Moebius h = element();
    return h * Moebius::translation(len(rng)) * h.inverse();
  }
};

}  // namespace

TEST_SUITE("adscheck") {
  TEST_CASE("the form is invariant under the isometry group") {
    Gen g;
    for (int i = 0; i < 100; ++i) {
      const AdSPoint x = g.element(), y = g.element();
      const AdSIsometry h{g.element(), g.element()};
      // Up to sign: points are PSL2 classes.
      CHECK(std::fabs(adsForm(h.apply(x), h.apply(y))) == doctest::Approx(std::fabs(adsForm(x, y))).epsilon(1e-9));
      CHECK(adsForm(x, x) == doctest::Approx(-1.0));
      CHECK(adsForm(x, y) == doctest::Approx(adsForm(y, x)));
    }
  }

  TEST_CASE("distance along a diagonal translation") {
    // (A_s, A_t) moves the identity to A_s A_t^-1 = A_{s-t}: the distance is |s - t|/2.
    const AdSIsometry g{Moebius::translation(3.0), Moebius::translation(-1.0)};
    const LorentzLength l = lorentzLength(g);
    CHECK(l.direct == doctest::Approx(2.0));
    CHECK(l.fromLengths == doctest::Approx(2.0));
    CHECK(spacelikeDistance(Moebius::identity(), g.apply(Moebius::identity())) == doctest::Approx(2.0));
  }

  TEST_CASE("timelike separation is rejected") {
    CHECK_THROWS_AS(spacelikeDistance(Moebius::identity(), Moebius::rotation(0.4)), NotSpacelikeSeparated);
    const AdSIsometry e{Moebius::rotation(0.3), Moebius::translation(1.0)};
    CHECK_THROWS_AS(lorentzLength(e), NotHyperbolicPair);
  }

  TEST_CASE("invariant geodesics are translated by the averaged lengths") {
    Gen g;
    for (int i = 0; i < 50; ++i) {
      const AdSIsometry h{g.hyperbolic(0.2, 4.0), g.hyperbolic(0.2, 4.0)};
      const double l = translationLength(h.left), m = translationLength(h.right);
      const auto geos = invariantGeodesics(h);
      CHECK(geos[0].translation == doctest::Approx(0.5 * (l + m)));
      CHECK(geos[1].translation == doctest::Approx(0.5 * std::fabs(l - m)));
      CHECK(spacelikeDistance(geos[0].base, h.apply(geos[0].base)) == doctest::Approx(0.5 * (l + m)).epsilon(1e-8));
    }
  }

  TEST_CASE("the axis endpoints are fixed and the map is equivariant") {
    Gen g;
    for (int i = 0; i < 50; ++i) {
      const AdSIsometry h{g.hyperbolic(0.3, 3.0), g.hyperbolic(0.3, 3.0)};
      const auto [plus, minus] = axis(h);
      CHECK(BoundaryPoint::distance(plus.moved(h), plus) < 1e-9);
      CHECK(BoundaryPoint::distance(minus.moved(h), minus) < 1e-9);
      // axis(k h k^-1) = k . axis(h)
      const AdSIsometry k{g.element(), g.element()};
      const auto [p2, m2] = axis(k * h * k.inverse());
      CHECK(BoundaryPoint::distance(p2, plus.moved(k)) < 1e-8);
      CHECK(BoundaryPoint::distance(m2, minus.moved(k)) < 1e-8);
    }
  }

  TEST_CASE("battery is reproducible from its seed") {
    const LorentzBattery a = lorentzBattery(500, 42), b = lorentzBattery(500, 42);
    CHECK(a.pairs == 500);
    CHECK(a.maxDeviation == b.maxDeviation);
    CHECK(a.maxDeviation <= 1e-8);
  }
}
