#include <doctest.h>

#include <numbers>
#include <random>

#include "manhattan/error.hpp"
#include "manhattan/moebius.hpp"

using namespace manhattan;

namespace {

Moebius randomElement(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  return Moebius::rotation(angle(rng)) * Moebius::translation(shift(rng)) * Moebius::rotation(angle(rng));
}

}  // namespace

TEST_SUITE("moebius") {
  TEST_CASE("sign normalization makes -M equal M") {
    const Moebius m(2.0, 1.0, 1.0, 1.0);
    const Moebius n(-2.0, -1.0, -1.0, -1.0);
    CHECK(m.approxEqual(n, 0.0));
    CHECK(m.a() > 0);
  }

  TEST_CASE("fromMatrix rescales to determinant one") {
    const Moebius m = Moebius::fromMatrix(4.0, 2.0, 2.0, 2.0);
    CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.a() == doctest::Approx(2.0));
  }

  TEST_CASE("random products keep det 1 and associate") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      const Moebius x = randomElement(rng), y = randomElement(rng), z = randomElement(rng);
      CHECK((x * y).det() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(Moebius::distance((x * y) * z, x * (y * z)) < 1e-8 * (1 + (x * y * z).coshDisplacement()));
      CHECK((x * x.inverse()).approxEqual(Moebius::identity(), 1e-9 * x.coshDisplacement()));
      // Trace is a class function.
      CHECK(std::fabs(conjugate(x, y).trace()) == doctest::Approx(std::fabs(x.trace())).epsilon(1e-9));
    }
  }

  TEST_CASE("pow agrees with repeated products") {
    const Moebius m(1.5, 0.7, 0.2, (1 + 0.7 * 0.2) / 1.5);
    Moebius p;
    for (int k = 0; k < 7; ++k) p = p * m;
    CHECK(Moebius::distance(m.pow(7), p) < 1e-9 * p.coshDisplacement());
    CHECK(Moebius::distance(m.pow(-3), m.inverse() * m.inverse() * m.inverse()) < 1e-9);
    CHECK(m.pow(0).approxEqual(Moebius::identity()));
  }

  TEST_CASE("classification by trace") {
    CHECK((classify(Moebius::identity()).tag == IsometryTag::Identity));
    CHECK((classify(Moebius::rotation(0.3)).tag == IsometryTag::Elliptic));
    CHECK((classify(Moebius(1.0, 1.0, 0.0, 1.0)).tag == IsometryTag::Parabolic));
    const IsometryClass h = classify(Moebius::translation(1.25));
    CHECK((h.tag == IsometryTag::Hyperbolic));
    CHECK(h.translationLength == doctest::Approx(1.25));
    // Attracting fixed point of diag(e^t/2, e^-t/2) is infinity = (1 : 0).
    CHECK(ProjPoint::separation(h.attracting, ProjPoint{1.0, 0.0}) < 1e-12);
    CHECK(ProjPoint::separation(h.repelling, ProjPoint{0.0, 1.0}) < 1e-12);
    CHECK_THROWS_AS(translationLength(Moebius::rotation(0.5)), NotHyperbolic);
  }

  TEST_CASE("translation length is conjugation invariant and matches the trace") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      const Moebius h = randomElement(rng);
      const double t = 0.1 + 0.1 * i;
      const Moebius g = conjugate(Moebius::translation(t), h);
      CHECK(translationLength(g) == doctest::Approx(t).epsilon(1e-8));
      CHECK(lengthFromTrace(g.trace()) == doctest::Approx(t).epsilon(1e-8));
      // Fixed points are fixed.
      const IsometryClass k = classify(g);
      CHECK(ProjPoint::separation(g.apply(k.attracting), k.attracting) < 1e-9);
      CHECK(ProjPoint::separation(g.apply(k.repelling), k.repelling) < 1e-9);
    }
  }

  TEST_CASE("axisTranslation is a one-parameter subgroup through m") {
    const Moebius m = conjugate(Moebius::translation(1.7), Moebius::rotation(0.4) * Moebius::translation(0.3));
    CHECK(Moebius::distance(axisTranslation(m, translationLength(m)), m) < 1e-10);
    const Moebius half = axisTranslation(m, 0.85);
    CHECK(Moebius::distance(half * half, m) < 1e-10);
    CHECK(translationLength(half) == doctest::Approx(0.85));
  }

  TEST_CASE("displacement of a translation through i is its length") {
    CHECK(Moebius::translation(2.5).displacement() == doctest::Approx(2.5));
    CHECK(Moebius::rotation(1.0).displacement() == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(axisDistanceFromBase(Moebius::translation(3.0)) == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("moveToBase sends x + iy to i") {
    const Moebius m = moveToBase(0.7, 2.3);
    // m(z) = (a z + b)/(c z + d) at z = 0.7 + 2.3 i.
    const double x = 0.7, y = 2.3;
    const double re_n = m.a() * x + m.b(), im_n = m.a() * y;
    const double re_d = m.c() * x + m.d(), im_d = m.c() * y;
    const double den = re_d * re_d + im_d * im_d;
    CHECK((re_n * re_d + im_n * im_d) / den == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((im_n * re_d - re_n * im_d) / den == doctest::Approx(1.0));
  }
}
