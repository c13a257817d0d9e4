#include <doctest.h>

#include <cmath>

#include "manhattan/error.hpp"
#include "manhattan/reps.hpp"

using namespace manhattan;

namespace {

double maxLengthGap(const MarkedRepresentation& x, const MarkedRepresentation& y, int depth) {
  double gap = 0.0;
  for (const ConjClass& c : enumerateClasses(x.presentation, depth)) {
    gap = std::max(gap, std::fabs(lengthOf(x, c) - lengthOf(y, c)));
  }
  return gap;
}

}  // namespace

TEST_SUITE("reps") {
  TEST_CASE("Fenchel-Nielsen pants curves have the requested lengths") {
    FenchelNielsen fn;
    fn.lengths = {1.3, 2.1, 2.9};
    fn.twists = {0.4, -0.2, 0.9};
    const MarkedRepresentation r = fromFenchelNielsen(fn);
    const Presentation& p = r.presentation;
    CHECK((p.mode() == PresentationMode::GenusTwoSurface));
    CHECK(lengthOf(r, p.parse("a")) == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(lengthOf(r, p.parse("c")) == doctest::Approx(2.1).epsilon(1e-10));
    CHECK(lengthOf(r, thirdPantsCurve(p)) == doctest::Approx(2.9).epsilon(1e-10));
    CHECK(r.relatorResidual < 1e-10);
    CHECK(r.discretenessWitness > 0);
  }

  TEST_CASE("relator residual stays small down to short cuffs") {
    for (double l : {0.1, 0.05, 0.02, 0.01}) {
      FenchelNielsen fn;
      fn.lengths[0] = l;
      const MarkedRepresentation r = fromFenchelNielsen(fn);
      CAPTURE(l);
      CHECK(r.relatorResidual < 1e-7);
      CHECK(lengthOf(r, r.presentation.parse("a")) == doctest::Approx(l).epsilon(1e-6));
    }
  }

  TEST_CASE("a full twist along a1 is the Dehn twist") {
    FenchelNielsen fn;
    const MarkedRepresentation r0 = fromFenchelNielsen(fn);
    fn.twists[0] = fn.lengths[0];
    const MarkedRepresentation r1 = fromFenchelNielsen(fn);
    const Presentation& p = r0.presentation;
    const ConjClass a = canonicalClass(p.parse("a"), p);
    // One of the two handednesses matches the twist-coordinate convention.
    const double plus = maxLengthGap(remark(r0, twistAutomorphism(p, a, 1)), r1, 4);
    const double minus = maxLengthGap(remark(r0, twistAutomorphism(p, a, -1)), r1, 4);
    CHECK(std::min(plus, minus) < 1e-8);
    CHECK(std::max(plus, minus) > 1e-3);
  }

  TEST_CASE("free pair traces") {
    const MarkedRepresentation r = fromFreePair(3.0, 3.5, 4.0);
    const Presentation& p = r.presentation;
    CHECK(lengthOf(r, p.parse("a")) == doctest::Approx(2 * std::acosh(1.5)));
    CHECK(lengthOf(r, p.parse("b")) == doctest::Approx(2 * std::acosh(1.75)));
    CHECK(lengthOf(r, p.parse("ab")) == doctest::Approx(2 * std::acosh(2.0)));
    // Fricke: tr[a,b] = x^2 + y^2 + z^2 - xyz - 2.
    const double x = 3.0, y = 3.5, z = 4.0;
    CHECK(std::fabs(evaluate(r, p.parse("abAB")).trace()) ==
          doctest::Approx(std::fabs(x * x + y * y + z * z - x * y * z - 2)));
    // An elliptic generator is not a discrete faithful pair.
    CHECK_THROWS_AS(fromFreePair(1.5, 3.0, 3.0), NotDiscernedDiscrete);
  }

  TEST_CASE("degenerate parameters are rejected") {
    FenchelNielsen fn;
    fn.lengths[1] = 0.0;
    CHECK_THROWS_AS(fromFenchelNielsen(fn), DegenerateParameters);
    fn.lengths[1] = 2.0;
    fn.twists[2] = std::nan("");
    CHECK_THROWS_AS(fromFenchelNielsen(fn), DegenerateParameters);
  }

  TEST_CASE("remarked evaluation matches plain products on short images") {
    const MarkedRepresentation r = probeRepresentation(PresentationMode::GenusTwoSurface);
    const Presentation& p = r.presentation;
    const auto t = twistAutomorphism(p, canonicalClass(p.parse("a"), p), 1);
    const MarkedRepresentation s = remark(r, t);
    for (const char* w : {"a", "b", "bc", "abD", "cdCb"}) {
      const Word u = p.parse(w);
      const Moebius direct = evaluate(r, applyAutomorphism(t, u));
      CAPTURE(w);
      CHECK(Moebius::distance(evaluate(s, u), direct) < 1e-9 * direct.coshDisplacement());
      CHECK(lengthOf(s, u) == doctest::Approx(lengthOf(r, applyAutomorphism(t, u))).epsilon(1e-10));
    }
    CHECK(s.history.size() == 1);
    CHECK(s.base.size() == 4);
  }

  TEST_CASE("Dehn reduction preserves the represented element") {
    const MarkedRepresentation r = probeRepresentation(PresentationMode::GenusTwoSurface);
    const Presentation& p = r.presentation;
    for (const char* w : {"abABcd", "BadcDCbA", "abABcdCDab", "dcDCbaB"}) {
      const Word u = p.parse(w);
      const Moebius x = evaluate(r, u);
      CAPTURE(w);
      CHECK(Moebius::distance(x, evaluate(r, dehnReduce(u, p))) < 1e-9 * x.coshDisplacement());
    }
  }

  TEST_CASE("descriptor round-trip, including remarked bases") {
    FenchelNielsen fn;
    fn.lengths = {1.7, 2.2, 2.6};
    fn.twists = {0.3, 0.0, -0.5};
    const MarkedRepresentation r = fromFenchelNielsen(fn);
    const Presentation& p = r.presentation;
    const MarkedRepresentation s = remark(r, twistAutomorphism(p, canonicalClass(p.parse("c"), p), -2));
    for (const MarkedRepresentation* x : {&r, &s}) {
      const std::string text = writeDescriptor(*x);
      const MarkedRepresentation y = readDescriptor(text);
      CHECK(writeDescriptor(y) == text);
      CHECK(y.history.size() == x->history.size());
      CHECK(maxLengthGap(*x, y, 3) == 0.0);
    }
    const std::string text = writeDescriptor(r);
    CHECK_THROWS_AS(readDescriptor(text.substr(0, text.size() / 2)), FormatError);
    CHECK_THROWS_AS(readDescriptor("MREP/9\n"), FormatError);
  }
}
