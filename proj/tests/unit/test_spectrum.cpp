#include <doctest.h>

#include <cmath>
#include <set>

#include "manhattan/error.hpp"
#include "manhattan/spectrum.hpp"

using namespace manhattan;

namespace {

const PairSpectrum& small() {
  static const PairSpectrum s = [] {
    FenchelNielsen fn;
    fn.lengths = {2.4, 1.8, 2.2};
    fn.twists = {0.6, 0.0, -0.4};
    return classSpectrum(fromFenchelNielsen({}), fromFenchelNielsen(fn), 14.0);
  }();
  return s;
}

}  // namespace

TEST_SUITE("spectrum") {
  TEST_CASE("entries are sorted, below the cutoff and carry exact lengths") {
    const PairSpectrum& s = small();
    REQUIRE(s.entries.size() > 50);
    double prev = 0.0;
    for (const SpectrumEntry& e : s.entries) {
      CHECK(e.l1 + e.l2 <= s.cutoff + 1e-12);
      CHECK(e.l1 + e.l2 >= prev - 1e-12);
      prev = e.l1 + e.l2;
      CHECK(e.l1 == doctest::Approx(lengthOf(s.rep1, e.cls)).epsilon(1e-9));
      CHECK(e.l2 == doctest::Approx(lengthOf(s.rep2, e.cls)).epsilon(1e-9));
      CHECK(e.primitive == isPrimitive(e.cls));
    }
  }

  // Symbolic conjugacy by a short conjugator; Dehn's algorithm decides
  // triviality in the surface group.
  bool conjugateBySearch(const Presentation& p, const Word& u, const Word& v, int maxLen) {
    std::vector<Letter> vInv(v.letters.rbegin(), v.letters.rend());
    for (Letter& x : vInv) x = inverseLetter(x);
    std::vector<std::vector<Letter>> frontier{{}};
    for (int len = 0; len <= maxLen; ++len) {
      std::vector<std::vector<Letter>> next;
      for (const auto& h : frontier) {
        std::vector<Letter> w = h;
        w.insert(w.end(), u.letters.begin(), u.letters.end());
        for (auto it = h.rbegin(); it != h.rend(); ++it) w.push_back(inverseLetter(*it));
        w.insert(w.end(), vInv.begin(), vInv.end());
        if (dehnReduce(Word(w), p).letters.empty()) return true;
        for (int x = 0; x < p.letterCount(); ++x)
          if (h.empty() || h.back() != inverseLetter(static_cast<Letter>(x))) {
            auto g = h;
            g.push_back(static_cast<Letter>(x));
            next.push_back(std::move(g));
          }
      }
      frontier = std::move(next);
    }
    return false;
  }

  TEST_CASE("no class below the cutoff is missed") {
    // Oracle: every class up to 6 letters, measured directly.  Canonical
    // words are not unique per class in the surface group, so an unlisted
    // word must be symbolically conjugate to a listed one of equal lengths.
    const PairSpectrum& s = small();
    const Presentation& p = s.rep1.presentation;
    std::set<Word> listed;
    for (const SpectrumEntry& e : s.entries) listed.insert(e.cls.canonical);
    for (const ConjClass& c : enumerateClasses(p, 6)) {
      const double l1 = lengthOf(s.rep1, c), l2 = lengthOf(s.rep2, c);
      if (l1 + l2 > s.cutoff - 1e-9 || listed.count(c.canonical)) continue;
      CAPTURE(p.str(c.canonical));
      bool found = false;
      for (const SpectrumEntry& e : s.entries)
        if (std::fabs(e.l1 - l1) < 1e-8 && std::fabs(e.l2 - l2) < 1e-8 &&
            conjugateBySearch(p, c.canonical, e.cls.canonical, 3))
          found = true;
      CHECK(found);
    }
  }

  TEST_CASE("enumeration is deterministic and serialization round-trips") {
    const PairSpectrum& s = small();
    const PairSpectrum again = classSpectrum(s.rep1, s.rep2, 14.0);
    const std::string text = serializeSpectrum(s);
    CHECK(serializeSpectrum(again) == text);
    CHECK(serializeSpectrum(parseSpectrum(text)) == text);
    CHECK(text.rfind("MSPEC/1\n", 0) == 0);
  }

  TEST_CASE("damaged files are rejected") {
    const std::string text = serializeSpectrum(small());
    CHECK_THROWS_AS(parseSpectrum(text.substr(0, text.size() / 2)), FormatError);
    CHECK_THROWS_AS(parseSpectrum(text.substr(text.find('\n') + 1)), VersionError);
    std::string bumped = text;
    bumped.replace(0, 7, "MSPEC/2");
    CHECK_THROWS_AS(parseSpectrum(bumped), VersionError);
    CHECK_THROWS_AS(loadSpectrum("/nonexistent/spectrum.mspec"), FormatError);
  }

  TEST_CASE("counts are monotone and homogeneous") {
    const PairSpectrum& s = small();
    std::size_t prev = 0;
    for (double T = 4.0; T <= 14.0; T += 0.25) {
      const std::size_t n = countWeighted(s, 1.0, 1.0, T);
      CHECK(n >= prev);
      prev = n;
      CHECK(countWeighted(s, 2.0, 2.0, 2 * T) == n);
      CHECK(countBand(s, 1.0, 0.1, T) <= n);
    }
    CHECK(countWeighted(s, 1.0, 1.0, s.cutoff) == s.entries.size());
    CHECK(certifiedCutoff(s, 1.0, 1.0) == doctest::Approx(s.cutoff));
    // Weight (1, 0) is complete only up to l1 <= cutoff / (1 + min ratio).
    const auto [lo, hi] = ratioRange(s);
    CHECK(lo <= hi);
    CHECK(certifiedCutoff(s, 1.0, 0.0) <= s.cutoff / (1 + lo) + 1e-9);
  }

  TEST_CASE("swapping the surfaces swaps the coordinates") {
    const PairSpectrum& s = small();
    const PairSpectrum t = classSpectrum(s.rep2, s.rep1, 14.0);
    REQUIRE(t.entries.size() == s.entries.size());
    std::multiset<std::pair<long, long>> a, b;
    for (const auto& e : s.entries) a.insert({std::lround(e.l1 * 1e6), std::lround(e.l2 * 1e6)});
    for (const auto& e : t.entries) b.insert({std::lround(e.l2 * 1e6), std::lround(e.l1 * 1e6)});
    CHECK(a == b);
  }

  TEST_CASE("primitive filter") {
    const PairSpectrum p = primitiveSpectrum(small());
    CHECK(p.entries.size() < small().entries.size());
    for (const auto& e : p.entries) CHECK(e.primitive);
  }

  TEST_CASE("orbit ball is symmetric and monotone in the radius") {
    const MarkedRepresentation r = fromFenchelNielsen({});
    const OrbitBall b = orbitBall(r, r, 10.0, 1.0, 1.0);
    REQUIRE(b.entries.size() > 10);
    for (const OrbitEntry& e : b.entries) {
      CHECK(e.d1 + e.d2 <= 10.0 + 1e-9);
      CHECK(e.d1 == doctest::Approx(e.d2).epsilon(1e-9));
    }
    CHECK(countWeighted(b, 1.0, 1.0, 8.0) < countWeighted(b, 1.0, 1.0, 10.0));
    CHECK(b.nearestMiss > 1e-3);
  }
}
