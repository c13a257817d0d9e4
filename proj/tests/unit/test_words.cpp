#include <doctest.h>

#include <set>

#include "manhattan/error.hpp"
#include "manhattan/words.hpp"

using namespace manhattan;

namespace {

// Exhaustive oracle: reduced cyclic words of length L in F2 up to rotation and
// inversion, counted by a separate script and frozen here.
constexpr int kClasses[] = {0, 2, 4, 6, 13, 26, 66, 158, 418};
constexpr int kPrimitive[] = {0, 2, 2, 4, 9, 24, 58, 156, 405};

void allWords(const Presentation& p, int length, Word& w, const std::function<void(const Word&)>& f) {
  if (static_cast<int>(w.size()) == length) {
    f(w);
    return;
  }
  for (int x = 0; x < p.letterCount(); ++x) {
    const auto l = static_cast<Letter>(x);
    if (!w.empty() && w.letters.back() == inverseLetter(l)) continue;
    w.letters.push_back(l);
    allWords(p, length, w, f);
    w.letters.pop_back();
  }
}

}  // namespace

TEST_SUITE("words") {
  TEST_CASE("parse and print round-trip") {
    const Presentation p = Presentation::genusTwo();
    const Word w = p.parse("abAB cdCD");
    CHECK(p.str(w) == "abABcdCD");
    CHECK(w == p.relator());
    CHECK_THROWS_AS(p.parse("abx"), ParseError);
    CHECK_THROWS_AS(Presentation::freeRank2().parse("c"), ParseError);
  }

  TEST_CASE("free and cyclic reduction") {
    const Presentation p = Presentation::freeRank2();
    CHECK(p.str(freeReduce(p.parse("abBAab"))) == "ab");
    CHECK(freeReduce(p.parse("aA")).empty());
    CHECK(p.str(cyclicReduce(p.parse("bAabaB"))) == "ba");
    CHECK(p.str(cyclicReduce(p.parse("Baab"))) == "aa");
    CHECK(cyclicReduce(p.parse("abaaB")).letters.size() == 5);
  }

  TEST_CASE("necklace counts match exhaustive enumeration through length 8") {
    const Presentation p = Presentation::freeRank2();
    std::vector<int> total(9, 0), prim(9, 0);
    enumerateClasses(p, 8, [&](const ConjClass& c) {
      ++total[static_cast<std::size_t>(c.wordLength)];
      if (isPrimitive(c)) ++prim[static_cast<std::size_t>(c.wordLength)];
    });
    for (int L = 1; L <= 8; ++L) {
      CAPTURE(L);
      CHECK(total[static_cast<std::size_t>(L)] == kClasses[L]);
      CHECK(prim[static_cast<std::size_t>(L)] == kPrimitive[L]);
    }
  }

  TEST_CASE("enumeration is exactly the canonical images of all short words") {
    for (PresentationMode mode : {PresentationMode::FreeRank2, PresentationMode::GenusTwoSurface}) {
      const Presentation p = Presentation::of(mode);
      const int L = mode == PresentationMode::FreeRank2 ? 8 : 5;
      std::set<Word> brute;
      Word w;
      for (int n = 1; n <= L; ++n) {
        allWords(p, n, w, [&](const Word& u) {
          try {
            const ConjClass c = canonicalClass(u, p);
            if (c.wordLength <= L) brute.insert(c.canonical);
          } catch (const TrivialWord&) {
          }
        });
      }
      std::set<Word> listed;
      Word prev;
      for (const ConjClass& c : enumerateClasses(p, L)) {
        CHECK(listed.insert(c.canonical).second);
        CHECK(canonicalClass(c.canonical, p).canonical == c.canonical);
        CHECK(prev < c.canonical);
        prev = c.canonical;
      }
      CAPTURE(toString(mode));
      CHECK(listed == brute);
    }
  }

  TEST_CASE("canonical class is invariant under rotation, inversion and conjugation") {
    const Presentation p = Presentation::genusTwo();
    const Word w = p.parse("abcDDa");
    const ConjClass c = canonicalClass(w, p);
    CHECK(canonicalClass(w.inverse(), p) == c);
    CHECK(canonicalClass(p.parse("bcDDaa"), p) == c);
    CHECK(canonicalClass(p.parse("dd") * w * p.parse("DD"), p) == c);
    CHECK_THROWS_AS(canonicalClass(p.relator(), p), TrivialWord);
    CHECK_THROWS_AS(canonicalClass(p.parse("abBA"), p), TrivialWord);
  }

  TEST_CASE("Dehn reduction kills relator conjugates and never lengthens") {
    const Presentation p = Presentation::genusTwo();
    CHECK(dehnReduce(p.relator(), p).empty());
    CHECK(dehnReduce(p.parse("cd") * p.relator() * p.parse("DC"), p).empty());
    // Six of the eight relator letters become the inverse of the other two.
    CHECK(p.str(dehnReduce(p.parse("abABcd"), p)) == "dc");
    Word w;
    int checked = 0;
    allWords(p, 6, w, [&](const Word& u) {
      if (++checked % 7 != 0) return;
      CHECK(dehnReduce(u, p).size() <= u.size());
    });
    CHECK(p.maxPieceLength() == 1);
  }

  TEST_CASE("primitivity") {
    const Presentation p = Presentation::freeRank2();
    CHECK(isPrimitive(canonicalClass(p.parse("ab"), p)));
    CHECK_FALSE(isPrimitive(canonicalClass(p.parse("abab"), p)));
    CHECK_FALSE(isPrimitive(canonicalClass(p.parse("aaa"), p)));
  }

  TEST_CASE("twists are automorphisms and satisfy the braid relation") {
    const Presentation f = Presentation::freeRank2();
    const ConjClass a = canonicalClass(f.parse("a"), f);
    const ConjClass b = canonicalClass(f.parse("b"), f);
    const auto ta = twistAutomorphism(f, a, 1), tb = twistAutomorphism(f, b, 1);
    CHECK(f.str(ta.images[1]) == "ba");
    CHECK(f.str(tb.images[0]) == "aB");
    const auto id = EndomorphismTable::identity(f);
    const auto reduce = [&](EndomorphismTable t) {
      for (Word& w : t.images) w = freeReduce(w);
      return t;
    };
    CHECK(reduce(ta.after(twistAutomorphism(f, a, -1))) == id);
    CHECK(reduce(tb.after(twistAutomorphism(f, b, -1))) == id);
    CHECK(reduce(ta.after(tb).after(ta)) == reduce(tb.after(ta).after(tb)));
    CHECK(twistAutomorphism(f, a, 3) == reduce(ta.after(ta).after(ta)));
    CHECK_THROWS_AS(twistAutomorphism(f, canonicalClass(f.parse("ab"), f), 1), UnsupportedCurve);

    const Presentation g = Presentation::genusTwo();
    for (const ConjClass& c : supportedTwistCurves(g)) {
      const auto t = twistAutomorphism(g, c, 2);
      CAPTURE(g.str(c.canonical));
      CHECK(dehnReduce(applyAutomorphism(t, g.relator()), g).empty());
      // The twist curve itself is fixed up to conjugacy.
      CHECK(canonicalClass(applyAutomorphism(t, c.canonical), g) == c);
    }
  }
}
