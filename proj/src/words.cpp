#include "manhattan/words.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include "manhattan/error.hpp"

namespace manhattan {

Word Word::inverse() const {
  Word out;
  out.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    out.letters.push_back(inverseLetter(*it));
  }
  return out;
}

Word Word::operator*(const Word& o) const {
  Word out = *this;
  out.letters.insert(out.letters.end(), o.letters.begin(), o.letters.end());
  return out;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Letter x : w.letters) {
    h ^= x + 1U;
    h *= 0x100000001b3ULL;
  }
  return h ^ w.letters.size();
}

const char* toString(PresentationMode mode) {
  return mode == PresentationMode::FreeRank2 ? "free-rank-2" : "genus-2";
}

PresentationMode parsePresentationMode(std::string_view s) {
  if (s == "free-rank-2" || s == "free" || s == "FreeRank2") return PresentationMode::FreeRank2;
  if (s == "genus-2" || s == "genus2" || s == "GenusTwoSurface") {
    return PresentationMode::GenusTwoSurface;
  }
  throw ParseError("unknown presentation mode '" + std::string(s) + "'");
}

namespace {

// Longest common subword starting at two distinct positions of the cyclic
// words in `cycles` (rotations of r and r^-1), capped at the relator length.
int maximalPiece(const Word& r) {
  const std::size_t n = r.size();
  const std::vector<Word> cycles{r, r.inverse()};
  int best = 0;
  for (std::size_t c1 = 0; c1 < 2; ++c1) {
    for (std::size_t c2 = 0; c2 < 2; ++c2) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (c1 == c2 && i == j) continue;
          int k = 0;
          while (static_cast<std::size_t>(k) < n &&
                 cycles[c1][(i + k) % n] == cycles[c2][(j + k) % n]) {
            ++k;
          }
          best = std::max(best, k);
        }
      }
    }
  }
  return best;
}

}  // namespace

Presentation::Presentation(PresentationMode mode, int rank, Word relator)
    : mode_(mode), rank_(rank), relator_(std::move(relator)) {
  for (auto& row : next_) row.fill(0xFF);
  if (relator_.empty()) return;
  const Word inv = relator_.inverse();
  const std::size_t n = relator_.size();
  for (std::size_t i = 0; i < n; ++i) {
    next_[0][relator_[i]] = relator_[(i + 1) % n];
    next_[1][inv[i]] = inv[(i + 1) % n];
  }
  maxPiece_ = maximalPiece(relator_);
  // C'(1/6): every piece shorter than a sixth of the relator.
  if (6 * maxPiece_ >= static_cast<int>(n)) {
    throw ParseError("relator fails the C'(1/6) piece condition");
  }
}

Presentation Presentation::freeRank2() {
  return Presentation(PresentationMode::FreeRank2, 2, Word{});
}

Presentation Presentation::genusTwo() {
  // a b A B c d C D
  return Presentation(PresentationMode::GenusTwoSurface, 4, Word({0, 2, 1, 3, 4, 6, 5, 7}));
}

Presentation Presentation::of(PresentationMode mode) {
  return mode == PresentationMode::FreeRank2 ? freeRank2() : genusTwo();
}

int Presentation::relatorStep(Letter x, Letter y) const {
  if (relator_.empty()) return -1;
  if (next_[0][x] == y) return 0;
  if (next_[1][x] == y) return 1;
  return -1;
}

char Presentation::symbol(Letter x) const {
  const char base = static_cast<char>('a' + generatorOf(x));
  return isInverse(x) ? static_cast<char>(base - 'a' + 'A') : base;
}

std::string Presentation::str(const Word& w) const {
  std::string s;
  s.reserve(w.size());
  for (Letter x : w.letters) s.push_back(symbol(x));
  return s;
}

Word Presentation::parse(std::string_view s) const {
  Word w;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '.') continue;
    int g = -1;
    bool inv = false;
    if (ch >= 'a' && ch <= 'z') {
      g = ch - 'a';
    } else if (ch >= 'A' && ch <= 'Z') {
      g = ch - 'A';
      inv = true;
    }
    if (g < 0 || g >= rank_) {
      throw ParseError("symbol '" + std::string(1, ch) + "' not in the " +
                       toString(mode_) + " alphabet");
    }
    w.letters.push_back(static_cast<Letter>(2 * g + (inv ? 1 : 0)));
  }
  return w;
}

Word freeReduce(const Word& w) {
  Word out;
  out.letters.reserve(w.size());
  for (Letter x : w.letters) {
    if (!out.letters.empty() && out.letters.back() == inverseLetter(x)) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(x);
    }
  }
  return out;
}

Word cyclicReduce(const Word& w) {
  Word r = freeReduce(w);
  std::size_t lo = 0;
  std::size_t hi = r.size();
  while (hi - lo >= 2 && r[lo] == inverseLetter(r[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(std::vector<Letter>(r.letters.begin() + static_cast<long>(lo),
                                  r.letters.begin() + static_cast<long>(hi)));
}

namespace {

// The relator rotation in direction dir that starts with x, as 8 letters.
std::array<Letter, 8> relatorCycle(const Presentation& p, int dir, Letter x) {
  std::array<Letter, 8> cyc{};
  cyc[0] = x;
  for (int i = 1; i < 8; ++i) cyc[i] = p.relatorNext(dir, cyc[i - 1]);
  return cyc;
}

// Replacement for the first k letters of the relator rotation starting at x:
// the inverse of the remaining 8 - k letters.
void appendComplementInverse(const Presentation& p, int dir, Letter x, int k,
                             std::vector<Letter>& out) {
  const auto cyc = relatorCycle(p, dir, x);
  for (int i = 7; i >= k; --i) out.push_back(inverseLetter(cyc[i]));
}

// One Dehn step on a linear word; returns false when no run exceeds half.
bool dehnStep(Word& w, const Presentation& p) {
  const std::size_t n = w.size();
  const int half = static_cast<int>(p.relator().size()) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      std::size_t j = i;
      while (j + 1 < n && p.relatorNext(dir, w[j]) == w[j + 1] && j + 1 - i < 8) ++j;
      const int run = static_cast<int>(j - i + 1);
      if (run > half) {
        std::vector<Letter> out(w.letters.begin(), w.letters.begin() + static_cast<long>(i));
        appendComplementInverse(p, dir, w[i], run, out);
        out.insert(out.end(), w.letters.begin() + static_cast<long>(j + 1), w.letters.end());
        w = freeReduce(Word(std::move(out)));
        return true;
      }
    }
  }
  return false;
}

Word rotate(const Word& w, std::size_t k) {
  Word out;
  out.letters.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.letters.push_back(w[(i + k) % w.size()]);
  return out;
}

// One cyclic Dehn step on a cyclically reduced word.
bool cyclicDehnStep(Word& w, const Presentation& p) {
  const std::size_t n = w.size();
  const int half = static_cast<int>(p.relator().size()) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      std::size_t run = 1;
      while (run < n && run < 8 && p.relatorNext(dir, w[(i + run - 1) % n]) == w[(i + run) % n]) {
        ++run;
      }
      if (static_cast<int>(run) > half) {
        const Word r = rotate(w, i);
        std::vector<Letter> out;
        appendComplementInverse(p, dir, r[0], static_cast<int>(run), out);
        out.insert(out.end(), r.letters.begin() + static_cast<long>(run), r.letters.end());
        w = cyclicReduce(Word(std::move(out)));
        return true;
      }
    }
  }
  return false;
}

}  // namespace

Word dehnReduce(const Word& w, const Presentation& p) {
  Word r = freeReduce(w);
  if (!p.hasRelator()) return r;
  while (dehnStep(r, p)) {
  }
  return r;
}

Word cyclicDehnReduce(const Word& w, const Presentation& p) {
  Word r = cyclicReduce(w);
  if (!p.hasRelator()) return r;
  while (!r.empty() && cyclicDehnStep(r, p)) {
  }
  return r;
}

Word minimalRotation(const Word& w) {
  if (w.empty()) return w;
  const Word inv = w.inverse();
  const std::size_t n = w.size();
  const Word* bestSrc = &w;
  std::size_t bestK = 0;
  auto less = [n](const Word& x, std::size_t kx, const Word& y, std::size_t ky) {
    for (std::size_t i = 0; i < n; ++i) {
      const Letter a = x[(i + kx) % n];
      const Letter b = y[(i + ky) % n];
      if (a != b) return a < b;
    }
    return false;
  };
  for (const Word* src : {&w, &inv}) {
    for (std::size_t k = 0; k < n; ++k) {
      if (less(*src, k, *bestSrc, bestK)) {
        bestSrc = src;
        bestK = k;
      }
    }
  }
  return rotate(*bestSrc, bestK);
}

namespace {

constexpr std::size_t kSwapClosureCap = 256;

// Cyclic words reachable by swapping exactly-half relator runs for their
// complements (with cyclic free/Dehn reduction after each swap).
std::vector<Word> halfSwapClosure(const Word& start, const Presentation& p) {
  std::vector<Word> seen{start};
  std::set<Word> index{minimalRotation(start)};
  std::deque<Word> queue{start};
  while (!queue.empty() && seen.size() < kSwapClosureCap) {
    const Word w = queue.front();
    queue.pop_front();
    const std::size_t n = w.size();
    if (n < 4) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        bool run = true;
        for (std::size_t k = 0; k + 1 < 4 && run; ++k) {
          run = p.relatorNext(dir, w[(i + k) % n]) == w[(i + k + 1) % n];
        }
        if (!run) continue;
        const Word r = rotate(w, i);
        std::vector<Letter> out;
        appendComplementInverse(p, dir, r[0], 4, out);
        out.insert(out.end(), r.letters.begin() + 4, r.letters.end());
        const Word next = cyclicDehnReduce(Word(std::move(out)), p);
        if (next.empty()) continue;
        if (index.insert(minimalRotation(next)).second) {
          seen.push_back(next);
          queue.push_back(next);
        }
      }
    }
  }
  return seen;
}

}  // namespace

ConjClass canonicalClass(const Word& w, const Presentation& p) {
  Word r = p.hasRelator() ? cyclicDehnReduce(w, p) : cyclicReduce(w);
  if (r.empty()) throw TrivialWord("'" + p.str(w) + "' reduces to the identity");
  Word best = minimalRotation(r);
  if (p.hasRelator()) {
    for (const Word& v : halfSwapClosure(r, p)) {
      Word m = minimalRotation(v);
      if (m < best) best = std::move(m);
    }
  }
  const int len = static_cast<int>(best.size());
  return ConjClass{std::move(best), len};
}

bool isPrimitive(const ConjClass& c) {
  const std::size_t n = c.canonical.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0) continue;
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) {
      periodic = c.canonical[i] == c.canonical[i - period];
    }
    if (periodic) return false;
  }
  return true;
}

void enumerateClasses(const Presentation& p, int maxWordLength,
                      const std::function<void(const ConjClass&)>& emit) {
  const int letters = p.letterCount();
  const int half = static_cast<int>(p.relator().size()) / 2;
  std::vector<Letter> buf;
  std::vector<int> runs[2];
  for (int len = 1; len <= maxWordLength; ++len) {
    buf.assign(static_cast<std::size_t>(len), 0);
    runs[0].assign(static_cast<std::size_t>(len), 0);
    runs[1].assign(static_cast<std::size_t>(len), 0);
    // Iterative DFS over freely reduced, linearly Dehn-reduced words.
    std::function<void(int)> rec = [&](int depth) {
      if (depth == len) {
        if (buf.front() == inverseLetter(buf.back())) return;
        const Word w(buf);
        const ConjClass c = [&] {
          try {
            return canonicalClass(w, p);
          } catch (const TrivialWord&) {
            return ConjClass{};
          }
        }();
        if (!c.canonical.empty() && c.canonical == w) emit(c);
        return;
      }
      for (int x = 0; x < letters; ++x) {
        const auto l = static_cast<Letter>(x);
        if (depth > 0 && buf[depth - 1] == inverseLetter(l)) continue;
        if (p.hasRelator()) {
          bool ok = true;
          for (int dir = 0; dir < 2; ++dir) {
            const int r = (depth > 0 && p.relatorNext(dir, buf[depth - 1]) == l)
                              ? runs[dir][depth - 1] + 1
                              : 1;
            runs[dir][depth] = r;
            if (r > half) ok = false;
          }
          if (!ok) continue;
        }
        buf[depth] = l;
        rec(depth + 1);
      }
    };
    rec(0);
  }
}

std::vector<ConjClass> enumerateClasses(const Presentation& p, int maxWordLength) {
  std::vector<ConjClass> out;
  enumerateClasses(p, maxWordLength, [&](const ConjClass& c) { out.push_back(c); });
  return out;
}

EndomorphismTable EndomorphismTable::identity(const Presentation& p) {
  EndomorphismTable t;
  for (int g = 0; g < p.rank(); ++g) t.images.push_back(Word({static_cast<Letter>(2 * g)}));
  return t;
}

EndomorphismTable EndomorphismTable::after(const EndomorphismTable& inner) const {
  EndomorphismTable t;
  t.images.reserve(inner.images.size());
  for (const Word& img : inner.images) t.images.push_back(applyAutomorphism(*this, img));
  return t;
}

Word applyAutomorphism(const EndomorphismTable& table, const Word& w) {
  Word out;
  for (Letter x : w.letters) {
    const Word& img = table.images.at(static_cast<std::size_t>(generatorOf(x)));
    if (isInverse(x)) {
      const Word inv = img.inverse();
      out.letters.insert(out.letters.end(), inv.letters.begin(), inv.letters.end());
    } else {
      out.letters.insert(out.letters.end(), img.letters.begin(), img.letters.end());
    }
  }
  return freeReduce(out);
}

std::vector<ConjClass> supportedTwistCurves(const Presentation& p) {
  std::vector<ConjClass> out;
  for (int g = 0; g < p.rank(); ++g) out.push_back(canonicalClass(Word({static_cast<Letter>(2 * g)}), p));
  if (p.mode() == PresentationMode::GenusTwoSurface) out.push_back(canonicalClass(p.parse("abAB"), p));
  return out;
}

namespace {

// Positive twist tables.  Each preserves the relator up to conjugation, and
// the twists along a and b (c and d) share handedness: they satisfy the braid
// relation t_a t_b t_a = t_b t_a t_b, so t_a t_b^-1 is pseudo-Anosov on the
// handle.
EndomorphismTable baseTwist(const Presentation& p, const Word& curve, bool inverse) {
  EndomorphismTable t = EndomorphismTable::identity(p);
  const auto set = [&](const char* gen, const char* image) {
    t.images[static_cast<std::size_t>(p.parse(gen)[0] >> 1)] = p.parse(image);
  };
  const std::string c = p.str(curve);
  if (p.mode() == PresentationMode::FreeRank2) {
    if (c == "a") set("b", inverse ? "bA" : "ba");
    else if (c == "b") set("a", inverse ? "ab" : "aB");
    else throw UnsupportedCurve(c);
    return t;
  }
  if (c == "a") set("b", inverse ? "bA" : "ba");
  else if (c == "b") set("a", inverse ? "ab" : "aB");
  else if (c == "c") set("d", inverse ? "dC" : "dc");
  else if (c == "d") set("c", inverse ? "cd" : "cD");
  else if (c == "abAB") {
    // Conjugate the second handle by the separating curve.
    set("c", inverse ? "baBAcabAB" : "abABcbaBA");
    set("d", inverse ? "baBAdabAB" : "abABdbaBA");
  } else {
    throw UnsupportedCurve(c);
  }
  return t;
}

bool relatorImageIsConjugate(const Presentation& p, const EndomorphismTable& t) {
  const Word img = cyclicReduce(applyAutomorphism(t, p.relator()));
  return minimalRotation(img) == minimalRotation(p.relator());
}

}  // namespace

EndomorphismTable twistAutomorphism(const Presentation& p, const ConjClass& curve, int power) {
  const auto supported = supportedTwistCurves(p);
  if (std::find(supported.begin(), supported.end(), curve) == supported.end()) {
    throw UnsupportedCurve("'" + p.str(curve.canonical) + "' is not a supported twist curve");
  }
  const EndomorphismTable step = baseTwist(p, curve.canonical, power < 0);
  EndomorphismTable t = EndomorphismTable::identity(p);
  for (int i = 0; i < std::abs(power); ++i) t = step.after(t);
  if (p.hasRelator() && !relatorImageIsConjugate(p, t)) {
    throw UnsupportedCurve("twist table does not preserve the relator");
  }
  return t;
}

}  // namespace manhattan
