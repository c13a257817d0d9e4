#include "manhattan/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "manhattan/error.hpp"

namespace manhattan {

namespace {

std::vector<Moebius> letterImages(const MarkedRepresentation& rep) {
  std::vector<Moebius> out;
  for (const Moebius& g : rep.images) {
    out.push_back(g);
    out.push_back(g.inverse());
  }
  return out;
}

// Lengths are conjugation invariant, so enumeration can run on each factor
// conjugated to its own best base point.  Remarked representations are far
// from centered, and the tube bound on prefixes depends on it.
std::vector<Moebius> centeredLetters(const MarkedRepresentation& rep) {
  MarkedRepresentation c = rep;
  c.images = centered(rep.images);
  return letterImages(c);
}

inline double fastDisplacement(const Moebius& m) {
  const double c = m.coshDisplacement();
  return c <= 1.0 ? 0.0 : std::acosh(c);
}

// ---------------------------------------------------------------------------
// Element balls: breadth-first search over the Cayley graph.  Elements are
// identified by their orbit point g.i in the first factor.  The groups are
// torsion free, so the stabilizer of i is trivial, and distinct orbit points
// are at least the systole apart; entrywise comparison is not usable at large
// radius because distinct matrices get within 1e-7 of each other there.

struct CellKey {
  std::int64_t u, v;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.u) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::size_t>(k.v) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// g.i in the upper half-plane.
struct HalfPlanePoint {
  double x, y;
};

HalfPlanePoint orbitPoint(const Moebius& g) {
  const double den = g.c() * g.c() + g.d() * g.d();
  return {(g.a() * g.c() + g.b() * g.d()) / den, 1.0 / den};
}

double hyperbolicDistance(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double c = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
  return c <= 1.0 ? 0.0 : std::acosh(c);
}

// Relative entrywise distance between PSL2 representatives.
double relativeDistance(const Moebius& x, const Moebius& y) {
  double scale = 1.0;
  for (double v : x.entries()) scale = std::max(scale, std::fabs(v));
  double plus = 0.0;
  double minus = 0.0;
  for (int i = 0; i < 4; ++i) {
    plus = std::max(plus, std::fabs(x.entries()[i] - y.entries()[i]));
    minus = std::max(minus, std::fabs(x.entries()[i] + y.entries()[i]));
  }
  return std::min(plus, minus) / scale;
}

class ElementIndex {
 public:
  explicit ElementIndex(double tol) : tol_(tol) {}

  // Index of a stored element whose orbit point is within tol of p, or -1.
  long find(const HalfPlanePoint& p, const std::vector<HalfPlanePoint>& points,
            double& nearestMiss) const {
    const auto [u, v] = coords(p);
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    std::array<std::int64_t, 2> us{static_cast<std::int64_t>(fu), 0};
    std::array<std::int64_t, 2> vs{static_cast<std::int64_t>(fv), 0};
    int nu = 1;
    int nv = 1;
    if (u - fu < kEdge) us[nu++] = us[0] - 1;
    else if (u - fu > 1.0 - kEdge) us[nu++] = us[0] + 1;
    if (v - fv < kEdge) vs[nv++] = vs[0] - 1;
    else if (v - fv > 1.0 - kEdge) vs[nv++] = vs[0] + 1;
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        const auto it = map_.find(CellKey{us[i], vs[j]});
        if (it == map_.end()) continue;
        for (long idx : it->second) {
          const double d = hyperbolicDistance(points[static_cast<std::size_t>(idx)], p);
          if (d <= tol_) return idx;
          nearestMiss = std::min(nearestMiss, d);
        }
      }
    }
    return -1;
  }

  void insert(const HalfPlanePoint& p, long idx) {
    const auto [u, v] = coords(p);
    map_[CellKey{static_cast<std::int64_t>(std::floor(u)), static_cast<std::int64_t>(std::floor(v))}]
        .push_back(idx);
  }

 private:
  // Cells of hyperbolic size about 0.1.
  static std::pair<double, double> coords(const HalfPlanePoint& p) {
    return {std::log(p.y) / 0.1, p.x / p.y / 0.1};
  }
  static constexpr double kEdge = 0.01;

  double tol_;
  std::unordered_map<CellKey, std::vector<long>, CellHash> map_;
};

struct BallResult {
  std::vector<Moebius> m1;
  std::vector<Moebius> m2;
  std::vector<HalfPlanePoint> points;
  std::vector<double> d1;
  std::vector<double> d2;
  double nearestMiss = std::numeric_limits<double>::infinity();
};

// All elements with x d1 + y d2 <= radius + slack, where slack is the largest
// weighted generator displacement.
BallResult elementBall(const std::vector<Moebius>& g1, const std::vector<Moebius>& g2, double radius,
                       double x, double y, const OrbitOptions& opts) {
  double slack = 0.0;
  for (std::size_t s = 0; s < g1.size(); ++s) {
    slack = std::max(slack, x * fastDisplacement(g1[s]) + y * fastDisplacement(g2[s]));
  }
  const double bound = radius + slack;
  BallResult out;
  ElementIndex index(opts.dedupTol);
  out.m1.push_back(Moebius::identity());
  out.m2.push_back(Moebius::identity());
  out.points.push_back(orbitPoint(Moebius::identity()));
  out.d1.push_back(0.0);
  out.d2.push_back(0.0);
  index.insert(out.points[0], 0);
  for (std::size_t head = 0; head < out.m1.size(); ++head) {
    for (std::size_t s = 0; s < g1.size(); ++s) {
      const Moebius h1 = out.m1[head] * g1[s];
      const double e1 = fastDisplacement(h1);
      if (x * e1 > bound) continue;
      const Moebius h2 = out.m2[head] * g2[s];
      const double e2 = fastDisplacement(h2);
      if (x * e1 + y * e2 > bound) continue;
      const HalfPlanePoint p = orbitPoint(h1);
      if (index.find(p, out.points, out.nearestMiss) >= 0) continue;
      if (out.m1.size() >= opts.maxEntries) {
        throw BudgetExceeded("orbit ball passed " + std::to_string(opts.maxEntries) + " elements");
      }
      index.insert(p, static_cast<long>(out.m1.size()));
      out.m1.push_back(h1);
      out.m2.push_back(h2);
      out.points.push_back(p);
      out.d1.push_back(e1);
      out.d2.push_back(e2);
    }
  }
  return out;
}

}  // namespace

OrbitBall orbitBall(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double radius,
                    double x, double y, const OrbitOptions& opts) {
  if (x < 0 || y < 0 || (x == 0 && y == 0)) throw OutOfRange("orbit weights must be nonnegative and not both 0");
  if (r1.images.size() != r2.images.size()) throw DegenerateParameters("representations of different rank");
  const BallResult ball = elementBall(letterImages(r1), letterImages(r2), radius, x, y, opts);
  OrbitBall out;
  out.radius = radius;
  out.x = x;
  out.y = y;
  out.visited = ball.m1.size();
  out.nearestMiss = ball.nearestMiss;
  for (std::size_t i = 0; i < ball.m1.size(); ++i) {
    if (x * ball.d1[i] + y * ball.d2[i] <= radius) out.entries.push_back({ball.d1[i], ball.d2[i]});
  }
  std::sort(out.entries.begin(), out.entries.end(), [&](const OrbitEntry& a, const OrbitEntry& b) {
    return x * a.d1 + y * a.d2 < x * b.d1 + y * b.d2;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Conjugacy witnesses.

namespace {

// The rotation of w whose axis passes closest to i, and that distance.
std::pair<Moebius, double> closestRotation(const MarkedRepresentation& rep, const Word& w) {
  Moebius best;
  double bestH = std::numeric_limits<double>::infinity();
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k) {
    Word r;
    for (std::size_t i = 0; i < n; ++i) r.letters.push_back(w[(i + k) % n]);
    const Moebius m = evaluate(rep, r);
    const double h = axisDistanceFromBase(m);
    if (h < bestH) {
      bestH = h;
      best = m;
    }
  }
  return {best, bestH};
}

class WitnessSearch {
 public:
  explicit WitnessSearch(const MarkedRepresentation& rep) : rep_(rep), gens_(letterImages(rep)) {}

  bool conjugate(const Word& u, const Word& v) {
    const auto [mu, hu] = closestRotation(rep_, u);
    const auto [mv, hv] = closestRotation(rep_, v);
    const double l = translationLength(mu);
    if (std::fabs(l - translationLength(mv)) > 1e-6 * std::max(1.0, l)) return false;
    // A conjugator can be normalized (by powers of v) to move i at most this far.
    const double radius = hu + hv + 0.5 * l + 1e-6;
    grow(radius);
    const IsometryClass ku = classify(mu);
    const IsometryClass kv = classify(mv);
    const Moebius vi = mv.inverse();
    constexpr double tol = 1e-6;
    for (std::size_t i : byDistance_) {
      if (ball_.d1[i] > radius) break;
      // Necessary: the conjugator carries the attracting point of u onto a
      // fixed point of v.
      const ProjPoint image = ball_.m1[i].apply(ku.attracting);
      if (ProjPoint::separation(image, kv.attracting) > 1e-5 &&
          ProjPoint::separation(image, kv.repelling) > 1e-5) {
        continue;
      }
      const Moebius c = conjugate(mu, ball_.m1[i]);
      if (relativeDistance(c, mv) <= tol || relativeDistance(c, vi) <= tol) return true;
    }
    return false;
  }

 private:
  void grow(double radius) {
    if (radius <= radius_) return;
    radius_ = std::max(radius, radius_ + 1.0);
    ball_ = elementBall(gens_, gens_, radius_, 1.0, 0.0, OrbitOptions{});
    byDistance_.resize(ball_.d1.size());
    std::iota(byDistance_.begin(), byDistance_.end(), 0);
    std::sort(byDistance_.begin(), byDistance_.end(),
              [&](std::size_t a, std::size_t b) { return ball_.d1[a] < ball_.d1[b]; });
  }

  static Moebius conjugate(const Moebius& m, const Moebius& h) { return h * m * h.inverse(); }

  const MarkedRepresentation& rep_;
  std::vector<Moebius> gens_;
  BallResult ball_;
  std::vector<std::size_t> byDistance_;
  double radius_ = -1.0;
};

}  // namespace

bool conjugateInRep(const MarkedRepresentation& rep, const Word& u, const Word& v) {
  WitnessSearch search(rep);
  return search.conjugate(u, v);
}

// ---------------------------------------------------------------------------
// Class enumeration.

namespace {

// One factor of the walk.  Each marked letter expands to a word in the
// original marking; the tracker keeps that word freely reduced along with its
// prefix products, so cancellation between long remarked images pops entries
// instead of multiplying large matrices back down to small ones.
struct Factor {
  std::vector<Moebius> letters;
  std::vector<std::vector<Letter>> expand;

  explicit Factor(const MarkedRepresentation& rep) {
    const int n = rep.presentation.letterCount();
    if (rep.base.empty()) {
      letters = centeredLetters(rep);
      for (int x = 0; x < n; ++x) expand.push_back({static_cast<Letter>(x)});
      return;
    }
    // Center where the remarked generators are short; pruning measures
    // displacement there, not at the center of the original marking.
    MarkedRepresentation b = rep;
    const Moebius h = centeringMap(rep.images);
    b.images.clear();
    for (const Moebius& g : rep.base) b.images.push_back(conjugate(g, h));
    letters = letterImages(b);
    for (int x = 0; x < n; ++x) {
      expand.push_back(unmark(rep, Word(std::vector<Letter>{static_cast<Letter>(x)})).letters);
      hair = std::max(hair, expand.back().size());
    }
  }

  /// Letters at the end of a tracked word that later letters may still cancel.
  /// Taken as the longest image, a heuristic for the bounded cancellation
  /// constant; the horizon audit checks it.
  std::size_t hair = 0;
};

class Tracker {
  static constexpr std::size_t kCheapConjugator = 6;

 public:
  explicit Tracker(const Factor& f) : f_(f) {}

  const Moebius& top() const { return stack_.empty() ? identity_ : stack_.back().second; }

  // Prefix product without the cancellable tail; this is what the tube bound
  // constrains.
  const Moebius& settled() const {
    return stack_.size() <= f_.hair ? identity_ : stack_[stack_.size() - 1 - f_.hair].second;
  }

  struct Undo {
    std::size_t pushed = 0;
    std::vector<std::pair<Letter, Moebius>> popped;
  };

  void step(Letter x, Undo& u) {
    u.pushed = 0;
    u.popped.clear();
    for (Letter y : f_.expand[x]) {
      if (!stack_.empty() && stack_.back().first == inverseLetter(y) && u.pushed == 0) {
        u.popped.push_back(stack_.back());
        stack_.pop_back();
      } else {
        stack_.emplace_back(y, top() * f_.letters[y]);
        ++u.pushed;
      }
    }
  }

  void undo(const Undo& u) {
    stack_.resize(stack_.size() - u.pushed);
    for (auto it = u.popped.rbegin(); it != u.popped.rend(); ++it) stack_.push_back(*it);
  }

  void reset() { stack_.clear(); }

  // Conjugacy representative of the current word.  A long cyclic
  // cancellation X^-1 C X ruins the trace of the prefix product, so the
  // middle C is multiplied afresh; a few letters cost nothing in precision.
  Moebius classMatrix() const {
    const std::size_t n = stack_.size();
    std::size_t k = 0;
    while (2 * k + 1 < n && stack_[k].first == inverseLetter(stack_[n - 1 - k].first)) ++k;
    if (k <= kCheapConjugator) return top();
    Moebius m = Moebius::identity();
    for (std::size_t i = k; i + k < n; ++i) m = m * f_.letters[stack_[i].first];
    return m;
  }

 private:
  const Factor& f_;
  std::vector<std::pair<Letter, Moebius>> stack_;
  Moebius identity_ = Moebius::identity();
};

struct WalkConfig {
  const Presentation* p;
  const Factor* f1;
  const Factor* f2;
  double T;
  double bound;  // T + slack
  int maxLength;
  std::size_t maxNodes;
};

struct WalkState {
  std::unordered_set<Word, WordHash> classes;
  std::unordered_set<Word, WordHash> seenRotations;
  std::size_t nodes = 0;
};

// Visits freely reduced, linearly Dehn-reduced words whose prefix
// displacement sums stay within the bound, collecting the class of every
// cyclically reduced word with l1 + l2 <= T.
class Walker {
 public:
  Walker(const WalkConfig& cfg, WalkState& st) : cfg_(cfg), st_(st), t1_(*cfg.f1), t2_(*cfg.f2) {
    const std::size_t n = static_cast<std::size_t>(cfg.maxLength) + 1;
    word_.resize(n);
    tail_.resize(n);
    undo1_.resize(n);
    undo2_.resize(n);
    half_ = static_cast<int>(cfg.p->relator().size()) / 2;
  }

  void startWith(Letter x) {
    head_ = {1, 1};
    word_[0] = x;
    tail_[0] = {1, 1};
    t1_.reset();
    t2_.reset();
    t1_.step(x, undo1_[0]);
    t2_.step(x, undo2_[0]);
    if (fastDisplacement(t1_.settled()) + fastDisplacement(t2_.settled()) > cfg_.bound) return;
    visit(1);
  }

 private:
  void visit(int n) {
    if (++st_.nodes > cfg_.maxNodes) {
      throw BudgetExceeded("class enumeration passed " + std::to_string(cfg_.maxNodes) + " nodes");
    }
    consider(n, t1_.classMatrix(), t2_.classMatrix());
    if (n >= cfg_.maxLength) return;
    const Presentation& p = *cfg_.p;
    const int letters = p.letterCount();
    const Letter last = word_[static_cast<std::size_t>(n - 1)];
    auto& u1 = undo1_[static_cast<std::size_t>(n)];
    auto& u2 = undo2_[static_cast<std::size_t>(n)];
    for (int xi = 0; xi < letters; ++xi) {
      const auto x = static_cast<Letter>(xi);
      if (x == inverseLetter(last)) continue;
      std::array<int, 2> run{1, 1};
      if (p.hasRelator()) {
        bool ok = true;
        for (int dir = 0; dir < 2; ++dir) {
          if (p.relatorNext(dir, last) == x) run[dir] = tail_[static_cast<std::size_t>(n - 1)][dir] + 1;
          if (run[dir] > half_) ok = false;
        }
        if (!ok) continue;
      }
      t1_.step(x, u1);
      const double e1 = fastDisplacement(t1_.settled());
      if (e1 > cfg_.bound) {
        t1_.undo(u1);
        continue;
      }
      t2_.step(x, u2);
      if (e1 + fastDisplacement(t2_.settled()) <= cfg_.bound) {
        word_[static_cast<std::size_t>(n)] = x;
        tail_[static_cast<std::size_t>(n)] = run;
        const auto savedHead = head_;
        for (int dir = 0; dir < 2; ++dir) {
          if (run[dir] == n + 1) head_[dir] = n + 1;
        }
        visit(n + 1);
        head_ = savedHead;
      }
      t2_.undo(u2);
      t1_.undo(u1);
    }
  }

  void consider(int n, const Moebius& m1, const Moebius& m2) {
    const Presentation& p = *cfg_.p;
    const Letter first = word_[0];
    const Letter last = word_[static_cast<std::size_t>(n - 1)];
    if (n > 1 && first == inverseLetter(last)) return;
    if (p.hasRelator()) {
      for (int dir = 0; dir < 2; ++dir) {
        const int t = tail_[static_cast<std::size_t>(n - 1)][dir];
        if (t < n && p.relatorNext(dir, last) == first && t + std::min(head_[dir], n - t) > half_) return;
      }
    }
    const double t1 = std::fabs(m1.trace());
    const double t2 = std::fabs(m2.trace());
    // Cheap rejection before taking logarithms: l1 + l2 <= T needs both traces bounded.
    const double l1 = lengthFromTrace(t1);
    if (l1 > cfg_.T) return;
    const double l2 = lengthFromTrace(t2);
    if (l1 + l2 > cfg_.T) return;
    Word w(std::vector<Letter>(word_.begin(), word_.begin() + n));
    if (t1 <= 2.0 + kTraceTol || t2 <= 2.0 + kTraceTol) {
      try {
        canonicalClass(w, p);
      } catch (const TrivialWord&) {
        return;
      }
      throw NotDiscernedDiscrete("class " + p.str(w) + " is not hyperbolic");
    }
    Word rot = minimalRotation(w);
    if (!st_.seenRotations.insert(rot).second) return;
    st_.classes.insert(canonicalClass(w, p).canonical);
  }

  const WalkConfig& cfg_;
  WalkState& st_;
  Tracker t1_;
  Tracker t2_;
  std::vector<Tracker::Undo> undo1_;
  std::vector<Tracker::Undo> undo2_;
  std::vector<Letter> word_;
  std::vector<std::array<int, 2>> tail_;
  std::array<int, 2> head_{0, 0};
  int half_ = 0;
};

std::vector<Word> enumerateCanonicals(const MarkedRepresentation& r1, const MarkedRepresentation& r2,
                                      double T, double slack, int maxLength, const SpectrumOptions& opts) {
  const Presentation& p = r1.presentation;
  const Factor f1(r1);
  const Factor f2(r2);
  const WalkConfig cfg{&p, &f1, &f2, T, T + slack, maxLength, opts.maxNodes};
  const int letters = p.letterCount();
  const int workers = std::max(1, std::min(opts.workers, letters));
  std::vector<WalkState> states(static_cast<std::size_t>(workers));
  auto job = [&](int w) {
    Walker walker(cfg, states[static_cast<std::size_t>(w)]);
    for (int x = w; x < letters; x += workers) walker.startWith(static_cast<Letter>(x));
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          job(w);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::unordered_set<Word, WordHash> all;
  for (auto& st : states) all.insert(st.classes.begin(), st.classes.end());
  std::vector<Word> out(all.begin(), all.end());
  std::sort(out.begin(), out.end());
  return out;
}

struct Merged {
  std::vector<SpectrumEntry> entries;
  std::size_t witnessMerges = 0;
  std::size_t collisions = 0;
};

Merged buildEntries(const MarkedRepresentation& r1, const MarkedRepresentation& r2,
                    const std::vector<Word>& canonicals, double T) {
  Merged out;
  std::vector<SpectrumEntry> raw;
  raw.reserve(canonicals.size());
  for (const Word& w : canonicals) {
    SpectrumEntry e;
    e.cls = ConjClass{w, static_cast<int>(w.size())};
    e.l1 = lengthOf(r1, w);
    e.l2 = lengthOf(r2, w);
    e.primitive = isPrimitive(e.cls);
    if (e.l1 + e.l2 <= T) raw.push_back(std::move(e));
  }
  if (r1.presentation.hasRelator() && !raw.empty()) {
    // Residual identification: equal lengths in both targets and in a fixed
    // probe structure, confirmed by an explicit conjugating element.
    static const MarkedRepresentation probe = probeRepresentation(PresentationMode::GenusTwoSurface);
    std::vector<double> lp(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) lp[i] = lengthOf(probe, raw[i].cls.canonical);
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return raw[a].l1 != raw[b].l1 ? raw[a].l1 < raw[b].l1 : raw[a].cls < raw[b].cls;
    });
    std::vector<std::size_t> parent(raw.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
      return parent[i] == i ? i : parent[i] = root(parent[i]);
    };
    WitnessSearch witness(probe);
    constexpr double tol = 1e-6;
    for (std::size_t a = 0; a < order.size(); ++a) {
      const std::size_t i = order[a];
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        const std::size_t j = order[b];
        if (raw[j].l1 - raw[i].l1 > tol) break;
        if (std::fabs(raw[j].l2 - raw[i].l2) > tol || std::fabs(lp[j] - lp[i]) > tol) continue;
        if (root(i) == root(j)) continue;
        if (witness.conjugate(raw[i].cls.canonical, raw[j].cls.canonical)) {
          const std::size_t ri = root(i);
          const std::size_t rj = root(j);
          // Keep the smaller canonical as the representative.
          if (raw[ri].cls < raw[rj].cls) parent[rj] = ri;
          else parent[ri] = rj;
          ++out.witnessMerges;
        } else {
          ++out.collisions;
        }
      }
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (root(i) == i) out.entries.push_back(raw[i]);
    }
  } else {
    out.entries = std::move(raw);
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    const double sa = a.l1 + a.l2;
    const double sb = b.l1 + b.l2;
    return sa != sb ? sa < sb : a.cls < b.cls;
  });
  return out;
}

}  // namespace

double lengthPerLetter(const MarkedRepresentation& r1, const MarkedRepresentation& r2, int depth) {
  const Presentation& p = r1.presentation;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Letter> word(static_cast<std::size_t>(depth));
  std::function<void(int)> rec = [&](int n) {
    if (n > 0 && (n == 1 || word[0] != inverseLetter(word[static_cast<std::size_t>(n - 1)]))) {
      const Word w(std::vector<Letter>(word.begin(), word.begin() + n));
      const Word r = p.hasRelator() ? cyclicDehnReduce(w, p) : w;
      if (!r.empty() && r.size() == w.size()) {
        best = std::min(best, (lengthOf(r1, w) + lengthOf(r2, w)) / n);
      }
    }
    if (n == depth) return;
    for (int x = 0; x < p.letterCount(); ++x) {
      if (n > 0 && word[static_cast<std::size_t>(n - 1)] == inverseLetter(static_cast<Letter>(x))) continue;
      word[static_cast<std::size_t>(n)] = static_cast<Letter>(x);
      rec(n + 1);
    }
  };
  rec(0);
  return best;
}

PairSpectrum classSpectrum(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double T,
                           const SpectrumOptions& opts) {
  if (!(T > 0)) throw OutOfRange("cutoff must be positive");
  if (r1.presentation.mode() != r2.presentation.mode()) {
    throw DegenerateParameters("representations of different presentations");
  }
  PairSpectrum s;
  s.rep1 = r1;
  s.rep2 = r2;
  s.cutoff = T;
  s.cMin = lengthPerLetter(r1, r2, 6);
  int horizon = static_cast<int>(std::ceil(T / s.cMin));
  double slack = opts.tubeSlack;

  std::vector<Word> canon = enumerateCanonicals(r1, r2, T, slack, horizon, opts);
  Merged merged = buildEntries(r1, r2, canon, T);
  if (opts.audit) {
    bool sound = false;
    for (int round = 0; round <= opts.maxGrowthRounds; ++round) {
      const double wideSlack = slack + opts.auditSlack;
      const int wideHorizon = horizon + opts.auditLength;
      std::vector<Word> wide = enumerateCanonicals(r1, r2, T, wideSlack, wideHorizon, opts);
      Merged wideMerged = buildEntries(r1, r2, wide, T);
      const bool same = wideMerged.entries.size() == merged.entries.size();
      canon = std::move(wide);
      merged = std::move(wideMerged);
      slack = wideSlack;
      horizon = wideHorizon;
      if (same) {
        sound = true;
        break;
      }
    }
    if (!sound) {
      throw HorizonUnsound("class count still growing at slack " + std::to_string(slack) +
                           " and horizon " + std::to_string(horizon));
    }
  }
  for (const SpectrumEntry& e : merged.entries) {
    if (e.cls.wordLength > horizon) {
      throw HorizonUnsound("class " + r1.presentation.str(e.cls.canonical) + " beyond horizon");
    }
  }
  s.completenessBound = horizon;
  s.tubeSlack = slack;
  s.entries = std::move(merged.entries);
  s.witnessMerges = merged.witnessMerges;
  s.fingerprintCollisions = merged.collisions;
  return s;
}

// ---------------------------------------------------------------------------
// Counting.

PairSpectrum primitiveSpectrum(const PairSpectrum& s) {
  PairSpectrum out = s;
  out.entries.clear();
  for (const auto& e : s.entries) {
    if (e.primitive) out.entries.push_back(e);
  }
  return out;
}

std::pair<double, double> ratioRange(const PairSpectrum& s) {
  if (s.entries.empty()) return {1.0, 1.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& e : s.entries) {
    const double r = e.l2 / e.l1;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

double certifiedCutoff(const PairSpectrum& s, double x, double y) {
  // l1 + l2 = (x l1 + y l2) (1 + k) / (x + y k) with k = l2 / l1 in the
  // observed ratio range; the fraction is monotone in k.
  const auto [lo, hi] = ratioRange(s);
  double f = std::numeric_limits<double>::infinity();
  for (double k : {lo, hi}) f = std::min(f, (x + y * k) / (1.0 + k));
  return s.cutoff * f;
}

std::size_t countWeighted(const PairSpectrum& s, double x, double y, double T) {
  if (T > certifiedCutoff(s, x, y) * (1.0 + 1e-12)) {
    throw UncertifiedRegion("x=" + std::to_string(x) + " y=" + std::to_string(y) +
                            " T=" + std::to_string(T));
  }
  std::size_t n = 0;
  for (const auto& e : s.entries) {
    if (x * e.l1 + y * e.l2 <= T) ++n;
  }
  return n;
}

std::size_t countWeighted(const OrbitBall& b, double x, double y, double T) {
  double scale = 0.0;
  if (b.x > 0) scale = std::max(scale, x > 0 ? b.x / x : std::numeric_limits<double>::infinity());
  if (b.y > 0) scale = std::max(scale, y > 0 ? b.y / y : std::numeric_limits<double>::infinity());
  if (T > 0 && T * scale > b.radius * (1.0 + 1e-12)) {
    throw UncertifiedRegion("orbit ball radius " + std::to_string(b.radius) + " does not cover T=" +
                            std::to_string(T));
  }
  std::size_t n = 0;
  for (const auto& e : b.entries) {
    if (x * e.d1 + y * e.d2 <= T) ++n;
  }
  return n;
}

std::size_t countBand(const PairSpectrum& s, double lambda, double eps, double T) {
  if (!(lambda > 0) || eps < 0) throw OutOfRange("band needs lambda > 0 and eps >= 0");
  if (T > s.cutoff * (1.0 + 1e-12)) throw UncertifiedRegion("band cutoff " + std::to_string(T));
  std::size_t n = 0;
  for (const auto& e : s.entries) {
    if (e.l1 + e.l2 <= T && std::fabs(e.l2 / e.l1 - lambda) <= eps) ++n;
  }
  return n;
}

std::size_t countBox(const PairSpectrum& s, double lambda, double T) {
  if (!(lambda > 0)) throw OutOfRange("box needs lambda > 0");
  if ((1.0 + lambda) * T + 2.0 > s.cutoff * (1.0 + 1e-12)) {
    throw UncertifiedRegion("box at T=" + std::to_string(T) + " exceeds cutoff");
  }
  std::size_t n = 0;
  for (const auto& e : s.entries) {
    if (e.l1 >= T && e.l1 < T + 1.0 && e.l2 >= lambda * T && e.l2 < lambda * T + 1.0) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Persistence.

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serializeSpectrum(const PairSpectrum& s) {
  const Presentation& p = s.rep1.presentation;
  std::ostringstream os;
  os << "MSPEC/1\n";
  os << "cutoff " << fmt17(s.cutoff) << "\n";
  os << "horizon " << s.completenessBound << "\n";
  os << "slack " << fmt17(s.tubeSlack) << "\n";
  os << "cmin " << fmt17(s.cMin) << "\n";
  os << "witness-merges " << s.witnessMerges << "\n";
  os << "collisions " << s.fingerprintCollisions << "\n";
  os << "rep1\n" << writeDescriptor(s.rep1);
  os << "rep2\n" << writeDescriptor(s.rep2);
  os << "entries " << s.entries.size() << "\n";
  for (const auto& e : s.entries) {
    os << p.str(e.cls.canonical) << ' ' << fmt17(e.l1) << ' ' << fmt17(e.l2) << ' '
       << (e.primitive ? 1 : 0) << "\n";
  }
  os << "end\n";
  return os.str();
}

PairSpectrum parseSpectrum(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("MSPEC/", 0) != 0) {
    throw VersionError("missing MSPEC version header");
  }
  if (line != "MSPEC/1") throw VersionError("unsupported format '" + line + "'");
  PairSpectrum s;
  const auto need = [&](const std::string& key) {
    if (!std::getline(is, line)) throw FormatError("truncated before '" + key + "'");
    std::istringstream ls(line);
    std::string k;
    std::string v;
    ls >> k >> v;
    if (k != key || v.empty()) throw FormatError("expected '" + key + "', got '" + line + "'");
    return v;
  };
  const auto num = [&](const std::string& key) {
    const std::string v = need(key);
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      throw FormatError("bad number for " + key);
    }
  };
  s.cutoff = num("cutoff");
  s.completenessBound = static_cast<int>(num("horizon"));
  s.tubeSlack = num("slack");
  s.cMin = num("cmin");
  s.witnessMerges = static_cast<std::size_t>(num("witness-merges"));
  s.fingerprintCollisions = static_cast<std::size_t>(num("collisions"));
  const auto descriptor = [&](const std::string& tag) {
    if (!std::getline(is, line) || line != tag) throw FormatError("expected '" + tag + "'");
    std::string block;
    while (std::getline(is, line)) {
      block += line + "\n";
      if (line == "end") return readDescriptor(block);
    }
    throw FormatError("truncated descriptor " + tag);
  };
  s.rep1 = descriptor("rep1");
  s.rep2 = descriptor("rep2");
  const auto count = static_cast<std::size_t>(num("entries"));
  const Presentation& p = s.rep1.presentation;
  s.entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw FormatError("truncated after " + std::to_string(i) + " entries");
    std::istringstream ls(line);
    std::string w;
    std::string l1;
    std::string l2;
    int prim = -1;
    ls >> w >> l1 >> l2 >> prim;
    if (!ls || (prim != 0 && prim != 1)) throw FormatError("bad entry line '" + line + "'");
    SpectrumEntry e;
    try {
      e.cls.canonical = p.parse(w);
      e.l1 = std::stod(l1);
      e.l2 = std::stod(l2);
    } catch (const ParseError&) {
      throw FormatError("bad word in entry '" + line + "'");
    } catch (const std::exception&) {
      throw FormatError("bad number in entry '" + line + "'");
    }
    e.cls.wordLength = static_cast<int>(e.cls.canonical.size());
    e.primitive = prim == 1;
    s.entries.push_back(std::move(e));
  }
  if (!std::getline(is, line) || line != "end") throw FormatError("missing end marker");
  return s;
}

void saveSpectrum(const PairSpectrum& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path);
  f << serializeSpectrum(s);
  if (!f) throw FormatError("write failed for " + path);
}

PairSpectrum loadSpectrum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parseSpectrum(ss.str());
}

}  // namespace manhattan
