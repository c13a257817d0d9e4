#include "manhattan/reps.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "manhattan/error.hpp"

namespace manhattan {

namespace {

using LD = long double;

// Extended-precision general 2x2 matrix for the Fenchel-Nielsen assembly;
// general because the gluing uses orientation-reversing reflections.
struct LMat {
  LD a, b, c, d;

  LMat operator*(const LMat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  LD det() const { return a * d - b * c; }
  LMat inverse() const {
    const LD k = 1 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  LMat normalized() const {
    const LD s = 1 / std::sqrt(det());
    return {a * s, b * s, c * s, d * s};
  }
  static LMat of(const Moebius& m) { return LMat{m.a(), m.b(), m.c(), m.d()}.normalized(); }
  static LMat translation(LD t) { return {std::exp(t / 2), 0, 0, std::exp(-t / 2)}; }
  Moebius toMoebius() const {
    const LMat n = normalized();
    return Moebius(static_cast<double>(n.a), static_cast<double>(n.b), static_cast<double>(n.c),
                   static_cast<double>(n.d));
  }

  // Columns: attracting and repelling eigenvectors, det 1.
  LMat eigenFrame() const {
    LD tr = a + d;
    const LD sgn = tr < 0 ? -1 : 1;
    tr *= sgn;
    if (!(tr > 2)) throw DegenerateParameters("pants boundary is not hyperbolic");
    const LD root = std::sqrt((tr - 2) * (tr + 2));
    const auto vec = [&](LD lambda) {
      // (M - lambda I) v = 0 with M sign-normalized; take the larger solution.
      const LD aa = sgn * a, bb = sgn * b, cc = sgn * c, dd = sgn * d;
      const std::array<LD, 2> u{bb, lambda - aa};
      const std::array<LD, 2> w{lambda - dd, cc};
      return std::hypot(u[0], u[1]) > std::hypot(w[0], w[1]) ? u : w;
    };
    const auto att = vec((tr + root) / 2);
    auto rep = vec((tr - root) / 2);
    LD det = att[0] * rep[1] - rep[0] * att[1];
    if (det < 0) {
      rep = {-rep[0], -rep[1]};
      det = -det;
    }
    const LD s = 1 / std::sqrt(det);
    return {att[0] * s, rep[0] * s, att[1] * s, rep[1] * s};
  }

  // Translation by t along the axis, toward the attracting point.
  LMat axisTranslation(LD t) const {
    const LMat p = eigenFrame();
    return p * translation(t) * p.inverse();
  }
};


void requireFinite(const std::vector<Moebius>& images, const char* what) {
  for (const Moebius& m : images) {
    for (double v : m.entries()) {
      if (!std::isfinite(v)) throw DegenerateParameters(std::string(what) + " produced non-finite entries");
    }
  }
}

std::string fmtShort(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

double relatorResidual(const Presentation& p, const std::vector<Moebius>& images) {
  if (!p.hasRelator()) return 0.0;
  // Extended precision so the residual reflects the images rather than the
  // rounding of an eight-fold product of large matrices.
  using LD = long double;
  std::array<LD, 4> acc{1, 0, 0, 1};
  for (Letter x : p.relator().letters) {
    const Moebius& g = images[static_cast<std::size_t>(generatorOf(x))];
    const Moebius h = isInverse(x) ? g.inverse() : g;
    const std::array<LD, 4> m{h.a(), h.b(), h.c(), h.d()};
    acc = {acc[0] * m[0] + acc[1] * m[2], acc[0] * m[1] + acc[1] * m[3],
           acc[2] * m[0] + acc[3] * m[2], acc[2] * m[1] + acc[3] * m[3]};
  }
  const LD sign = acc[0] + acc[3] < 0 ? -1 : 1;
  const std::array<LD, 4> id{1, 0, 0, 1};
  LD r = 0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::fabs(sign * acc[i] - id[i]));
  return static_cast<double>(r);
}

double discretenessProbe(const Presentation& p, const std::vector<Moebius>& images, int depth) {
  return discretenessProbe(p, images, depth, {});
}

double discretenessProbe(const Presentation& p, const std::vector<Moebius>& images, int depth,
                         const std::function<Moebius(const Word&)>& exact) {
  const int letters = p.letterCount();
  const int half = static_cast<int>(p.relator().size()) / 2;
  std::vector<Moebius> gens;
  for (int x = 0; x < letters; ++x) {
    const Moebius& g = images[static_cast<std::size_t>(x >> 1)];
    gens.push_back((x & 1) ? g.inverse() : g);
  }
  double witness = std::numeric_limits<double>::infinity();
  std::vector<Letter> word(static_cast<std::size_t>(depth));
  std::vector<Moebius> prefix(static_cast<std::size_t>(depth) + 1);
  // Current run length along the relator in each direction, ending at each
  // position, and the run length of the initial segment.
  std::vector<std::array<int, 2>> tail(static_cast<std::size_t>(depth));
  std::array<int, 2> head{0, 0};

  std::function<void(int)> rec = [&](int n) {
    if (n > 0) {
      const Letter first = word[0];
      const Letter last = word[static_cast<std::size_t>(n - 1)];
      bool cyclic = first != inverseLetter(last);
      if (cyclic && p.hasRelator()) {
        for (int dir = 0; dir < 2 && cyclic; ++dir) {
          const int t = tail[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(dir)];
          if (t < n && p.relatorNext(dir, last) == first) {
            cyclic = t + std::min(head[static_cast<std::size_t>(dir)], n - t) <= half;
          }
        }
      }
      if (cyclic) {
        Moebius g = prefix[static_cast<std::size_t>(n)];
        double tr = std::fabs(g.trace());
        if (exact && (tr <= 2.0 + kTraceTol || lengthFromTrace(tr) < witness)) {
          g = exact(Word{std::vector<Letter>(word.begin(), word.begin() + n)});
          tr = std::fabs(g.trace());
        }
        if (tr <= 2.0 + kTraceTol) {
          std::string w;
          for (int i = 0; i < n; ++i) w.push_back(p.symbol(word[static_cast<std::size_t>(i)]));
          throw NotDiscernedDiscrete("class " + w + " has trace " + std::to_string(g.trace()));
        }
        witness = std::min(witness, lengthFromTrace(tr));
      }
    }
    if (n == depth) return;
    for (int x = 0; x < letters; ++x) {
      const auto l = static_cast<Letter>(x);
      if (n > 0 && word[static_cast<std::size_t>(n - 1)] == inverseLetter(l)) continue;
      std::array<int, 2> run{1, 1};
      if (p.hasRelator()) {
        bool ok = true;
        for (int dir = 0; dir < 2; ++dir) {
          if (n > 0 && p.relatorNext(dir, word[static_cast<std::size_t>(n - 1)]) == l) {
            run[static_cast<std::size_t>(dir)] = tail[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(dir)] + 1;
          }
          if (run[static_cast<std::size_t>(dir)] > half) ok = false;
        }
        if (!ok) continue;
      }
      word[static_cast<std::size_t>(n)] = l;
      tail[static_cast<std::size_t>(n)] = run;
      const std::array<int, 2> savedHead = head;
      for (int dir = 0; dir < 2; ++dir) {
        if (run[static_cast<std::size_t>(dir)] == n + 1) head[static_cast<std::size_t>(dir)] = n + 1;
      }
      prefix[static_cast<std::size_t>(n) + 1] = prefix[static_cast<std::size_t>(n)] * gens[static_cast<std::size_t>(x)];
      rec(n + 1);
      head = savedHead;
    }
  };
  rec(0);
  return witness;
}

Moebius centeringMap(const std::vector<Moebius>& images) {
  // Minimize over p = (x, e^u) with a small Nelder-Mead; the objective is
  // geodesically convex so the minimizer is unique.
  const auto objective = [&](double x, double u) {
    const Moebius h = moveToBase(x, std::exp(u));
    const Moebius hi = h.inverse();
    double s = 0.0;
    for (const Moebius& g : images) s += (h * g * hi).coshDisplacement();
    return s;
  };
  struct Vertex {
    double x, u, f;
  };
  std::array<Vertex, 3> v{Vertex{0.0, 0.0, 0.0}, Vertex{0.5, 0.0, 0.0}, Vertex{0.0, 0.5, 0.0}};
  for (auto& p : v) p.f = objective(p.x, p.u);
  for (int iter = 0; iter < 2000; ++iter) {
    std::sort(v.begin(), v.end(), [](const Vertex& l, const Vertex& r) { return l.f < r.f; });
    const double spread = std::max(std::fabs(v[2].x - v[0].x), std::fabs(v[2].u - v[0].u));
    if (spread < 1e-12) break;
    const double cx = 0.5 * (v[0].x + v[1].x);
    const double cu = 0.5 * (v[0].u + v[1].u);
    const auto at = [&](double t) {
      Vertex p{cx + t * (v[2].x - cx), cu + t * (v[2].u - cu), 0.0};
      p.f = objective(p.x, p.u);
      return p;
    };
    const Vertex r = at(-1.0);
    if (r.f < v[0].f) {
      const Vertex e = at(-2.0);
      v[2] = e.f < r.f ? e : r;
    } else if (r.f < v[1].f) {
      v[2] = r;
    } else {
      const Vertex c = at(r.f < v[2].f ? -0.5 : 0.5);
      if (c.f < std::min(r.f, v[2].f)) {
        v[2] = c;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i].x = v[0].x + 0.5 * (v[i].x - v[0].x);
          v[i].u = v[0].u + 0.5 * (v[i].u - v[0].u);
          v[i].f = objective(v[i].x, v[i].u);
        }
      }
    }
  }
  const Vertex& best = *std::min_element(v.begin(), v.end(), [](const Vertex& l, const Vertex& r) {
    return l.f < r.f;
  });
  return moveToBase(best.x, std::exp(best.u));
}

std::vector<Moebius> centered(const std::vector<Moebius>& images) {
  const Moebius h = centeringMap(images);
  std::vector<Moebius> out;
  out.reserve(images.size());
  for (const Moebius& g : images) out.push_back(conjugate(g, h));
  return out;
}

MarkedRepresentation fromImages(const Presentation& p, std::vector<Moebius> images, int probeDepth) {
  if (static_cast<int>(images.size()) != p.rank()) {
    throw DegenerateParameters("expected " + std::to_string(p.rank()) + " generator images");
  }
  requireFinite(images, "generator list");
  MarkedRepresentation rep;
  rep.presentation = p;
  rep.images = std::move(images);
  rep.probeDepth = probeDepth;
  rep.relatorResidual = relatorResidual(p, rep.images);
  if (rep.relatorResidual > 1e-8) {
    throw DegenerateParameters("relator residual " + fmtShort(rep.relatorResidual));
  }
  rep.discretenessWitness = discretenessProbe(p, rep.images, probeDepth);
  return rep;
}

MarkedRepresentation fromFenchelNielsen(const FenchelNielsen& fn, int probeDepth) {
  for (double l : fn.lengths) {
    if (!(l >= 1e-6) || !std::isfinite(l)) {
      throw DegenerateParameters("pants curve length " + std::to_string(l) + " below 1e-6");
    }
  }
  for (double t : fn.twists) {
    if (!std::isfinite(t)) throw DegenerateParameters("non-finite twist");
  }
  // Assembled in extended precision: with a short cuff the gluing maps are
  // large and the relator cancels across them.
  const LD h1 = 0.5L * fn.lengths[0];
  const LD h2 = 0.5L * fn.lengths[1];
  const LD h3 = 0.5L * fn.lengths[2];
  // Distance between the axes of the first two boundaries of a pair of pants.
  const LD coshD = (std::cosh(h3) + std::cosh(h1) * std::cosh(h2)) / (std::sinh(h1) * std::sinh(h2));
  if (!std::isfinite(coshD)) throw DegenerateParameters("degenerate hexagon");
  const LD halfD = 0.5L * std::acosh(coshD);
  const LMat m{std::cosh(halfD), std::sinh(halfD), std::sinh(halfD), std::cosh(halfD)};

  const LMat x1 = LMat::translation(fn.lengths[0]);
  const LMat x2 = m * LMat::translation(-fn.lengths[1]) * m.inverse();
  const LMat x3 = (x1 * x2).inverse();

  // Gluing maps onto the mirror pants, as products of two reflections.
  const LMat refl{-1, 0, 0, 1};
  const LMat t2 = (m * m).inverse();
  const LMat n = x3.eigenFrame();
  const LMat t3 = (refl * n * refl * n.inverse()).normalized();

  const LMat a1 = x1;
  const LMat a2 = t2 * x2 * t2.inverse();
  LMat b1 = a2 * t3 * x2.inverse();
  LMat b2 = t3 * t2.inverse();

  const LMat h = x3.axisTranslation(fn.twists[2]);
  b1 = b1 * (x2 * h * x2.inverse());
  b2 = b2 * (t2 * h * t2.inverse());
  b1 = b1 * a1.axisTranslation(fn.twists[0]);
  b2 = b2 * a2.axisTranslation(fn.twists[1]);

  std::vector<LMat> exact{a1, b1, a2, b2};
  std::vector<Moebius> images;
  for (const LMat& g : exact) images.push_back(g.toMoebius());
  requireFinite(images, "Fenchel-Nielsen assembly");
  const LMat c = LMat::of(centeringMap(images));
  images.clear();
  for (const LMat& g : exact) images.push_back((c * g * c.inverse()).toMoebius());
  MarkedRepresentation rep = fromImages(Presentation::genusTwo(), std::move(images), probeDepth);
  rep.fn = fn;
  return rep;
}

MarkedRepresentation fromFreePair(double trA, double trB, double trAB, int probeDepth) {
  if (!(std::fabs(trAB) > 2.0)) {
    throw DegenerateParameters("tr AB = " + std::to_string(trAB) + " needs |tr| > 2 in this normal form");
  }
  // A = [[x, -1], [1, 0]], B = [[0, z], [-1/z, y]] with z + 1/z = tr AB.
  const double disc = std::sqrt(trAB * trAB - 4.0);
  const double zeta = trAB > 0 ? 0.5 * (trAB + disc) : 0.5 * (trAB - disc);
  std::vector<Moebius> images{Moebius(trA, -1.0, 1.0, 0.0), Moebius(0.0, zeta, -1.0 / zeta, trB)};
  MarkedRepresentation rep = fromImages(Presentation::freeRank2(), centered(images), probeDepth);
  rep.traces = FreePairTraces{trA, trB, trAB};
  return rep;
}

namespace {

Moebius product(const std::vector<Moebius>& images, const Word& w) {
  Moebius acc;
  for (Letter x : w.letters) {
    const Moebius& g = images.at(static_cast<std::size_t>(generatorOf(x)));
    acc = acc * (isInverse(x) ? g.inverse() : g);
  }
  return acc;
}

}  // namespace

Word unmark(const MarkedRepresentation& rep, Word w) {
  for (auto t = rep.history.rbegin(); t != rep.history.rend(); ++t) {
    w = dehnReduce(applyAutomorphism(*t, w), rep.presentation);
  }
  return w;
}

Moebius evaluate(const MarkedRepresentation& rep, const Word& w) {
  if (rep.base.empty()) return product(rep.images, w);
  return product(rep.base, unmark(rep, w));
}

Moebius evaluateClass(const MarkedRepresentation& rep, const Word& w) {
  if (rep.base.empty()) return product(rep.images, cyclicDehnReduce(w, rep.presentation));
  return product(rep.base, cyclicDehnReduce(unmark(rep, w), rep.presentation));
}

double lengthOf(const MarkedRepresentation& rep, const Word& w) {
  return translationLength(evaluateClass(rep, w));
}

double lengthOf(const MarkedRepresentation& rep, const ConjClass& c) {
  return lengthOf(rep, c.canonical);
}

MarkedRepresentation remark(const MarkedRepresentation& rep, const EndomorphismTable& table) {
  std::vector<Moebius> images;
  images.reserve(table.images.size());
  for (const Word& w : table.images) images.push_back(evaluate(rep, w));
  requireFinite(images, "remarked generator list");
  MarkedRepresentation out;
  out.presentation = rep.presentation;
  out.images = std::move(images);
  out.probeDepth = rep.probeDepth;
  out.fn = rep.fn;
  out.traces = rep.traces;
  out.history = rep.history;
  out.history.push_back(table);
  // A descriptor read from disk may carry history without base images; then
  // plain products are all we have.
  if (rep.history.empty()) {
    out.base = rep.images;
  } else {
    out.base = rep.base;
  }
  out.relatorResidual = relatorResidual(out.presentation, out.images);
  if (out.relatorResidual > 1e-8) {
    throw DegenerateParameters("relator residual " + fmtShort(out.relatorResidual));
  }
  std::function<Moebius(const Word&)> exact;
  if (!out.base.empty()) exact = [&out](const Word& w) { return evaluateClass(out, w); };
  out.discretenessWitness = discretenessProbe(out.presentation, out.images, out.probeDepth, exact);
  return out;
}

Word thirdPantsCurve(const Presentation& p) {
  // x3 = (a1 x2)^-1 with x2 = t2^-1 a2 t2 and t2 = a2 b2^-1 a2^-1 b1.
  const Word t2 = p.parse("cDCb");
  const Word x2 = t2.inverse() * p.parse("c") * t2;
  return dehnReduce((p.parse("a") * x2).inverse(), p);
}

MarkedRepresentation probeRepresentation(PresentationMode mode) {
  if (mode == PresentationMode::FreeRank2) return fromFreePair(3.3, 3.7, 4.4, 6);
  FenchelNielsen fn;
  fn.lengths = {2.31, 2.67, 3.05};
  fn.twists = {0.37, -0.81, 1.13};
  return fromFenchelNielsen(fn, 6);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string writeDescriptor(const MarkedRepresentation& rep) {
  const Presentation& p = rep.presentation;
  std::ostringstream os;
  os << "MREP/1\n";
  os << "mode " << toString(p.mode()) << "\n";
  os << "probe-depth " << rep.probeDepth << "\n";
  os << "witness " << fmt17(rep.discretenessWitness) << "\n";
  if (rep.fn) {
    os << "fn";
    for (double v : rep.fn->lengths) os << ' ' << fmt17(v);
    for (double v : rep.fn->twists) os << ' ' << fmt17(v);
    os << "\n";
  }
  if (rep.traces) {
    os << "traces " << fmt17(rep.traces->trA) << ' ' << fmt17(rep.traces->trB) << ' '
       << fmt17(rep.traces->trAB) << "\n";
  }
  for (std::size_t g = 0; g < rep.images.size(); ++g) {
    os << "image " << p.symbol(static_cast<Letter>(2 * g));
    for (double v : rep.images[g].entries()) os << ' ' << fmt17(v);
    os << "\n";
  }
  for (std::size_t g = 0; g < rep.base.size(); ++g) {
    os << "base " << p.symbol(static_cast<Letter>(2 * g));
    for (double v : rep.base[g].entries()) os << ' ' << fmt17(v);
    os << "\n";
  }
  for (const EndomorphismTable& t : rep.history) {
    os << "remark";
    for (const Word& w : t.images) os << ' ' << (w.empty() ? std::string("1") : p.str(w));
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

MarkedRepresentation readDescriptor(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "MREP/1") throw FormatError("missing MREP/1 header");
  MarkedRepresentation rep;
  bool haveMode = false;
  bool ended = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key.empty()) continue;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "mode") {
      std::string mode;
      ls >> mode;
      try {
        rep.presentation = Presentation::of(parsePresentationMode(mode));
      } catch (const ParseError& e) {
        throw FormatError(e.what());
      }
      haveMode = true;
    } else if (key == "probe-depth") {
      ls >> rep.probeDepth;
    } else if (key == "witness") {
      ls >> rep.discretenessWitness;
    } else if (key == "fn") {
      FenchelNielsen fn;
      for (double& v : fn.lengths) ls >> v;
      for (double& v : fn.twists) ls >> v;
      rep.fn = fn;
    } else if (key == "traces") {
      FreePairTraces t;
      ls >> t.trA >> t.trB >> t.trAB;
      rep.traces = t;
    } else if (key == "image" || key == "base") {
      std::string sym;
      std::array<double, 4> e{};
      ls >> sym >> e[0] >> e[1] >> e[2] >> e[3];
      if (!ls) throw FormatError("bad " + key + " line '" + line + "'");
      (key == "image" ? rep.images : rep.base).emplace_back(e[0], e[1], e[2], e[3]);
    } else if (key == "remark") {
      if (!haveMode) throw FormatError("remark before mode");
      EndomorphismTable t;
      std::string w;
      while (ls >> w) t.images.push_back(w == "1" ? Word{} : rep.presentation.parse(w));
      rep.history.push_back(std::move(t));
    } else {
      throw FormatError("unknown descriptor key '" + key + "'");
    }
    if (!haveMode && key != "probe-depth" && key != "witness") {
      throw FormatError("descriptor must declare its mode first");
    }
    if (ls.fail() && !ls.eof()) throw FormatError("malformed line '" + line + "'");
  }
  if (!ended) throw FormatError("descriptor truncated");
  if (static_cast<int>(rep.images.size()) != rep.presentation.rank()) {
    throw FormatError("descriptor has " + std::to_string(rep.images.size()) + " images");
  }
  if (!rep.base.empty() && (rep.base.size() != rep.images.size() || rep.history.empty())) {
    throw FormatError("base images need a full set and a remark history");
  }
  rep.relatorResidual = relatorResidual(rep.presentation, rep.images);
  return rep;
}

}  // namespace manhattan
