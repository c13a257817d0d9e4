#include "manhattan/adscheck.hpp"

#include <algorithm>
#include <numbers>
#include <random>

#include "manhattan/error.hpp"

namespace manhattan {

namespace {

// det 1 matrix with the given columns, flipping the second if needed.
Moebius frame(ProjPoint first, ProjPoint second) {
  double det = first.x * second.y - second.x * first.y;
  if (det < 0) {
    second.x = -second.x;
    second.y = -second.y;
    det = -det;
  }
  const double s = 1.0 / std::sqrt(det);
  return Moebius(first.x * s, second.x * s, first.y * s, second.y * s);
}

// Columns of R^-T, i.e. rows of R^-1 transposed, are what the dual frame
// carries; the eigenvectors of R^-T are the left eigenvectors of R.
Moebius dualInverse(const Moebius& r) {
  const Moebius inv = r.inverse();
  return Moebius(inv.a(), inv.c(), inv.b(), inv.d());
}

IsometryClass hyperbolicFactor(const Moebius& m, const char* side) {
  const IsometryClass k = classify(m);
  if (k.tag != IsometryTag::Hyperbolic) {
    throw NotHyperbolicPair(std::string(side) + " factor is " + toString(k.tag) + ": " + m.str());
  }
  return k;
}

}  // namespace

std::array<double, 4> BoundaryPoint::matrix() const {
  std::array<double, 4> m{left.x * right.x, left.x * right.y, left.y * right.x, left.y * right.y};
  double norm = 0.0;
  double big = 0.0;
  for (double v : m) {
    norm += v * v;
    if (std::fabs(v) > std::fabs(big)) big = v;
  }
  const double s = (big < 0 ? -1.0 : 1.0) / std::sqrt(norm);
  for (double& v : m) v *= s;
  return m;
}

BoundaryPoint BoundaryPoint::moved(const AdSIsometry& g) const {
  return {g.left.apply(left), dualInverse(g.right).apply(right)};
}

double BoundaryPoint::distance(const BoundaryPoint& p, const BoundaryPoint& q) {
  const auto a = p.matrix();
  const auto b = q.matrix();
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

double adsForm(const AdSPoint& x, const AdSPoint& y) {
  const double s00 = x.a() + y.a();
  const double s01 = x.b() + y.b();
  const double s10 = x.c() + y.c();
  const double s11 = x.d() + y.d();
  return -0.5 * ((s00 * s11 - s01 * s10) - x.det() - y.det());
}

double spacelikeDistance(const AdSPoint& x, const AdSPoint& y) {
  const double b = std::fabs(adsForm(x, y));
  if (b < 1.0 - 1e-9) {
    throw NotSpacelikeSeparated("|B| = " + std::to_string(b) + " < 1");
  }
  return std::acosh(std::max(1.0, b));
}

std::array<InvariantGeodesic, 2> invariantGeodesics(const AdSIsometry& g) {
  const IsometryClass l = hyperbolicFactor(g.left, "left");
  const IsometryClass r = hyperbolicFactor(g.right, "right");
  // left = P diag(e^lambda, e^-lambda) P^-1 with P = (attracting, repelling).
  const Moebius p = frame(l.attracting, l.repelling);
  std::array<InvariantGeodesic, 2> out;
  for (int k = 0; k < 2; ++k) {
    // k = 0: Q = (repelling, attracting) so that right = Q diag(e^-mu, e^mu) Q^-1
    // and left o right^-1 = P diag(e^{lambda+mu}, ...) Q^-1.
    const Moebius q = k == 0 ? frame(r.repelling, r.attracting) : frame(r.attracting, r.repelling);
    InvariantGeodesic& geo = out[static_cast<std::size_t>(k)];
    geo.base = p * q.inverse();
    const Moebius qi = q.inverse();
    // x(t) = P diag(e^t, e^-t) Q^-1 tends to (P e1)(e1^T Q^-1) and (P e2)(e2^T Q^-1).
    geo.plus = {ProjPoint{p.a(), p.c()}.normalized(), ProjPoint{qi.a(), qi.b()}.normalized()};
    geo.minus = {ProjPoint{p.b(), p.d()}.normalized(), ProjPoint{qi.c(), qi.d()}.normalized()};
    const double half = 0.5 * (l.translationLength + (k == 0 ? 1.0 : -1.0) * r.translationLength);
    geo.translation = std::fabs(half);
  }
  return out;
}

std::pair<BoundaryPoint, BoundaryPoint> axis(const AdSIsometry& g) {
  const IsometryClass l = hyperbolicFactor(g.left, "left");
  hyperbolicFactor(g.right, "right");
  const IsometryClass rs = classify(dualInverse(g.right));
  return {BoundaryPoint{l.attracting, rs.attracting}, BoundaryPoint{l.repelling, rs.repelling}};
}

LorentzLength lorentzLength(const AdSIsometry& g) {
  const auto geos = invariantGeodesics(g);
  LorentzLength out;
  out.direct = spacelikeDistance(geos[0].base, g.apply(geos[0].base));
  out.fromLengths = 0.5 * (translationLength(g.left) + translationLength(g.right));
  return out;
}

GrowthEstimate deltaLorentz(const PairSpectrum& s, GrowthOptions opts) {
  opts.model = Correction::LogIntegral;
  opts.logPower = 1.0;
  const double R = 0.5 * certifiedCutoff(s, 1.0, 1.0);
  GrowthEstimate g = fitGrowth(
      [&](double r) { return static_cast<double>(countWeighted(s, 1.0, 1.0, 2.0 * r)); }, R, opts);
  g.frame = "class";
  return g;
}

LorentzBattery lorentzBattery(int pairs, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> length(0.1, 8.0);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  const auto randomIsometry = [&] {
    return Moebius::rotation(angle(rng)) * Moebius::translation(shift(rng)) * Moebius::rotation(angle(rng));
  };
  const auto randomHyperbolic = [&] {
    const Moebius h = randomIsometry();
    return h * Moebius::translation(length(rng)) * h.inverse();
  };
  LorentzBattery b;
  for (int i = 0; i < pairs; ++i) {
    const AdSIsometry g{randomHyperbolic(), randomHyperbolic()};
    b.maxDeviation = std::max(b.maxDeviation, lorentzLength(g).difference());
    ++b.pairs;
  }
  return b;
}

}  // namespace manhattan
