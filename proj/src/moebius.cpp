#include "manhattan/moebius.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "manhattan/error.hpp"

namespace manhattan {

ProjPoint ProjPoint::normalized() const {
  const double n = std::hypot(x, y);
  if (n == 0.0) return {1.0, 0.0};
  ProjPoint p{x / n, y / n};
  if (p.x < 0.0 || (p.x == 0.0 && p.y < 0.0)) {
    p.x = -p.x;
    p.y = -p.y;
  }
  return p;
}

double ProjPoint::separation(const ProjPoint& p, const ProjPoint& q) {
  const double np = std::hypot(p.x, p.y);
  const double nq = std::hypot(q.x, q.y);
  return std::fabs(p.x * q.y - p.y * q.x) / (np * nq);
}

Moebius::Moebius(double a, double b, double c, double d) : m_{a, b, c, d} {
  normalizeSign();
}

Moebius Moebius::fromMatrix(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  const double s = 1.0 / std::sqrt(det);
  return Moebius(a * s, b * s, c * s, d * s);
}

Moebius Moebius::translation(double t) {
  return Moebius(std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t));
}

Moebius Moebius::rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Moebius(c, -s, s, c);
}

void Moebius::normalizeSign() {
  for (double v : m_) {
    if (v > 0.0) return;
    if (v < 0.0) {
      for (double& w : m_) w = -w;
      return;
    }
  }
}

double Moebius::displacement() const {
  return std::acosh(std::max(1.0, coshDisplacement()));
}

Moebius Moebius::operator*(const Moebius& o) const {
  const auto& x = m_;
  const auto& y = o.m_;
  double a = x[0] * y[0] + x[1] * y[2];
  double b = x[0] * y[1] + x[1] * y[3];
  double c = x[2] * y[0] + x[3] * y[2];
  double d = x[2] * y[1] + x[3] * y[3];
  // Renormalize determinant drift accumulated over long products, but only
  // above the level explained by entry rounding.  For large entries ad - bc
  // is ill-conditioned (an entry error e moves it by about |d| e), and
  // rescaling by such a det would inject far more error than it removes.
  const double det = a * d - b * c;
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (std::fabs(a * d) + std::fabs(b * c));
  if (std::fabs(det - 1.0) > floor && det > 0.0) {
    const double s = 1.0 / std::sqrt(det);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
  }
  return Moebius(a, b, c, d);
}

Moebius Moebius::pow(long n) const {
  Moebius base = n < 0 ? inverse() : *this;
  unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  Moebius acc;
  while (e) {
    if (e & 1UL) acc = acc * base;
    base = base * base;
    e >>= 1UL;
  }
  return acc;
}

double Moebius::distance(const Moebius& x, const Moebius& y) {
  double r = 0.0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::fabs(x.m_[i] - y.m_[i]));
  return r;
}

ProjPoint Moebius::apply(const ProjPoint& p) const {
  return ProjPoint{m_[0] * p.x + m_[1] * p.y, m_[2] * p.x + m_[3] * p.y}.normalized();
}

std::string Moebius::str() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[[%.17g, %.17g], [%.17g, %.17g]]", m_[0], m_[1], m_[2], m_[3]);
  return buf;
}

Moebius compose(const Moebius& m, const Moebius& n) { return m * n; }
Moebius inverse(const Moebius& m) { return m.inverse(); }
Moebius conjugate(const Moebius& m, const Moebius& h) { return h * m * h.inverse(); }

const char* toString(IsometryTag tag) {
  switch (tag) {
    case IsometryTag::Identity: return "Identity";
    case IsometryTag::Elliptic: return "Elliptic";
    case IsometryTag::Parabolic: return "Parabolic";
    case IsometryTag::Hyperbolic: return "Hyperbolic";
  }
  return "?";
}

namespace {

// Eigenvector of m for eigenvalue lambda, picking the better-conditioned row.
ProjPoint eigenvector(const Moebius& m, double lambda) {
  const ProjPoint r1{m.b(), lambda - m.a()};
  const ProjPoint r2{lambda - m.d(), m.c()};
  const double n1 = std::hypot(r1.x, r1.y);
  const double n2 = std::hypot(r2.x, r2.y);
  return (n1 >= n2 ? r1 : r2).normalized();
}

struct Eigen {
  double big;    // eigenvalue of modulus > 1
  double small;  // 1 / big
};

Eigen hyperbolicEigen(const Moebius& m) {
  const double t = m.trace();
  const double disc = std::sqrt(t * t - 4.0);
  // Stable root of x^2 - t x + 1.
  const double big = t > 0 ? 0.5 * (t + disc) : 0.5 * (t - disc);
  return {big, 1.0 / big};
}

}  // namespace

IsometryClass classify(const Moebius& m, double tol) {
  IsometryClass out;
  const double at = std::fabs(m.trace());
  if (at > 2.0 + tol) {
    out.tag = IsometryTag::Hyperbolic;
    out.translationLength = lengthFromTrace(m.trace());
    const Eigen e = hyperbolicEigen(m);
    out.attracting = eigenvector(m, e.big);
    out.repelling = eigenvector(m, e.small);
  } else if (at < 2.0 - tol) {
    out.tag = IsometryTag::Elliptic;
  } else {
    out.tag = m.approxEqual(Moebius::identity(), tol) ? IsometryTag::Identity
                                                      : IsometryTag::Parabolic;
  }
  return out;
}

double translationLength(const Moebius& m, double tol) {
  if (std::fabs(m.trace()) <= 2.0 + tol) {
    throw NotHyperbolic("trace " + std::to_string(m.trace()) + " of " + m.str());
  }
  return lengthFromTrace(m.trace());
}

double axisDistanceFromBase(const Moebius& m) {
  const double l = translationLength(m);
  const double d = m.displacement();
  const double ratio = std::sinh(0.5 * d) / std::sinh(0.5 * l);
  return std::acosh(std::max(1.0, ratio));
}

Moebius axisTranslation(const Moebius& m, double t) {
  const IsometryClass k = classify(m);
  if (k.tag != IsometryTag::Hyperbolic) throw NotHyperbolic("axisTranslation of " + m.str());
  // Columns: attracting then repelling eigenvector; det > 0 after a sign flip.
  double p00 = k.attracting.x, p10 = k.attracting.y;
  double p01 = k.repelling.x, p11 = k.repelling.y;
  double det = p00 * p11 - p01 * p10;
  if (det < 0) {
    p01 = -p01;
    p11 = -p11;
    det = -det;
  }
  const double s = 1.0 / std::sqrt(det);
  const Moebius p(p00 * s, p01 * s, p10 * s, p11 * s);
  return p * Moebius::translation(t) * p.inverse();
}

Moebius moveToBase(double x, double y) {
  const double r = std::sqrt(y);
  return Moebius(1.0 / r, -x / r, 0.0, r);
}

}  // namespace manhattan
