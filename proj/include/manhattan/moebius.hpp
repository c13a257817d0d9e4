#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace manhattan {

/// A point of the real projective line, stored as a homogeneous pair (x : y).
struct ProjPoint {
  double x = 1.0;
  double y = 0.0;

  /// Unit-norm representative with the first nonzero coordinate positive.
  ProjPoint normalized() const;
  /// sin of the angle between the two lines; 0 when the points coincide.
  static double separation(const ProjPoint& p, const ProjPoint& q);
};

/// An element of PSL2(R): a real 2x2 matrix [[a, b], [c, d]] with ad - bc = 1,
/// stored with its first nonzero entry positive so equal isometries compare
/// equal entrywise.
class Moebius {
 public:
  Moebius() = default;
  /// Builds and sign-normalizes; the determinant must already be 1 up to
  /// rounding (use fromMatrix to rescale arbitrary positive-determinant input).
  Moebius(double a, double b, double c, double d);

  static Moebius identity() { return {}; }
  /// Rescales by 1/sqrt(det); det must be positive.
  static Moebius fromMatrix(double a, double b, double c, double d);
  /// diag(e^{t/2}, e^{-t/2}): translation by t along the imaginary axis.
  static Moebius translation(double t);
  /// [[cos t, -sin t], [sin t, cos t]]: elliptic with trace 2 cos t, fixing i.
  static Moebius rotation(double theta);

  double a() const { return m_[0]; }
  double b() const { return m_[1]; }
  double c() const { return m_[2]; }
  double d() const { return m_[3]; }
  const std::array<double, 4>& entries() const { return m_; }

  double trace() const { return m_[0] + m_[3]; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  /// cosh of d(g.i, i) in the upper half-plane.
  double coshDisplacement() const {
    return 0.5 * (m_[0] * m_[0] + m_[1] * m_[1] + m_[2] * m_[2] + m_[3] * m_[3]);
  }
  /// d(g.i, i).
  double displacement() const;

  Moebius operator*(const Moebius& o) const;
  Moebius inverse() const { return Moebius(m_[3], -m_[1], -m_[2], m_[0]); }
  Moebius pow(long n) const;

  /// Entrywise max distance between sign-normalized representatives.
  static double distance(const Moebius& x, const Moebius& y);
  bool approxEqual(const Moebius& o, double tol = 1e-9) const {
    return distance(*this, o) <= tol;
  }

  ProjPoint apply(const ProjPoint& p) const;

  std::string str() const;

 private:
  void normalizeSign();

  // a, b, c, d
  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

Moebius compose(const Moebius& m, const Moebius& n);
Moebius inverse(const Moebius& m);
/// h m h^-1
Moebius conjugate(const Moebius& m, const Moebius& h);

enum class IsometryTag { Identity, Elliptic, Parabolic, Hyperbolic };

const char* toString(IsometryTag tag);

struct IsometryClass {
  IsometryTag tag = IsometryTag::Identity;
  double translationLength = 0.0;  // hyperbolic only
  ProjPoint attracting;            // hyperbolic only
  ProjPoint repelling;             // hyperbolic only
};

constexpr double kTraceTol = 1e-9;

IsometryClass classify(const Moebius& m, double tol = kTraceTol);

/// 2 arccosh(|tr|/2); throws NotHyperbolic unless |tr| > 2 + tol.
double translationLength(const Moebius& m, double tol = kTraceTol);

/// Length from a trace value without classification (|tr| <= 2 gives 0).
inline double lengthFromTrace(double tr) {
  const double t = std::fabs(tr) * 0.5;
  return t <= 1.0 ? 0.0 : 2.0 * std::acosh(t);
}

/// Distance from i to the axis of a hyperbolic element.
double axisDistanceFromBase(const Moebius& m);

/// One-parameter subgroup through a hyperbolic m: shift(m, l(m)) == m in PSL2,
/// and shift(m, t) translates by t along the axis of m in the direction of m.
Moebius axisTranslation(const Moebius& m, double t);

/// SL2 element mapping the point x + i y of the upper half-plane to i.
Moebius moveToBase(double x, double y);

}  // namespace manhattan
