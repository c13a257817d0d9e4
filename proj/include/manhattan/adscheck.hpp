#pragma once

#include <array>
#include <utility>

#include "manhattan/manhattan.hpp"
#include "manhattan/moebius.hpp"

namespace manhattan {

/// A point of anti-de Sitter space, modelled on PSL2(R) with the form -det.
using AdSPoint = Moebius;

/// (left, right) acting by X -> left X right^-1.
struct AdSIsometry {
  Moebius left;
  Moebius right;

  AdSPoint apply(const AdSPoint& x) const { return left * x * right.inverse(); }
  AdSIsometry operator*(const AdSIsometry& o) const { return {left * o.left, right * o.right}; }
  AdSIsometry inverse() const { return {left.inverse(), right.inverse()}; }
};

/// Boundary point as the rank-one matrix u_L u_R^T, scaled to unit Frobenius
/// norm with its largest entry positive.
struct BoundaryPoint {
  ProjPoint left;
  ProjPoint right;

  std::array<double, 4> matrix() const;
  /// Boundary action u_L -> L u_L, u_R -> R^-T u_R.
  BoundaryPoint moved(const AdSIsometry& g) const;
  /// Entrywise distance between the normalized rank-one matrices.
  static double distance(const BoundaryPoint& p, const BoundaryPoint& q);
};

/// Polarization of -det: B(X, Y) = -(det(X + Y) - det X - det Y) / 2.
double adsForm(const AdSPoint& x, const AdSPoint& y);

/// arccosh |B(X, Y)|.  Points of PSL2 are defined up to sign, so B is too.
/// Throws NotSpacelikeSeparated when |B| < 1 (timelike or lightlike).
double spacelikeDistance(const AdSPoint& x, const AdSPoint& y);

/// A spacelike geodesic preserved by g: base point, endpoints in the
/// positive and negative directions, and the translation of g along it.
struct InvariantGeodesic {
  AdSPoint base;
  BoundaryPoint plus;
  BoundaryPoint minus;
  double translation = 0.0;
};

/// The two g-invariant spacelike geodesics obtained from the diagonal frames
/// of left and right.  Entry 0 is the axis (attracting factors paired, shift
/// lambda + mu); entry 1 pairs attracting with repelling (shift |lambda - mu|).
std::array<InvariantGeodesic, 2> invariantGeodesics(const AdSIsometry& g);

/// (g+, g-).  Throws NotHyperbolicPair unless both factors are hyperbolic.
std::pair<BoundaryPoint, BoundaryPoint> axis(const AdSIsometry& g);

struct LorentzLength {
  /// spacelikeDistance(o, g o) for o on the axis.
  double direct = 0.0;
  /// (l(left) + l(right)) / 2.
  double fromLengths = 0.0;
  double difference() const { return std::fabs(direct - fromLengths); }
};

LorentzLength lorentzLength(const AdSIsometry& g);

/// Growth of #{c : (l1 + l2) / 2 <= R}.
GrowthEstimate deltaLorentz(const PairSpectrum& s, GrowthOptions opts = {});

struct LorentzBattery {
  int pairs = 0;
  double maxDeviation = 0.0;
};

/// lorentzLength on random conjugated hyperbolic pairs.
LorentzBattery lorentzBattery(int pairs, unsigned long long seed);

}  // namespace manhattan
