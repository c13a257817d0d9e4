#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "manhattan/spectrum.hpp"

namespace manhattan {

/// Finite-T bias models.  Power regresses log(N T^p); LogIntegral fits
/// N = C Ei(hT), the closed-geodesic law e^{hT}/(hT) with its full tail.
enum class Correction { Power, LogIntegral };

struct GrowthOptions {
  /// Regression window is [windowStart * T_max, T_max].
  double windowStart = 0.6;
  int samples = 24;
  int minSamples = 8;
  double minFinalCount = 50.0;
  /// Report the corrected fit as the exponent.  Both fits are always computed.
  bool logCorrection = false;
  /// Set by the frame functions below; only growthExponent callers choose.
  Correction model = Correction::Power;
  double logPower = 1.0;
  /// Box counts are not cumulative and may dip; skip the monotonicity check.
  bool allowNonMonotone = false;
};

struct GrowthEstimate {
  double exponent = 0.0;
  double stdErr = 0.0;
  double tMin = 0.0;
  double tMax = 0.0;
  int sampleCount = 0;
  double uncorrected = 0.0;
  double corrected = 0.0;
  double correctionPower = 0.0;
  Correction model = Correction::Power;
  bool correctionApplied = false;
  /// Local slopes over four sub-windows are not monotone.
  bool nonMonotoneSlope = false;
  double finalCount = 0.0;
  std::string frame;
};

/// Tolerance policy for asserted inequalities.
struct TolerancePolicy {
  double floor = 0.02;
  double factor = 2.0;
  double operator()(double stdErr) const { return std::max(floor, factor * stdErr); }
};

GrowthEstimate growthExponent(const std::vector<std::pair<double, double>>& counts,
                              const GrowthOptions& opts = {});

/// Samples count(T) on the regression window ending at tMax and fits it.
GrowthEstimate fitGrowth(const std::function<double(double)>& count, double tMax,
                         const GrowthOptions& opts);

/// Class frame: growth of #{l1 + l2 <= T}.
GrowthEstimate deltaClass(const PairSpectrum& s, GrowthOptions opts = {});
/// Orbit frame: growth of #{d1 + d2 <= R}.
GrowthEstimate deltaOrbit(const OrbitBall& b, GrowthOptions opts = {});
/// Growth of #{l1 <= T}, the single-surface exponent.
GrowthEstimate singleExponent(const PairSpectrum& s, GrowthOptions opts = {});

struct PairDelta {
  GrowthEstimate classFrame;
  GrowthEstimate orbitFrame;
};

/// Both counting frames; the orbit ball uses radius orbitRadius with weights (1, 1).
PairDelta deltaPair(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double T,
                    double orbitRadius, const GrowthOptions& opts = {},
                    const SpectrumOptions& sopts = {});

struct CurveSample {
  double theta = 0.0;
  double r = 0.0;
  double stdErr = 0.0;
  double x = 0.0;
  double y = 0.0;
  GrowthEstimate fit;
};

struct CurveEstimate {
  /// Sorted by theta, so x decreases along the list.
  std::vector<CurveSample> samples;
};

/// 17 angles clustered toward the ends of [margin, pi/2 - margin], with pi/4
/// in the middle; endpoints 0 and pi/2 added on request.
std::vector<double> chebyshevThetas(int n = 17, double margin = 0.05, bool endpoints = true);

CurveEstimate curveSample(const PairSpectrum& s, const std::vector<double>& thetas,
                          GrowthOptions opts = {});

/// Signed distance of each interior sample above the chord through its
/// neighbours; positive values are convexity violations.  Entry i belongs to
/// sample i + 1.
std::vector<double> convexityDefects(const CurveEstimate& c);

/// Intersection with the diagonal, interpolated in theta.
double diagonalPoint(const CurveEstimate& c);

/// Normal slope -1/q'(x) from a quadratic fit to the `points` nearest samples.
double normalSlope(const CurveEstimate& c, double x, int points = 5);

struct DilationBounds {
  double dilMinus = 1.0;
  double dilPlus = 1.0;
  double thurstonLowerBound = 0.0;
};

DilationBounds dilationBounds(const PairSpectrum& s);

/// Mean l2 / l1 over entries with l1 in [T1 - 1, T1], T1 the certified cutoff
/// for l1 alone.
double stretchEstimate(const PairSpectrum& s);

struct SlopeReport {
  std::map<double, double> lambdaAt;
  double delta = 0.0;
  double maximalSlope = 0.0;
  double stretch = 0.0;
  double stretchIndependent = 0.0;
  DilationBounds dil;
};

SlopeReport slopeReport(const CurveEstimate& c, const PairSpectrum& s,
                        const std::vector<double>& xs = {});

/// Growth of the band count |l2/l1 - lambda| <= eps against l1 + l2.
GrowthEstimate deltaSlope(const PairSpectrum& s, double lambda, double eps, GrowthOptions opts = {});

/// Growth of the box count against l1.  Sampled on a fine grid rather than
/// integers so the window holds enough points.
GrowthEstimate correlation(const PairSpectrum& s, double lambda, GrowthOptions opts = {});

/// n slopes spanning (dilMinus, dilPlus) padded inward by `pad` of the width.
std::vector<double> lambdaGrid(const DilationBounds& d, int n = 9, double pad = 0.05);

}  // namespace manhattan
