#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manhattan/adscheck.hpp"
#include "manhattan/manhattan.hpp"

namespace manhattan {

/// One surface: Fenchel-Nielsen coordinates in genus-2 mode, traces
/// (tr a, tr b, tr ab) in free mode.
struct RepSpec {
  FenchelNielsen fn;
  FreePairTraces traces;
};

struct RunConfig {
  PresentationMode mode = PresentationMode::GenusTwoSurface;
  RepSpec rep1;
  RepSpec rep2;
  double T = 20.0;
  std::uint64_t seed = 1;
  std::string out = "out";
  int workers = 1;

  // [estimate]
  bool logCorrection = true;
  bool primitiveOnly = true;
  double orbitRadius = 0.0;  // 0 skips the orbit frame
  double windowStart = 0.6;
  int samples = 24;
  int thetaCount = 17;
  int lambdaCount = 13;
  double bandEps = 0.05;
  TolerancePolicy tol;

  // [spectrum]
  double tubeSlack = 4.0;
  int maxGrowthRounds = 2;

  // [experiment]
  int nMax = 3;
  std::string curve = "a";
  int exactPowers = 5;
  double cutoffScale = 0.6;
  int pantsCurve = 0;
  std::vector<double> detectors{0.05, 0.01};
  std::vector<double> twistGrid{0.0, 0.05, 0.1, 0.2, 0.4};
  int twistIndex = 0;
  int periodSteps = 8;
  int periods = 2;
  double twistAmplitude = 1.0;
  int pairs = 10000;

  GrowthOptions growth() const;
  SpectrumOptions spectrum() const;
};

/// Flat key=value text with [section] headers; '#' starts a comment.
/// Unknown sections or keys are ConfigErrors.
RunConfig parseConfig(const std::string& text);
RunConfig loadConfig(const std::string& path);

/// Canonical rendering of every field that can change a result, used for the
/// hash and echoed into reports.  out and workers are left out, so reruns into
/// another directory or with more threads hash the same.
std::string configEcho(const RunConfig& c);
/// FNV-1a of the echo, as 16 hex digits.
std::string configHash(const RunConfig& c);

MarkedRepresentation buildRepresentation(const RunConfig& c, const RepSpec& r);

/// Worker count from MANHATTAN_WORKERS, else `fallback`.
int workersFromEnvironment(int fallback);

/// Runs f(0..n-1) on up to `workers` threads; results land by index, so the
/// output does not depend on scheduling.  The first exception is rethrown.
void parallelFor(int n, int workers, const std::function<void(int)>& f);

/// A checked inequality: pass iff margin >= 0.
struct Check {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

Check makeCheck(std::string name, double margin, std::string detail = {});

// ---------------------------------------------------------------------------
// Shared analyses behind the delta and curve commands.

/// rep1/rep2 spectrum to c.T, primitive classes only when c.primitiveOnly.
PairSpectrum configSpectrum(const RunConfig& c);

struct DeltaResult {
  std::size_t entries = 0;
  GrowthEstimate classFrame;
  std::optional<GrowthEstimate> orbitFrame;
  GrowthEstimate lorentz;
  GrowthEstimate single;
  DilationBounds dil;
  std::vector<Check> checks;
};

DeltaResult deltaAnalysis(const RunConfig& c, const PairSpectrum& s);

struct BandPoint {
  double lambda = 0.0;
  std::optional<GrowthEstimate> slope;  // directional exponent
  double bound = 0.0;                   // min over samples of (x + lambda y)/(1 + lambda)
  std::optional<GrowthEstimate> correlation;
};

struct CurveResult {
  GrowthEstimate delta;
  CurveEstimate curve;
  std::vector<double> defects;
  double diagonal = 0.0;
  double chordDeviation = 0.0;
  SlopeReport slopes;
  std::vector<BandPoint> bands;
  std::vector<Check> checks;
};

/// Curve, slope chain, directional bounds and correlation numbers.  The
/// chord check is only asserted when both surfaces have the same parameters.
CurveResult curveAnalysis(const RunConfig& c, const PairSpectrum& s);

// ---------------------------------------------------------------------------
// Experiments.  Each returns its data plus the checks it asserts.

struct SequencePoint {
  int n = 0;
  double T = 0.0;
  std::size_t entries = 0;
  GrowthEstimate delta;
  double thurstonLowerBound = 0.0;
};

struct DehnTwistResult {
  std::vector<SequencePoint> points;
  /// Classes checked by the exact layer and the worst decrease found.
  std::size_t exactClasses = 0;
  double exactWorstDecrease = 0.0;
  std::string exactWorstClass;
  std::vector<Check> checks;
};

/// delta(tau^-n S, tau^n S) for n = 0..nMax, and the exact convexity layer:
/// l(tau^n c) + l(tau^-n c) non-decreasing in n <= exactPowers over the
/// classes of the n = 0 spectrum.
DehnTwistResult dehnTwistExperiment(const RunConfig& c);

struct PseudoAnosovResult {
  EndomorphismTable map;
  double dilatation = 0.0;
  std::vector<SequencePoint> points;
  std::vector<Check> checks;
};

/// A = tau_a o tau_b^-1 on the free pair; delta(A^-n S, A^n S) with the
/// cutoff scaled by max(1, cutoffScale * cosh(n log k)), k the dilatation.
PseudoAnosovResult pseudoAnosovExperiment(const RunConfig& c);

struct ShrinkPoint {
  int n = 0;
  double length = 0.0;
  std::size_t entries = 0;
  std::size_t disjoint = 0;
  GrowthEstimate delta;
  std::optional<GrowthEstimate> disjointDelta;
  /// Largest detector shift among classes called disjoint, smallest among
  /// classes called crossing.
  double disjointShiftMax = 0.0;
  double crossingShiftMin = 0.0;
};

struct ShrinkResult {
  double shiftPerCrossing = 0.0;
  std::vector<ShrinkPoint> points;
  std::vector<Check> checks;
};

/// Pants curve `pantsCurve` of rep1 scaled by e^-n.  Classes disjoint from it
/// are told apart by two detector surfaces where that curve is very short:
/// each crossing adds about 2 log(d1/d2) to the difference of their lengths.
ShrinkResult shrinkExperiment(const RunConfig& c);

struct TwistPoint {
  double t = 0.0;
  std::size_t entries = 0;
  GrowthEstimate delta;
  double thurstonLowerBound = 0.0;
};

struct IsolationResult {
  std::vector<TwistPoint> points;
  /// Least-squares C through the origin for |delta - 1/2| against the bound.
  double fittedC = 0.0;
  std::vector<Check> checks;
};

IsolationResult isolationExperiment(const RunConfig& c);

struct FnPathResult {
  double period = 0.0;
  std::vector<TwistPoint> points;
  /// |delta(t + period) - delta(t)| for each t of the first period.
  std::vector<double> drift;
  /// (step, max |delta(t + step) - delta(t)|) over the grid.
  std::vector<std::pair<double, double>> modulus;
  double amplitude = 0.0;
};

/// Twist along pants curve twistIndex over `periods` periods of length
/// 2 l(alpha), periodSteps points per period, scaled by twistAmplitude.
/// Reported only: whether delta is constant along the path is open.
FnPathResult fnPathExperiment(const RunConfig& c);

struct AdsVerifyResult {
  LorentzBattery battery;
  std::vector<Check> checks;
};

AdsVerifyResult adsVerifyExperiment(const RunConfig& c);

// ---------------------------------------------------------------------------
// Commands.  Each writes its artifacts under c.out in one pass at the end
// and returns the process exit status: 0 ok, 2 a checked inequality failed.

int cmdSpectrum(const RunConfig& c);
int cmdDelta(const RunConfig& c);
int cmdCurve(const RunConfig& c);
int cmdExperiment(const std::string& name, const RunConfig& c);

const std::vector<std::string>& experimentNames();

/// Curve plot with the chord x + y = 1, the diagonal, and the tangent at
/// (delta, delta).  Coordinates are printed at fixed precision so the file
/// is byte-stable.
std::string curveSvg(const CurveEstimate& curve, double delta, double tangentSlope);

}  // namespace manhattan
