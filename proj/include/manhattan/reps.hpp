#pragma once

#include <functional>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "manhattan/moebius.hpp"
#include "manhattan/words.hpp"

namespace manhattan {

/// Genus-2 Fenchel-Nielsen coordinates.  Curve 0 is a1, curve 1 is a2, and
/// curve 2 is the third pants curve, freely homotopic to (a1 x2)^-1 where x2
/// is the second boundary of the first pair of pants.
struct FenchelNielsen {
  std::array<double, 3> lengths{2.0, 2.0, 2.0};
  std::array<double, 3> twists{0.0, 0.0, 0.0};
};

struct FreePairTraces {
  double trA = 3.0;
  double trB = 3.0;
  double trAB = 3.0;
};

constexpr int kDefaultProbeDepth = 8;

/// Generator images of a marked hyperbolic structure.  The images are
/// conjugated so the sum of generator displacements at i is minimal; marking
/// changes via remark() do not recenter.
struct MarkedRepresentation {
  Presentation presentation = Presentation::freeRank2();
  std::vector<Moebius> images;
  double relatorResidual = 0.0;
  double discretenessWitness = 0.0;
  int probeDepth = kDefaultProbeDepth;

  // Where the representation came from, kept for descriptors and reports.
  std::optional<FenchelNielsen> fn;
  std::optional<FreePairTraces> traces;
  std::vector<EndomorphismTable> history;
  /// Images before the first remark.  When set, evaluate substitutes words
  /// through history and multiplies these, avoiding the cancellation that
  /// products of long remarked images suffer.
  std::vector<Moebius> base;
};

MarkedRepresentation fromFenchelNielsen(const FenchelNielsen& fn, int probeDepth = kDefaultProbeDepth);
MarkedRepresentation fromFreePair(double trA, double trB, double trAB,
                                  int probeDepth = kDefaultProbeDepth);
/// Validates arbitrary generator matrices (residual and probe) without centering.
MarkedRepresentation fromImages(const Presentation& p, std::vector<Moebius> images,
                                int probeDepth = kDefaultProbeDepth);

/// New marking g -> evaluate(rep, auto(g)).
MarkedRepresentation remark(const MarkedRepresentation& rep, const EndomorphismTable& table);

Moebius evaluate(const MarkedRepresentation& rep, const Word& w);
/// w rewritten in the marking of `base` by substituting through history.
Word unmark(const MarkedRepresentation& rep, Word w);
/// Some element conjugate to evaluate(rep, w), computed from a cyclically
/// reduced word so traces keep their precision.
Moebius evaluateClass(const MarkedRepresentation& rep, const Word& w);
double lengthOf(const MarkedRepresentation& rep, const ConjClass& c);
double lengthOf(const MarkedRepresentation& rep, const Word& w);

/// Conjugate of `images` by the isometry moving the minimizer of
/// sum cosh d(g p, p) to i.
/// The isometry h used by centered: images become conjugate(g, h).
Moebius centeringMap(const std::vector<Moebius>& images);
std::vector<Moebius> centered(const std::vector<Moebius>& images);

/// Shortest translation length over nontrivial classes up to `depth` letters.
/// Throws NotDiscernedDiscrete when some class is not hyperbolic.
double discretenessProbe(const Presentation& p, const std::vector<Moebius>& images, int depth);
/// As above, but suspicious or record-setting prefix products are recomputed
/// with `exact` before they are trusted.
double discretenessProbe(const Presentation& p, const std::vector<Moebius>& images, int depth,
                         const std::function<Moebius(const Word&)>& exact);

/// Entrywise distance of the relator image from the identity (0 when free).
double relatorResidual(const Presentation& p, const std::vector<Moebius>& images);

/// Word for the third pants curve of the genus-2 construction.
Word thirdPantsCurve(const Presentation& p);

/// A fixed asymmetric structure used to separate length coincidences.
MarkedRepresentation probeRepresentation(PresentationMode mode);

std::string writeDescriptor(const MarkedRepresentation& rep);
/// Inverse of writeDescriptor; throws FormatError on malformed input.
MarkedRepresentation readDescriptor(const std::string& text);

}  // namespace manhattan
