#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "manhattan/reps.hpp"

namespace manhattan {

struct OrbitEntry {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Group elements with x d1 + y d2 <= radius, where d_i = d(rho_i(g) i, i).
struct OrbitBall {
  double radius = 0.0;
  double x = 1.0;
  double y = 1.0;
  std::vector<OrbitEntry> entries;
  std::size_t visited = 0;
  /// Smallest hyperbolic distance seen between orbit points of distinct
  /// elements sharing a dedup cell; a value near the tolerance would signal a
  /// merge hazard.
  double nearestMiss = 0.0;
};

struct OrbitOptions {
  std::size_t maxEntries = 20'000'000;
  /// Hyperbolic distance under which two orbit points are one element.
  double dedupTol = 1e-6;
};

OrbitBall orbitBall(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double radius,
                    double x, double y, const OrbitOptions& opts = {});

struct SpectrumEntry {
  ConjClass cls;
  double l1 = 0.0;
  double l2 = 0.0;
  bool primitive = true;
};

struct PairSpectrum {
  MarkedRepresentation rep1;
  MarkedRepresentation rep2;
  double cutoff = 0.0;
  /// Word-length horizon L used by the final (audited) enumeration.
  int completenessBound = 0;
  /// Slack on prefix displacement sums used by the final enumeration.
  double tubeSlack = 0.0;
  /// Empirical minimal (l1 + l2) per letter.
  double cMin = 0.0;
  /// Classes identified by the conjugacy witness after a fingerprint match.
  std::size_t witnessMerges = 0;
  /// Fingerprint matches that the witness search rejected as distinct.
  std::size_t fingerprintCollisions = 0;
  /// Sorted by l1 + l2, then canonical word.
  std::vector<SpectrumEntry> entries;
};

struct SpectrumOptions {
  double tubeSlack = 4.0;
  /// Growth of the slack and horizon per audit round.
  double auditSlack = 2.0;
  int auditLength = 2;
  int maxGrowthRounds = 2;
  bool audit = true;
  std::size_t maxNodes = 400'000'000;
  int workers = 1;
};

/// Closed geodesic pair spectrum {(c, l1(c), l2(c)) : l1 + l2 <= T}.
PairSpectrum classSpectrum(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double T,
                           const SpectrumOptions& opts = {});

/// min over sampled classes (up to `depth` letters) of (l1 + l2) / word length.
double lengthPerLetter(const MarkedRepresentation& r1, const MarkedRepresentation& r2, int depth = 6);

/// Searches for g with g u g^-1 = v^(+-1) in a faithful representation.
bool conjugateInRep(const MarkedRepresentation& rep, const Word& u, const Word& v);

/// Largest T for which counting x l1 + y l2 <= T is complete.
double certifiedCutoff(const PairSpectrum& s, double x, double y);

std::size_t countWeighted(const PairSpectrum& s, double x, double y, double T);
std::size_t countWeighted(const OrbitBall& b, double x, double y, double T);
/// Classes with |l2/l1 - lambda| <= eps and l1 + l2 <= T.
std::size_t countBand(const PairSpectrum& s, double lambda, double eps, double T);
/// Classes with l1 in [T, T+1) and l2 in [lambda T, lambda T + 1).
std::size_t countBox(const PairSpectrum& s, double lambda, double T);

/// Copy keeping only primitive classes.
PairSpectrum primitiveSpectrum(const PairSpectrum& s);

/// Empirical min and max of l2 / l1.
std::pair<double, double> ratioRange(const PairSpectrum& s);

void saveSpectrum(const PairSpectrum& s, const std::string& path);
PairSpectrum loadSpectrum(const std::string& path);
std::string serializeSpectrum(const PairSpectrum& s);
PairSpectrum parseSpectrum(const std::string& text);

}  // namespace manhattan
