#include <algorithm>
#include <cmath>
#include <numeric>

#include "manhattan/cli.hpp"
#include "manhattan/error.hpp"

namespace manhattan {

namespace {

PairSpectrum spectrumFor(const RunConfig& c, const MarkedRepresentation& r1,
                         const MarkedRepresentation& r2, double T) {
  PairSpectrum s = classSpectrum(r1, r2, T, c.spectrum());
  return c.primitiveOnly ? primitiveSpectrum(s) : s;
}

SequencePoint sequencePoint(const RunConfig& c, int n, const MarkedRepresentation& r1,
                            const MarkedRepresentation& r2, double T) {
  const PairSpectrum s = spectrumFor(c, r1, r2, T);
  SequencePoint p;
  p.n = n;
  p.T = T;
  p.entries = s.entries.size();
  p.delta = deltaClass(s, c.growth());
  p.thurstonLowerBound = dilationBounds(s).thurstonLowerBound;
  return p;
}

EndomorphismTable power(const EndomorphismTable& t, const Presentation& p, int n) {
  EndomorphismTable out = EndomorphismTable::identity(p);
  for (int k = 0; k < n; ++k) out = out.after(t);
  return out;
}

MarkedRepresentation remarkedBy(const MarkedRepresentation& r, const EndomorphismTable& t, int n) {
  return n == 0 ? r : remark(r, power(t, r.presentation, n));
}

ConjClass curveClass(const RunConfig& c, const Presentation& p) {
  try {
    return canonicalClass(p.parse(c.curve), p);
  } catch (const Error& e) {
    throw ConfigError("curve '" + c.curve + "': " + e.what());
  }
}

// Spectral radius of the action on the abelianization.
double homologyDilatation(const EndomorphismTable& t, const Presentation& p) {
  const int r = p.rank();
  std::vector<double> m(static_cast<std::size_t>(r * r), 0.0);
  for (int j = 0; j < r; ++j) {
    for (Letter x : t.images[static_cast<std::size_t>(j)].letters) {
      m[static_cast<std::size_t>(generatorOf(x) * r + j)] += isInverse(x) ? -1.0 : 1.0;
    }
  }
  // Power iteration on M^T M would give singular values; for the 2x2 case
  // the eigenvalues are explicit, which is all the free-pair map needs.
  if (r != 2) throw ConfigError("dilatation only for rank-2 maps");
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = tr * tr - 4 * det;
  if (disc < 0) return std::sqrt(std::fabs(det));
  return std::max(std::fabs(0.5 * (tr + std::sqrt(disc))), std::fabs(0.5 * (tr - std::sqrt(disc))));
}

double combined(const GrowthEstimate& a, const GrowthEstimate& b) {
  return std::hypot(a.stdErr, b.stdErr);
}

}  // namespace

DehnTwistResult dehnTwistExperiment(const RunConfig& c) {
  const MarkedRepresentation s0 = buildRepresentation(c, c.rep1);
  const Presentation& p = s0.presentation;
  const ConjClass curve = curveClass(c, p);
  const EndomorphismTable plus = twistAutomorphism(p, curve, 1);
  const EndomorphismTable minus = twistAutomorphism(p, curve, -1);

  DehnTwistResult r;
  r.points.resize(static_cast<std::size_t>(c.nMax) + 1);
  parallelFor(c.nMax + 1, c.workers, [&](int n) {
    r.points[static_cast<std::size_t>(n)] =
        sequencePoint(c, n, remarkedBy(s0, minus, n), remarkedBy(s0, plus, n), c.T);
  });

  // Exact layer on the classes of the untwisted spectrum.
  const PairSpectrum base = spectrumFor(c, s0, s0, c.T);
  std::vector<MarkedRepresentation> up{s0}, down{s0};
  for (int n = 1; n <= c.exactPowers; ++n) {
    up.push_back(remark(s0, twistAutomorphism(p, curve, n)));
    down.push_back(remark(s0, twistAutomorphism(p, curve, -n)));
  }
  r.exactClasses = base.entries.size();
  for (const SpectrumEntry& e : base.entries) {
    double prev = -1.0;
    for (int n = 0; n <= c.exactPowers; ++n) {
      const auto i = static_cast<std::size_t>(n);
      const double f = lengthOf(up[i], e.cls.canonical) + lengthOf(down[i], e.cls.canonical);
      if (n > 0 && prev - f > r.exactWorstDecrease) {
        r.exactWorstDecrease = prev - f;
        r.exactWorstClass = p.str(e.cls.canonical);
      }
      prev = f;
    }
  }

  r.checks.push_back(makeCheck("exact: l(tau^n c) + l(tau^-n c) non-decreasing, n <= " +
                                   std::to_string(c.exactPowers),
                               1e-8 - r.exactWorstDecrease,
                               std::to_string(r.exactClasses) + " classes"));
  double worstRise = -1e300;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const auto& a = r.points[i - 1].delta;
    const auto& b = r.points[i].delta;
    worstRise = std::max(worstRise, b.exponent - a.exponent - c.tol(combined(a, b)));
  }
  if (r.points.size() > 1) r.checks.push_back(makeCheck("delta non-increasing within tolerance", -worstRise));
  const auto& first = r.points.front().delta;
  const auto& last = r.points.back().delta;
  r.checks.push_back(makeCheck("final delta < 1/2", 0.5 - last.exponent));
  if (c.nMax >= 3) {
    const auto& third = r.points[3].delta;
    r.checks.push_back(makeCheck("delta(3) <= delta(0) - 0.02", first.exponent - 0.02 - third.exponent));
  }
  return r;
}

PseudoAnosovResult pseudoAnosovExperiment(const RunConfig& c) {
  if (c.mode != PresentationMode::FreeRank2) {
    throw ConfigError("pseudo-anosov runs on the free pair; no filling pair of supported twist curves in genus 2");
  }
  const MarkedRepresentation s0 = buildRepresentation(c, c.rep1);
  const Presentation& p = s0.presentation;
  const ConjClass a = canonicalClass(p.parse("a"), p);
  const ConjClass b = canonicalClass(p.parse("b"), p);
  PseudoAnosovResult r;
  r.map = twistAutomorphism(p, a, 1).after(twistAutomorphism(p, b, -1));
  const EndomorphismTable inverse = twistAutomorphism(p, b, 1).after(twistAutomorphism(p, a, -1));
  r.dilatation = homologyDilatation(r.map, p);
  r.points.resize(static_cast<std::size_t>(c.nMax) + 1);
  parallelFor(c.nMax + 1, c.workers, [&](int n) {
    // Lengths grow like k^n, so a fixed cutoff would leave nothing to count.
    const double scale = std::max(1.0, c.cutoffScale * std::cosh(n * std::log(r.dilatation)));
    r.points[static_cast<std::size_t>(n)] =
        sequencePoint(c, n, remarkedBy(s0, inverse, n), remarkedBy(s0, r.map, n), c.T * scale);
  });
  double worst = 1e300;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    worst = std::min(worst, r.points[i - 1].delta.exponent - r.points[i].delta.exponent);
  }
  if (r.points.size() > 1) r.checks.push_back(makeCheck("delta strictly decreasing", worst));
  r.checks.push_back(makeCheck("total drop >= 0.05",
                               r.points.front().delta.exponent - r.points.back().delta.exponent - 0.05));
  return r;
}

ShrinkResult shrinkExperiment(const RunConfig& c) {
  if (c.mode != PresentationMode::GenusTwoSurface) throw ConfigError("shrink needs genus-2 mode");
  if (c.pantsCurve < 0 || c.pantsCurve > 2) throw ConfigError("pants_curve must be 0, 1 or 2");
  if (c.detectors.size() != 2 || !(c.detectors[0] > c.detectors[1]) || !(c.detectors[1] > 0)) {
    throw ConfigError("detectors must be two decreasing positive lengths");
  }
  const auto k = static_cast<std::size_t>(c.pantsCurve);
  const MarkedRepresentation s0 = buildRepresentation(c, c.rep1);
  RepSpec d1 = c.rep1, d2 = c.rep1;
  d1.fn.lengths[k] = c.detectors[0];
  d2.fn.lengths[k] = c.detectors[1];
  const MarkedRepresentation det1 = buildRepresentation(c, d1);
  const MarkedRepresentation det2 = buildRepresentation(c, d2);

  ShrinkResult r;
  // Collar width is about 2 log(1/l) per crossing.
  r.shiftPerCrossing = 2.0 * std::log(c.detectors[0] / c.detectors[1]);
  const double cut = 0.5 * r.shiftPerCrossing;
  r.points.resize(static_cast<std::size_t>(c.nMax) + 1);
  parallelFor(c.nMax + 1, c.workers, [&](int n) {
    RepSpec sn = c.rep1;
    sn.fn.lengths[k] = c.rep1.fn.lengths[k] * std::exp(-n);
    const PairSpectrum s = spectrumFor(c, s0, buildRepresentation(c, sn), c.T);
    ShrinkPoint& pt = r.points[static_cast<std::size_t>(n)];
    pt.n = n;
    pt.length = sn.fn.lengths[k];
    pt.entries = s.entries.size();
    pt.delta = deltaClass(s, c.growth());
    PairSpectrum sub = s;
    sub.entries.clear();
    pt.crossingShiftMin = 1e300;
    for (const SpectrumEntry& e : s.entries) {
      const double shift = lengthOf(det2, e.cls.canonical) - lengthOf(det1, e.cls.canonical);
      if (shift < cut) {
        sub.entries.push_back(e);
        pt.disjointShiftMax = std::max(pt.disjointShiftMax, shift);
      } else {
        pt.crossingShiftMin = std::min(pt.crossingShiftMin, shift);
      }
    }
    pt.disjoint = sub.entries.size();
    try {
      pt.disjointDelta = deltaClass(sub, c.growth());
    } catch (const InsufficientData&) {
      // Reported as missing; the check below then fails on this point.
    }
  });
  const ShrinkPoint& last = r.points.back();
  r.checks.push_back(makeCheck("liminf delta > 0 (last point)", last.delta.exponent - c.tol(last.delta.stdErr)));
  r.checks.push_back(makeCheck(
      "disjoint sub-spectrum exponent > 0",
      last.disjointDelta ? last.disjointDelta->exponent - c.tol(last.disjointDelta->stdErr) : -1.0));
  double gap = 1e300;
  for (const ShrinkPoint& pt : r.points) gap = std::min(gap, pt.crossingShiftMin - pt.disjointShiftMax);
  r.checks.push_back(makeCheck("detector separates disjoint from crossing classes", gap,
                               "shift per crossing " + std::to_string(r.shiftPerCrossing)));
  return r;
}

namespace {

std::vector<TwistPoint> twistPath(const RunConfig& c, const std::vector<double>& ts) {
  if (c.mode != PresentationMode::GenusTwoSurface) throw ConfigError("twist paths need genus-2 mode");
  if (c.twistIndex < 0 || c.twistIndex > 2) throw ConfigError("twist_index must be 0, 1 or 2");
  const MarkedRepresentation s0 = buildRepresentation(c, c.rep1);
  std::vector<TwistPoint> out(ts.size());
  parallelFor(static_cast<int>(ts.size()), c.workers, [&](int i) {
    const auto u = static_cast<std::size_t>(i);
    RepSpec st = c.rep1;
    st.fn.twists[static_cast<std::size_t>(c.twistIndex)] += ts[u];
    const PairSpectrum s = spectrumFor(c, s0, buildRepresentation(c, st), c.T);
    out[u].t = ts[u];
    out[u].entries = s.entries.size();
    out[u].delta = deltaClass(s, c.growth());
    out[u].thurstonLowerBound = dilationBounds(s).thurstonLowerBound;
  });
  return out;
}

}  // namespace

IsolationResult isolationExperiment(const RunConfig& c) {
  IsolationResult r;
  r.points = twistPath(c, c.twistGrid);
  double num = 0.0, den = 0.0;
  for (const TwistPoint& p : r.points) {
    num += std::fabs(p.delta.exponent - 0.5) * p.thurstonLowerBound;
    den += p.thurstonLowerBound * p.thurstonLowerBound;
  }
  r.fittedC = den > 0 ? num / den : 0.0;
  double worst = 1e300;
  for (const TwistPoint& p : r.points) {
    worst = std::min(worst, r.fittedC * p.thurstonLowerBound + c.tol(p.delta.stdErr) -
                                std::fabs(p.delta.exponent - 0.5));
  }
  r.checks.push_back(makeCheck("|delta - 1/2| <= C * thurston bound + tol", worst,
                               "C = " + std::to_string(r.fittedC)));
  const auto nearest = std::min_element(r.points.begin(), r.points.end(), [](const auto& a, const auto& b) {
    return a.thurstonLowerBound < b.thurstonLowerBound;
  });
  r.checks.push_back(makeCheck("delta near 1/2 where the bound is smallest",
                               c.tol(nearest->delta.stdErr) - std::fabs(nearest->delta.exponent - 0.5)));
  return r;
}

FnPathResult fnPathExperiment(const RunConfig& c) {
  if (c.periodSteps < 1 || c.periods < 1) throw ConfigError("period_steps and periods must be positive");
  FnPathResult r;
  const double alpha = c.rep1.fn.lengths[static_cast<std::size_t>(c.twistIndex)];
  r.period = 2.0 * alpha;
  const int n = c.periodSteps * c.periods + 1;
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(c.twistAmplitude * r.period * i / c.periodSteps);
  r.points = twistPath(c, ts);
  for (int i = 0; i + c.periodSteps < n && i < c.periodSteps; ++i) {
    r.drift.push_back(std::fabs(r.points[static_cast<std::size_t>(i + c.periodSteps)].delta.exponent -
                                r.points[static_cast<std::size_t>(i)].delta.exponent));
  }
  for (int step = 1; step < n; step *= 2) {
    double worst = 0.0;
    for (int i = 0; i + step < n; ++i) {
      worst = std::max(worst, std::fabs(r.points[static_cast<std::size_t>(i + step)].delta.exponent -
                                        r.points[static_cast<std::size_t>(i)].delta.exponent));
    }
    r.modulus.emplace_back(ts.size() > 1 ? step * (ts[1] - ts[0]) : 0.0, worst);
  }
  const auto [lo, hi] = std::minmax_element(r.points.begin(), r.points.end(), [](const auto& a, const auto& b) {
    return a.delta.exponent < b.delta.exponent;
  });
  r.amplitude = hi->delta.exponent - lo->delta.exponent;
  return r;
}

AdsVerifyResult adsVerifyExperiment(const RunConfig& c) {
  AdsVerifyResult r;
  r.battery = lorentzBattery(c.pairs, c.seed);
  r.checks.push_back(makeCheck("|direct - (l1 + l2)/2| <= 1e-8", 1e-8 - r.battery.maxDeviation,
                               std::to_string(r.battery.pairs) + " pairs"));
  return r;
}

}  // namespace manhattan
