#include "manhattan/manhattan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "manhattan/error.hpp"

namespace manhattan {

namespace {

// Finite-T bias by counting frame: closed geodesic counts follow Ei(hT),
// orbit counts e^{hT}, and the correlated box counts e^{mT}/T^{3/2}.
constexpr double kOrbitPower = 0.0;
constexpr double kBoxPower = 1.5;
constexpr double kNarrowBandPower = 0.5;

// Standard deviation of l2 / l1 over entries with l1 + l2 >= from.
double ratioSpread(const PairSpectrum& s, double from) {
  double m = 0.0;
  double q = 0.0;
  std::size_t n = 0;
  for (const auto& e : s.entries) {
    if (e.l1 + e.l2 < from) continue;
    const double r = e.l2 / e.l1;
    m += r;
    q += r * r;
    ++n;
  }
  if (n < 2) return 0.0;
  m /= static_cast<double>(n);
  return std::sqrt(std::max(0.0, q / static_cast<double>(n) - m * m));
}

GrowthOptions classFrame(GrowthOptions opts) {
  opts.model = Correction::LogIntegral;
  opts.logPower = 1.0;
  return opts;
}

struct LineFit {
  double slope = 0.0;
  double se = 0.0;
};

LineFit fitLine(const std::vector<double>& t, const std::vector<double>& y, std::size_t lo,
                std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (y[i] - my);
  }
  LineFit f;
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = y[i] - my - f.slope * (t[i] - mt);
      ssr += r * r;
    }
    f.se = std::sqrt(ssr / (n - 2) / sxx);
  }
  return f;
}

// Least squares for log N = c + log Ei(h T), by golden section on h (the
// best c is the mean residual).  The error comes from linearizing in h.
LineFit fitLogIntegral(const std::vector<double>& t, const std::vector<double>& y, std::size_t lo,
                       std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  const auto spread = [&](double h) {
    double m = 0.0;
    double q = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = y[i] - std::log(std::expint(h * t[i]));
      m += r;
      q += r * r;
    }
    m /= n;
    return q / n - m * m;
  };
  double a = 0.01;
  double b = 4.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = spread(c);
  double fd = spread(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = spread(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = spread(d);
    }
  }
  LineFit f;
  f.slope = 0.5 * (a + b);
  if (n > 2) {
    // d/dh log Ei(hT) = e^{hT} / (h Ei(hT)).
    std::vector<double> u;
    double mu = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = f.slope * t[i];
      u.push_back(std::exp(x) / (f.slope * std::expint(x)));
      mu += u.back();
    }
    mu /= n;
    double suu = 0.0;
    for (double v : u) suu += (v - mu) * (v - mu);
    if (suu > 0) f.se = std::sqrt(spread(f.slope) * n / (n - 2) / suu);
  }
  return f;
}

struct Fit {
  double slope = 0.0;
  double err = 0.0;
  bool nonMonotone = false;
};

template <class Fitter>
Fit fitWindow(std::size_t n, Fitter fit) {
  const LineFit all = fit(0, n);
  const LineFit a = fit(0, n / 2);
  const LineFit b = fit(n / 2, n);
  Fit f;
  f.slope = all.slope;
  const double drift = 0.5 * std::fabs(b.slope - a.slope);
  f.err = std::sqrt(all.se * all.se + drift * drift);
  if (n >= 12) {
    std::array<double, 4> q{};
    for (std::size_t k = 0; k < 4; ++k) q[k] = fit(k * n / 4, (k + 1) * n / 4).slope;
    const bool up = q[0] <= q[1] && q[1] <= q[2] && q[2] <= q[3];
    const bool down = q[0] >= q[1] && q[1] >= q[2] && q[2] >= q[3];
    f.nonMonotone = !up && !down;
  }
  return f;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

GrowthEstimate tagged(GrowthEstimate g, const char* frame) {
  g.frame = frame;
  return g;
}

}  // namespace

GrowthEstimate growthExponent(const std::vector<std::pair<double, double>>& counts,
                              const GrowthOptions& opts) {
  if (counts.empty()) throw InsufficientData("no counts");
  std::vector<std::pair<double, double>> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const double tMax = sorted.back().first;
  const double tMin = opts.windowStart * tMax;
  const double finalCount = sorted.back().second;
  if (finalCount < opts.minFinalCount) {
    throw InsufficientData("final count " + std::to_string(finalCount) + " below " +
                           std::to_string(opts.minFinalCount));
  }
  std::vector<double> t;
  std::vector<double> logN;
  std::vector<double> logNT;
  double prev = -1.0;
  double first = -1.0;
  for (const auto& [T, N] : sorted) {
    if (T < tMin) continue;
    if (!opts.allowNonMonotone && N < prev) throw InsufficientData("counts decrease at T=" + std::to_string(T));
    prev = N;
    if (first < 0) first = N;
    if (N <= 0 || T <= 0) continue;
    t.push_back(T);
    logN.push_back(std::log(N));
    logNT.push_back(std::log(N) + opts.logPower * std::log(T));
  }
  if (static_cast<int>(t.size()) < opts.minSamples) {
    throw InsufficientData(std::to_string(t.size()) + " usable samples, need " +
                           std::to_string(opts.minSamples));
  }
  if (!opts.allowNonMonotone && first == finalCount) throw InsufficientData("constant counts");

  const std::size_t n = t.size();
  const Fit raw = fitWindow(n, [&](std::size_t a, std::size_t b) { return fitLine(t, logN, a, b); });
  const Fit cor = opts.model == Correction::LogIntegral
                      ? fitWindow(n, [&](std::size_t a, std::size_t b) { return fitLogIntegral(t, logN, a, b); })
                      : fitWindow(n, [&](std::size_t a, std::size_t b) { return fitLine(t, logNT, a, b); });
  const Fit& chosen = opts.logCorrection ? cor : raw;
  GrowthEstimate g;
  g.exponent = std::max(0.0, chosen.slope);
  g.stdErr = chosen.err;
  g.tMin = t.front();
  g.tMax = t.back();
  g.sampleCount = static_cast<int>(t.size());
  g.uncorrected = raw.slope;
  g.corrected = cor.slope;
  g.correctionPower = opts.logPower;
  g.model = opts.model;
  g.correctionApplied = opts.logCorrection;
  g.nonMonotoneSlope = chosen.nonMonotone;
  g.finalCount = finalCount;
  return g;
}

GrowthEstimate fitGrowth(const std::function<double(double)>& count, double tMax,
                         const GrowthOptions& opts) {
  if (!(tMax > 0)) throw InsufficientData("window end must be positive");
  std::vector<std::pair<double, double>> counts;
  for (double T : linspace(opts.windowStart * tMax, tMax, std::max(opts.samples, 2))) {
    counts.emplace_back(T, count(T));
  }
  return growthExponent(counts, opts);
}

GrowthEstimate deltaClass(const PairSpectrum& s, GrowthOptions opts) {
  opts = classFrame(opts);
  const double T = certifiedCutoff(s, 1.0, 1.0);
  return tagged(fitGrowth([&](double t) { return static_cast<double>(countWeighted(s, 1.0, 1.0, t)); }, T, opts),
                "class");
}

GrowthEstimate deltaOrbit(const OrbitBall& b, GrowthOptions opts) {
  opts.model = Correction::Power;
  opts.logPower = kOrbitPower;
  const double R = b.radius / std::max(b.x, b.y);
  return tagged(fitGrowth([&](double t) { return static_cast<double>(countWeighted(b, 1.0, 1.0, t)); }, R, opts),
                "orbit");
}

GrowthEstimate singleExponent(const PairSpectrum& s, GrowthOptions opts) {
  opts = classFrame(opts);
  const double T = certifiedCutoff(s, 1.0, 0.0);
  return tagged(fitGrowth([&](double t) { return static_cast<double>(countWeighted(s, 1.0, 0.0, t)); }, T, opts),
                "class");
}

PairDelta deltaPair(const MarkedRepresentation& r1, const MarkedRepresentation& r2, double T,
                    double orbitRadius, const GrowthOptions& opts, const SpectrumOptions& sopts) {
  const PairSpectrum s = classSpectrum(r1, r2, T, sopts);
  const OrbitBall b = orbitBall(r1, r2, orbitRadius, 1.0, 1.0);
  return {deltaClass(s, opts), deltaOrbit(b, opts)};
}

std::vector<double> chebyshevThetas(int n, double margin, bool endpoints) {
  constexpr double quarter = std::numbers::pi / 4;
  std::vector<double> out;
  if (endpoints) out.push_back(0.0);
  for (int k = 0; k < n; ++k) {
    const double c = std::cos(std::numbers::pi * (2 * k + 1) / (2.0 * n));
    out.push_back(2 * k + 1 == n ? quarter : quarter - (quarter - margin) * c);
  }
  if (endpoints) out.push_back(std::numbers::pi / 2);
  return out;
}

CurveEstimate curveSample(const PairSpectrum& s, const std::vector<double>& thetas, GrowthOptions opts) {
  opts = classFrame(opts);
  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  CurveEstimate c;
  for (double theta : sorted) {
    if (theta < 0.0 || theta > std::numbers::pi / 2) throw OutOfRange("theta " + std::to_string(theta));
    double wx = std::cos(theta);
    double wy = std::sin(theta);
    if (wx < 1e-12) wx = 0.0;
    if (wy < 1e-12) wy = 0.0;
    const double T = certifiedCutoff(s, wx, wy);
    CurveSample p;
    p.theta = theta;
    p.fit = tagged(fitGrowth([&](double t) { return static_cast<double>(countWeighted(s, wx, wy, t)); }, T, opts),
                   "class");
    p.r = p.fit.exponent;
    p.stdErr = p.fit.stdErr;
    p.x = p.r * wx;
    p.y = p.r * wy;
    c.samples.push_back(p);
  }
  return c;
}

std::vector<double> convexityDefects(const CurveEstimate& c) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < c.samples.size(); ++i) {
    const auto& a = c.samples[i - 1];
    const auto& m = c.samples[i];
    const auto& b = c.samples[i + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    // The curve runs from the x axis toward the y axis; the origin is on the
    // left of that direction, so a sample left of the chord bulges outward
    // from a convex curve.
    const double cross = dx * (m.y - a.y) - dy * (m.x - a.x);
    out.push_back(len > 0 ? -cross / len : 0.0);
  }
  return out;
}

double diagonalPoint(const CurveEstimate& c) {
  constexpr double quarter = std::numbers::pi / 4;
  const auto& v = c.samples;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].theta == quarter) return v[i].x;
    if (i + 1 < v.size() && v[i].theta < quarter && v[i + 1].theta > quarter) {
      const double w = (quarter - v[i].theta) / (v[i + 1].theta - v[i].theta);
      return ((1 - w) * v[i].r + w * v[i + 1].r) * std::cos(quarter);
    }
  }
  throw OutOfRange("curve samples do not straddle the diagonal");
}

double normalSlope(const CurveEstimate& c, double x, int points) {
  const auto& v = c.samples;
  if (v.size() < 3) throw OutOfRange("normal slope needs three samples");
  double lo = v.front().x;
  double hi = v.front().x;
  for (const auto& p : v) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  constexpr double reach = 0.05;
  if (x < lo - reach || x > hi + reach) {
    throw OutOfRange("x=" + std::to_string(x) + " outside sampled [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  }
  std::vector<const CurveSample*> near;
  for (const auto& p : v) near.push_back(&p);
  const std::size_t k = std::min<std::size_t>(std::max(points, 3), near.size());
  std::partial_sort(near.begin(), near.begin() + static_cast<long>(k), near.end(),
                    [&](const CurveSample* a, const CurveSample* b) {
                      return std::fabs(a->x - x) < std::fabs(b->x - x);
                    });
  // Least squares for y = c0 + c1 u + c2 u^2 with u = sample x - x.
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t i = 0; i < k; ++i) {
    const double u = near[i]->x - x;
    const std::array<double, 3> phi{1.0, u, u * u};
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) m[r][col] += phi[r] * phi[col];
      m[r][3] += phi[r] * near[i]->y;
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    std::swap(m[col], m[piv]);
    if (std::fabs(m[col][col]) < 1e-300) throw OutOfRange("degenerate samples near x");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  const double slope = m[1][3] / m[1][1];
  if (!(slope < 0.0)) throw OutOfRange("curve not decreasing near x=" + std::to_string(x));
  return -1.0 / slope;
}

DilationBounds dilationBounds(const PairSpectrum& s) {
  const auto [lo, hi] = ratioRange(s);
  return {lo, hi, std::log(std::max(hi, 1.0 / lo))};
}

double stretchEstimate(const PairSpectrum& s) {
  const double T1 = certifiedCutoff(s, 1.0, 0.0);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : s.entries) {
    if (e.l1 >= T1 - 1.0 && e.l1 <= T1) {
      sum += e.l2 / e.l1;
      ++n;
    }
  }
  if (n == 0) throw InsufficientData("no classes with l1 in [" + std::to_string(T1 - 1) + ", " +
                                     std::to_string(T1) + "]");
  return sum / static_cast<double>(n);
}

SlopeReport slopeReport(const CurveEstimate& c, const PairSpectrum& s, const std::vector<double>& xs) {
  SlopeReport r;
  r.dil = dilationBounds(s);
  r.delta = diagonalPoint(c);
  r.maximalSlope = normalSlope(c, r.delta);
  r.stretch = normalSlope(c, 1.0);
  r.stretchIndependent = stretchEstimate(s);
  if (xs.empty()) {
    for (std::size_t i = 1; i + 1 < c.samples.size(); ++i) {
      r.lambdaAt[c.samples[i].x] = normalSlope(c, c.samples[i].x);
    }
  } else {
    for (double x : xs) r.lambdaAt[x] = normalSlope(c, x);
  }
  return r;
}

GrowthEstimate deltaSlope(const PairSpectrum& s, double lambda, double eps, GrowthOptions opts) {
  if (!(lambda > 0) || !(eps > 0)) throw OutOfRange("deltaSlope needs lambda > 0 and eps > 0");
  if (countBand(s, lambda, eps, s.cutoff) == 0) {
    throw EmptyBand("no classes with |l2/l1 - " + std::to_string(lambda) + "| <= " + std::to_string(eps));
  }
  // A band narrower than the spread of ratios near the cutoff samples the
  // density of ratios, which grows like e^{delta(lambda) T}/sqrt(T).  A wider
  // band holds a fixed share of all classes and follows the class law.
  const bool narrow = eps < ratioSpread(s, 0.8 * s.cutoff);
  if (narrow) {
    opts.model = Correction::Power;
    opts.logPower = kNarrowBandPower;
  } else {
    opts = classFrame(opts);
  }
  return tagged(
      fitGrowth([&](double t) { return static_cast<double>(countBand(s, lambda, eps, t)); }, s.cutoff, opts),
      narrow ? "class/narrow-band" : "class/wide-band");
}

GrowthEstimate correlation(const PairSpectrum& s, double lambda, GrowthOptions opts) {
  if (!(lambda > 0)) throw OutOfRange("correlation needs lambda > 0");
  opts.model = Correction::Power;
  opts.logPower = kBoxPower;
  opts.allowNonMonotone = true;
  const double tMax = (s.cutoff - 2.0) / (1.0 + lambda);
  if (!(tMax > 0)) throw InsufficientData("cutoff too small for a correlation box");
  bool any = false;
  for (double T : linspace(opts.windowStart * tMax, tMax, std::max(opts.samples, 2))) {
    if (countBox(s, lambda, T) > 0) {
      any = true;
      break;
    }
  }
  if (!any) throw EmptyBand("no correlated classes at slope " + std::to_string(lambda));
  return tagged(fitGrowth([&](double t) { return static_cast<double>(countBox(s, lambda, t)); }, tMax, opts),
                "class");
}

std::vector<double> lambdaGrid(const DilationBounds& d, int n, double pad) {
  const double w = d.dilPlus - d.dilMinus;
  if (n < 2) return {0.5 * (d.dilMinus + d.dilPlus)};
  return linspace(d.dilMinus + pad * w, d.dilPlus - pad * w, n);
}

}  // namespace manhattan
