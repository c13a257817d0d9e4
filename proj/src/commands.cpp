#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "manhattan/cli.hpp"
#include "manhattan/error.hpp"

namespace manhattan {

using nlohmann::ordered_json;

namespace {

bool sameSpec(const RunConfig& c) {
  if (c.mode == PresentationMode::GenusTwoSurface) {
    return c.rep1.fn.lengths == c.rep2.fn.lengths && c.rep1.fn.twists == c.rep2.fn.twists;
  }
  return c.rep1.traces.trA == c.rep2.traces.trA && c.rep1.traces.trB == c.rep2.traces.trB &&
         c.rep1.traces.trAB == c.rep2.traces.trAB;
}

template <class F>
std::optional<GrowthEstimate> tryFit(F&& f) {
  try {
    return f();
  } catch (const InsufficientData&) {
  } catch (const EmptyBand&) {
  }
  return std::nullopt;
}

}  // namespace

PairSpectrum configSpectrum(const RunConfig& c) {
  const PairSpectrum s =
      classSpectrum(buildRepresentation(c, c.rep1), buildRepresentation(c, c.rep2), c.T, c.spectrum());
  return c.primitiveOnly ? primitiveSpectrum(s) : s;
}

DeltaResult deltaAnalysis(const RunConfig& c, const PairSpectrum& s) {
  DeltaResult r;
  const GrowthOptions g = c.growth();
  r.entries = s.entries.size();
  r.classFrame = deltaClass(s, g);
  r.lorentz = deltaLorentz(s, g);
  r.single = singleExponent(s, g);
  r.dil = dilationBounds(s);
  const double tol = c.tol(r.classFrame.stdErr);
  r.checks.push_back(makeCheck("delta <= 1/2", 0.5 + tol - r.classFrame.exponent));
  r.checks.push_back(makeCheck("lorentz delta <= 1", 1.0 + c.tol(r.lorentz.stdErr) - r.lorentz.exponent));
  r.checks.push_back(makeCheck("delta >= 1/(1 + dil+)",
                               r.classFrame.exponent + tol - 1.0 / (1.0 + r.dil.dilPlus)));
  if (c.orbitRadius > 0) {
    const OrbitBall b = orbitBall(s.rep1, s.rep2, c.orbitRadius, 1.0, 1.0);
    r.orbitFrame = deltaOrbit(b, g);
    r.checks.push_back(makeCheck("orbit and class frames agree within summed stderr",
                                 r.orbitFrame->stdErr + r.classFrame.stdErr -
                                     std::fabs(r.orbitFrame->exponent - r.classFrame.exponent)));
  }
  return r;
}

CurveResult curveAnalysis(const RunConfig& c, const PairSpectrum& s) {
  CurveResult r;
  const GrowthOptions g = c.growth();
  r.delta = deltaClass(s, g);
  r.curve = curveSample(s, chebyshevThetas(c.thetaCount), g);
  r.defects = convexityDefects(r.curve);
  r.diagonal = diagonalPoint(r.curve);
  for (const CurveSample& p : r.curve.samples) r.chordDeviation = std::max(r.chordDeviation, std::fabs(p.x + p.y - 1));
  r.slopes = slopeReport(r.curve, s);
  const double tol = c.tol(r.delta.stdErr);
  const double d = r.delta.exponent;

  const CurveSample& xEnd = r.curve.samples.front();
  const CurveSample& yEnd = r.curve.samples.back();
  r.checks.push_back(makeCheck("curve passes within 0.05 of (1,0)", 0.05 - std::hypot(xEnd.x - 1, xEnd.y)));
  r.checks.push_back(makeCheck("curve passes within 0.05 of (0,1)", 0.05 - std::hypot(yEnd.x, yEnd.y - 1)));
  double worstDefect = 1e300;
  for (std::size_t i = 0; i < r.defects.size(); ++i) {
    worstDefect = std::min(worstDefect, 3.0 * r.curve.samples[i + 1].stdErr - r.defects[i]);
  }
  r.checks.push_back(makeCheck("convexity defect <= 3 stderr", worstDefect));
  r.checks.push_back(makeCheck("diagonal point within 0.03 of (delta, delta)", 0.03 - std::fabs(r.diagonal - d)));
  if (sameSpec(c)) {
    r.checks.push_back(makeCheck("identical pair: samples within 0.05 of x + y = 1", 0.05 - r.chordDeviation));
  }

  const double lamD = r.slopes.maximalSlope;
  const double lam1 = r.slopes.stretch;
  r.checks.push_back(makeCheck("lambda(delta) >= delta/(1-delta)", lamD - (d / (1 - d) - tol)));
  r.checks.push_back(makeCheck("lambda(delta) <= (1-delta)/delta", (1 - d) / d + tol - lamD));
  r.checks.push_back(makeCheck("delta >= 1/(1 + lambda(1))", d + tol - 1.0 / (1.0 + lam1)));
  r.checks.push_back(makeCheck("lambda(1) within 10% of the mean-ratio stretch",
                               0.10 - std::fabs(lam1 - r.slopes.stretchIndependent) / r.slopes.stretchIndependent));

  std::size_t evaluated = 0, correlated = 0;
  double worstBound = 1e300, worstCorr = 1e300, worstGap = 1e300;
  std::size_t tangent = 0;
  const std::vector<double> grid = lambdaGrid(r.slopes.dil, c.lambdaCount);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    BandPoint b;
    b.lambda = grid[i];
    b.bound = 1e300;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < r.curve.samples.size(); ++k) {
      const auto& p = r.curve.samples[k];
      const double v = (p.x + b.lambda * p.y) / (1 + b.lambda);
      if (v < b.bound) {
        b.bound = v;
        arg = k;
      }
    }
    b.slope = tryFit([&] { return deltaSlope(s, b.lambda, c.bandEps, g); });
    if (b.slope) {
      ++evaluated;
      const double t = c.tol(b.slope->stdErr);
      worstBound = std::min(worstBound, b.bound + t - b.slope->exponent);
      // Gap to the bound where the sample attaining it is interior.
      if (arg > 0 && arg + 1 < r.curve.samples.size()) {
        ++tangent;
        worstGap = std::min(worstGap, 2 * t - (b.bound - b.slope->exponent));
      }
    }
    if (i > 0 && i + 1 < grid.size()) {
      GrowthOptions gc = g;
      gc.minFinalCount = 30;
      b.correlation = tryFit([&] { return correlation(s, b.lambda, gc); });
      if (b.correlation && b.slope) {
        ++correlated;
        worstCorr = std::min(worstCorr, 0.15 - std::fabs(b.correlation->exponent -
                                                         (1 + b.lambda) * b.slope->exponent));
      }
    }
    r.bands.push_back(b);
  }
  r.checks.push_back(makeCheck("directional exponent evaluated at >= 9 slopes",
                               static_cast<double>(evaluated) - 9.0, std::to_string(evaluated) + " slopes"));
  r.checks.push_back(makeCheck("delta(lambda) <= (x + lambda y)/(1 + lambda) + tol",
                               evaluated ? worstBound : -1.0));
  r.checks.push_back(makeCheck("gap to the bound <= 2 tol at tangency", tangent ? worstGap : -1.0,
                               std::to_string(tangent) + " slopes"));
  r.checks.push_back(makeCheck("|m(lambda) - (1 + lambda) delta(lambda)| <= 0.15",
                               correlated ? worstCorr : -1.0, std::to_string(correlated) + " slopes"));
  return r;
}

const std::vector<std::string>& experimentNames() {
  static const std::vector<std::string> names{"dehn-twist", "fn-path", "pseudo-anosov",
                                              "shrink", "isolation-continuity", "ads-verify"};
  return names;
}

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ordered_json toJson(const GrowthEstimate& g) {
  return {{"estimate", g.exponent},
          {"stderr", g.stdErr},
          {"window", {g.tMin, g.tMax}},
          {"samples", g.sampleCount},
          {"frame", g.frame},
          {"uncorrected", g.uncorrected},
          {"corrected", g.corrected},
          {"model", g.model == Correction::LogIntegral ? "log-integral" : "power"},
          {"correction_power", g.correctionPower},
          {"correction_applied", g.correctionApplied},
          {"final_count", g.finalCount},
          {"non_monotone_slope", g.nonMonotoneSlope}};
}

ordered_json toJson(const std::optional<GrowthEstimate>& g) { return g ? toJson(*g) : ordered_json(nullptr); }

ordered_json toJson(const std::vector<Check>& checks) {
  ordered_json a = ordered_json::array();
  for (const Check& k : checks) {
    a.push_back({{"name", k.name}, {"pass", k.pass}, {"margin", k.margin}, {"detail", k.detail}});
  }
  return a;
}

bool allPass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& k) { return k.pass; });
}

ordered_json report(const std::string& command, const RunConfig& c, const std::vector<Check>& checks) {
  return {{"command", command},
          {"config_hash", configHash(c)},
          {"config", configEcho(c)},
          {"tolerance", {{"floor", c.tol.floor}, {"factor", c.tol.factor}}},
          {"pass", allPass(checks)},
          {"checks", toJson(checks)}};
}

// Collects artifacts and writes them in one pass once the run is complete.
class Artifacts {
 public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}
  void add(std::string name, std::string body) { files_.emplace_back(std::move(name), std::move(body)); }
  void json(std::string name, const ordered_json& j) { add(std::move(name), j.dump(2) + "\n"); }
  void write() const {
    std::filesystem::create_directories(dir_);
    for (const auto& [name, body] : files_) {
      const std::string path = (std::filesystem::path(dir_) / name).string();
      std::ofstream out(path, std::ios::binary);
      out << body;
      if (!out) throw ConfigError("cannot write " + path);
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

int finish(const Artifacts& a, const std::vector<Check>& checks) {
  a.write();
  for (const Check& k : checks) {
    std::printf("%s  %-60s margin %.4g\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), k.margin);
  }
  return allPass(checks) ? 0 : 2;
}

std::string sequenceCsv(const std::vector<SequencePoint>& pts) {
  std::string out = "n,T,entries,delta,stderr,window_lo,window_hi,thurston_lower_bound\n";
  for (const auto& p : pts) {
    out += std::to_string(p.n) + "," + fixed(p.T, 3) + "," + std::to_string(p.entries) + "," +
           fixed(p.delta.exponent, 6) + "," + fixed(p.delta.stdErr, 6) + "," + fixed(p.delta.tMin, 3) + "," +
           fixed(p.delta.tMax, 3) + "," + fixed(p.thurstonLowerBound, 6) + "\n";
  }
  return out;
}

ordered_json sequenceJson(const std::vector<SequencePoint>& pts) {
  ordered_json a = ordered_json::array();
  for (const auto& p : pts) {
    a.push_back({{"n", p.n}, {"T", p.T}, {"entries", p.entries}, {"delta", toJson(p.delta)},
                 {"thurston_lower_bound", p.thurstonLowerBound}});
  }
  return a;
}

std::string twistCsv(const std::vector<TwistPoint>& pts) {
  std::string out = "t,entries,delta,stderr,thurston_lower_bound\n";
  for (const auto& p : pts) {
    out += fixed(p.t, 6) + "," + std::to_string(p.entries) + "," + fixed(p.delta.exponent, 6) + "," +
           fixed(p.delta.stdErr, 6) + "," + fixed(p.thurstonLowerBound, 6) + "\n";
  }
  return out;
}

ordered_json twistJson(const std::vector<TwistPoint>& pts) {
  ordered_json a = ordered_json::array();
  for (const auto& p : pts) {
    a.push_back({{"t", p.t}, {"entries", p.entries}, {"delta", toJson(p.delta)},
                 {"thurston_lower_bound", p.thurstonLowerBound}});
  }
  return a;
}

}  // namespace

int cmdSpectrum(const RunConfig& c) {
  const PairSpectrum s = configSpectrum(c);
  Artifacts a(c.out);
  a.add("spectrum.mspec", serializeSpectrum(s));
  ordered_json j = report("spectrum", c, {});
  j["entries"] = s.entries.size();
  j["cutoff"] = s.cutoff;
  j["completeness_bound"] = s.completenessBound;
  j["tube_slack"] = s.tubeSlack;
  j["length_per_letter"] = s.cMin;
  j["witness_merges"] = s.witnessMerges;
  j["fingerprint_collisions"] = s.fingerprintCollisions;
  a.json("spectrum.json", j);
  std::printf("%zu classes with l1 + l2 <= %s\n", s.entries.size(), fixed(c.T, 3).c_str());
  return finish(a, {});
}

int cmdDelta(const RunConfig& c) {
  const PairSpectrum s = configSpectrum(c);
  const DeltaResult r = deltaAnalysis(c, s);
  Artifacts a(c.out);
  ordered_json j = report("delta", c, r.checks);
  j["entries"] = r.entries;
  j["estimate"] = r.classFrame.exponent;
  j["stderr"] = r.classFrame.stdErr;
  j["window"] = {r.classFrame.tMin, r.classFrame.tMax};
  j["frame"] = r.classFrame.frame;
  j["class_frame"] = toJson(r.classFrame);
  j["orbit_frame"] = toJson(r.orbitFrame);
  j["lorentz"] = toJson(r.lorentz);
  j["single_surface"] = toJson(r.single);
  j["dilation"] = {{"min", r.dil.dilMinus}, {"max", r.dil.dilPlus}, {"thurston_lower_bound", r.dil.thurstonLowerBound}};
  a.json("delta.json", j);
  std::string csv = "quantity,frame,estimate,stderr,window_lo,window_hi\n";
  const auto row = [&](const char* name, const GrowthEstimate& g) {
    csv += std::string(name) + "," + g.frame + "," + fixed(g.exponent, 6) + "," + fixed(g.stdErr, 6) + "," +
           fixed(g.tMin, 3) + "," + fixed(g.tMax, 3) + "\n";
  };
  row("delta", r.classFrame);
  if (r.orbitFrame) row("delta", *r.orbitFrame);
  row("lorentz", r.lorentz);
  row("single", r.single);
  a.add("delta.csv", csv);
  std::printf("delta %s +- %s (%s frame)\n", fixed(r.classFrame.exponent).c_str(),
              fixed(r.classFrame.stdErr).c_str(), r.classFrame.frame.c_str());
  return finish(a, r.checks);
}

int cmdCurve(const RunConfig& c) {
  const PairSpectrum s = configSpectrum(c);
  const CurveResult r = curveAnalysis(c, s);
  Artifacts a(c.out);
  ordered_json j = report("curve", c, r.checks);
  j["estimate"] = r.delta.exponent;
  j["stderr"] = r.delta.stdErr;
  j["window"] = {r.delta.tMin, r.delta.tMax};
  j["frame"] = r.delta.frame;
  j["diagonal"] = r.diagonal;
  j["chord_deviation"] = r.chordDeviation;
  j["lambda_delta"] = r.slopes.maximalSlope;
  j["lambda_one"] = r.slopes.stretch;
  j["stretch_mean_ratio"] = r.slopes.stretchIndependent;
  ordered_json samples = ordered_json::array();
  for (const auto& p : r.curve.samples) {
    samples.push_back({{"theta", p.theta}, {"x", p.x}, {"y", p.y}, {"r", p.r}, {"stderr", p.stdErr},
                       {"window", {p.fit.tMin, p.fit.tMax}}});
  }
  j["samples"] = samples;
  ordered_json bands = ordered_json::array();
  for (const auto& b : r.bands) {
    bands.push_back({{"lambda", b.lambda}, {"bound", b.bound}, {"directional", toJson(b.slope)},
                     {"correlation", toJson(b.correlation)}});
  }
  j["slopes"] = bands;
  a.json("curve.json", j);
  std::string csv = "theta,x,y,r,stderr\n";
  for (const auto& p : r.curve.samples) {
    csv += fixed(p.theta, 6) + "," + fixed(p.x, 6) + "," + fixed(p.y, 6) + "," + fixed(p.r, 6) + "," +
           fixed(p.stdErr, 6) + "\n";
  }
  a.add("curve.csv", csv);
  std::string bcsv = "lambda,bound,directional,directional_stderr,correlation,correlation_stderr\n";
  for (const auto& b : r.bands) {
    bcsv += fixed(b.lambda, 6) + "," + fixed(b.bound, 6) + "," + (b.slope ? fixed(b.slope->exponent, 6) : "") + "," +
            (b.slope ? fixed(b.slope->stdErr, 6) : "") + "," +
            (b.correlation ? fixed(b.correlation->exponent, 6) : "") + "," +
            (b.correlation ? fixed(b.correlation->stdErr, 6) : "") + "\n";
  }
  a.add("slopes.csv", bcsv);
  a.add("curve.svg", curveSvg(r.curve, r.delta.exponent, -1.0 / r.slopes.maximalSlope));
  return finish(a, r.checks);
}

int cmdExperiment(const std::string& name, const RunConfig& c) {
  Artifacts a(c.out);
  std::vector<Check> checks;
  ordered_json j;
  if (name == "dehn-twist") {
    const DehnTwistResult r = dehnTwistExperiment(c);
    checks = r.checks;
    j = report("experiment dehn-twist", c, checks);
    j["frame"] = "class";
    j["points"] = sequenceJson(r.points);
    j["exact"] = {{"classes", r.exactClasses}, {"powers", c.exactPowers},
                  {"worst_decrease", r.exactWorstDecrease}, {"worst_class", r.exactWorstClass}};
    a.add("dehn-twist.csv", sequenceCsv(r.points));
  } else if (name == "pseudo-anosov") {
    const PseudoAnosovResult r = pseudoAnosovExperiment(c);
    checks = r.checks;
    j = report("experiment pseudo-anosov", c, checks);
    j["frame"] = "class";
    ordered_json images = ordered_json::array();
    const Presentation p = Presentation::of(c.mode);
    for (const Word& w : r.map.images) images.push_back(p.str(w));
    j["map"] = images;
    j["dilatation"] = r.dilatation;
    j["points"] = sequenceJson(r.points);
    a.add("pseudo-anosov.csv", sequenceCsv(r.points));
  } else if (name == "shrink") {
    const ShrinkResult r = shrinkExperiment(c);
    checks = r.checks;
    j = report("experiment shrink", c, checks);
    j["frame"] = "class";
    j["shift_per_crossing"] = r.shiftPerCrossing;
    ordered_json pts = ordered_json::array();
    std::string csv = "n,length,entries,delta,stderr,disjoint,disjoint_delta,disjoint_stderr\n";
    for (const auto& p : r.points) {
      pts.push_back({{"n", p.n}, {"length", p.length}, {"entries", p.entries}, {"delta", toJson(p.delta)},
                     {"disjoint", p.disjoint}, {"disjoint_delta", toJson(p.disjointDelta)},
                     {"disjoint_shift_max", p.disjointShiftMax}, {"crossing_shift_min", p.crossingShiftMin}});
      csv += std::to_string(p.n) + "," + fixed(p.length, 6) + "," + std::to_string(p.entries) + "," +
             fixed(p.delta.exponent, 6) + "," + fixed(p.delta.stdErr, 6) + "," + std::to_string(p.disjoint) + "," +
             (p.disjointDelta ? fixed(p.disjointDelta->exponent, 6) : "") + "," +
             (p.disjointDelta ? fixed(p.disjointDelta->stdErr, 6) : "") + "\n";
    }
    j["points"] = pts;
    a.add("shrink.csv", csv);
  } else if (name == "isolation-continuity") {
    const IsolationResult r = isolationExperiment(c);
    checks = r.checks;
    j = report("experiment isolation-continuity", c, checks);
    j["frame"] = "class";
    j["fitted_c"] = r.fittedC;
    j["points"] = twistJson(r.points);
    a.add("isolation-continuity.csv", twistCsv(r.points));
  } else if (name == "fn-path") {
    const FnPathResult r = fnPathExperiment(c);
    j = report("experiment fn-path", c, checks);
    j["frame"] = "class";
    j["period"] = r.period;
    j["amplitude"] = r.amplitude;
    j["drift"] = r.drift;
    ordered_json mod = ordered_json::array();
    for (const auto& [step, v] : r.modulus) mod.push_back({{"step", step}, {"max_change", v}});
    j["modulus"] = mod;
    j["points"] = twistJson(r.points);
    a.add("fn-path.csv", twistCsv(r.points));
    std::printf("amplitude %s over %zu points\n", fixed(r.amplitude).c_str(), r.points.size());
  } else if (name == "ads-verify") {
    const AdsVerifyResult r = adsVerifyExperiment(c);
    checks = r.checks;
    j = report("experiment ads-verify", c, checks);
    j["pairs"] = r.battery.pairs;
    j["max_deviation"] = r.battery.maxDeviation;
  } else {
    std::string known;
    for (const auto& n : experimentNames()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + name + "' (known: " + known + ")");
  }
  a.json(name + ".json", j);
  return finish(a, checks);
}

std::string curveSvg(const CurveEstimate& curve, double delta, double tangentSlope) {
  constexpr double size = 400, pad = 40, span = 1.2;
  const auto px = [&](double x) { return fixed(pad + x / span * (size - 2 * pad), 2); };
  const auto py = [&](double y) { return fixed(size - pad - y / span * (size - 2 * pad), 2); };
  const auto line = [&](double x1, double y1, double x2, double y2, const char* style) {
    return "  <line x1=\"" + px(x1) + "\" y1=\"" + py(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" + py(y2) + "\" " +
           style + "/>\n";
  };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
  s += "  <rect width=\"400\" height=\"400\" fill=\"white\"/>\n";
  s += line(0, 0, span, 0, "stroke=\"black\"");
  s += line(0, 0, 0, span, "stroke=\"black\"");
  for (double t : {0.5, 1.0}) {
    s += line(t, 0, t, -0.02, "stroke=\"black\"");
    s += line(0, t, -0.02, t, "stroke=\"black\"");
    s += "  <text x=\"" + px(t) + "\" y=\"" + py(-0.06) + "\" font-size=\"11\" text-anchor=\"middle\">" + fixed(t, 1) +
         "</text>\n";
    s += "  <text x=\"" + px(-0.05) + "\" y=\"" + py(t) + "\" font-size=\"11\" text-anchor=\"end\">" + fixed(t, 1) +
         "</text>\n";
  }
  s += line(1, 0, 0, 1, "stroke=\"gray\" stroke-dasharray=\"4 3\"");
  s += line(0, 0, span, span, "stroke=\"lightgray\"");
  if (std::isfinite(tangentSlope)) {
    const double h = 0.35;
    const double dx = h / std::sqrt(1 + tangentSlope * tangentSlope);
    s += line(delta - dx, delta - dx * tangentSlope, delta + dx, delta + dx * tangentSlope,
              "stroke=\"steelblue\" stroke-dasharray=\"2 2\"");
  }
  s += "  <polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    s += (i ? " " : "") + px(curve.samples[i].x) + "," + py(curve.samples[i].y);
  }
  s += "\"/>\n";
  s += "  <circle cx=\"" + px(delta) + "\" cy=\"" + py(delta) + "\" r=\"3\" fill=\"steelblue\"/>\n";
  s += "  <text x=\"" + px(span) + "\" y=\"" + py(-0.06) + "\" font-size=\"12\" text-anchor=\"end\">x</text>\n";
  s += "  <text x=\"" + px(-0.05) + "\" y=\"" + py(span) + "\" font-size=\"12\" text-anchor=\"end\">y</text>\n";
  s += "  <text x=\"" + px(0.6) + "\" y=\"" + py(1.12) + "\" font-size=\"12\">delta = " + fixed(delta) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace manhattan
