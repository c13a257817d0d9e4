#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "manhattan/cli.hpp"
#include "manhattan/error.hpp"

namespace manhattan {

GrowthOptions RunConfig::growth() const {
  GrowthOptions g;
  g.windowStart = windowStart;
  g.samples = samples;
  g.logCorrection = logCorrection;
  return g;
}

SpectrumOptions RunConfig::spectrum() const {
  SpectrumOptions s;
  s.tubeSlack = tubeSlack;
  s.maxGrowthRounds = maxGrowthRounds;
  s.workers = workers;
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string nums(const double* v, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

class Reader {
 public:
  Reader(std::string where, std::string value) : where_(std::move(where)), value_(std::move(value)) {}

  double real() const {
    double v = 0.0;
    const char* end = value_.data() + value_.size();
    const auto r = std::from_chars(value_.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) fail("expected a number");
    return v;
  }

  double positive() const {
    const double v = real();
    if (!(v > 0)) fail("must be positive");
    return v;
  }

  int integer(int lo) const {
    int v = 0;
    const char* end = value_.data() + value_.size();
    const auto r = std::from_chars(value_.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) fail("expected an integer");
    if (v < lo) fail("must be at least " + std::to_string(lo));
    return v;
  }

  bool boolean() const {
    if (value_ == "true" || value_ == "1") return true;
    if (value_ == "false" || value_ == "0") return false;
    fail("expected true or false");
    return false;
  }

  std::vector<double> list() const {
    std::string s = value_;
    for (char& ch : s) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(Reader(where_, tok).real());
    return out;
  }

  template <std::size_t N>
  std::array<double, N> triple() const {
    const auto v = list();
    if (v.size() != N) fail("expected " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  const std::string& text() const { return value_; }

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(where_ + " = '" + value_ + "': " + why);
  }

 private:
  std::string where_;
  std::string value_;
};

void setRep(RepSpec& r, const std::string& key, const Reader& v) {
  if (key == "lengths") {
    r.fn.lengths = v.triple<3>();
    for (double l : r.fn.lengths) {
      if (!(l > 0)) v.fail("lengths must be positive");
    }
  } else if (key == "twists") {
    r.fn.twists = v.triple<3>();
  } else if (key == "traces") {
    const auto t = v.triple<3>();
    r.traces = {t[0], t[1], t[2]};
  } else {
    throw ConfigError("unknown key '" + key + "' in a rep section");
  }
}

void set(RunConfig& c, const std::string& section, const std::string& key, const Reader& v) {
  const auto unknown = [&] { throw ConfigError("unknown key '" + key + "' in [" + section + "]"); };
  if (section == "run") {
    if (key == "mode") {
      try {
        c.mode = parsePresentationMode(v.text());
      } catch (const Error& e) {
        v.fail(e.what());
      }
    } else if (key == "T") {
      c.T = v.positive();
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const char* end = v.text().data() + v.text().size();
      const auto r = std::from_chars(v.text().data(), end, s);
      if (r.ec != std::errc() || r.ptr != end) v.fail("expected an unsigned integer");
      c.seed = s;
    } else if (key == "out") {
      if (v.text().empty()) v.fail("empty path");
      c.out = v.text();
    } else if (key == "workers") {
      c.workers = v.integer(1);
    } else {
      unknown();
    }
  } else if (section == "rep1" || section == "rep2") {
    setRep(section == "rep1" ? c.rep1 : c.rep2, key, v);
  } else if (section == "estimate") {
    if (key == "log_correction") c.logCorrection = v.boolean();
    else if (key == "primitive_only") c.primitiveOnly = v.boolean();
    else if (key == "orbit_radius") {
      c.orbitRadius = v.real();
      if (c.orbitRadius < 0) v.fail("must be non-negative");
    } else if (key == "window_start") {
      c.windowStart = v.real();
      if (!(c.windowStart > 0 && c.windowStart < 1)) v.fail("must lie in (0, 1)");
    } else if (key == "samples") c.samples = v.integer(8);
    else if (key == "theta_count") c.thetaCount = v.integer(3);
    else if (key == "lambda_count") c.lambdaCount = v.integer(2);
    else if (key == "band_eps") c.bandEps = v.positive();
    else if (key == "tol_floor") c.tol.floor = v.positive();
    else if (key == "tol_factor") c.tol.factor = v.positive();
    else unknown();
  } else if (section == "spectrum") {
    if (key == "tube_slack") c.tubeSlack = v.positive();
    else if (key == "max_growth_rounds") c.maxGrowthRounds = v.integer(0);
    else unknown();
  } else if (section == "experiment") {
    if (key == "n_max") c.nMax = v.integer(0);
    else if (key == "curve") c.curve = v.text();
    else if (key == "exact_powers") c.exactPowers = v.integer(0);
    else if (key == "cutoff_scale") c.cutoffScale = v.positive();
    else if (key == "pants_curve") c.pantsCurve = v.integer(0);
    else if (key == "detectors") c.detectors = v.list();
    else if (key == "twist_grid") {
      c.twistGrid = v.list();
      if (c.twistGrid.empty()) v.fail("empty grid");
    } else if (key == "twist_index") c.twistIndex = v.integer(0);
    else if (key == "period_steps") c.periodSteps = v.integer(1);
    else if (key == "periods") c.periods = v.integer(1);
    else if (key == "twist_amplitude") c.twistAmplitude = v.real();
    else if (key == "pairs") c.pairs = v.integer(1);
    else unknown();
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

}  // namespace

RunConfig parseConfig(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    const std::string s = trim(std::string_view(line).substr(0, hash));
    if (s.empty()) continue;
    const std::string at = "line " + std::to_string(lineNo) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(at + "unterminated section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected key = value");
    if (section.empty()) throw ConfigError(at + "key outside any section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    try {
      set(c, section, key, Reader(key, trim(std::string_view(s).substr(eq + 1))));
    } catch (const ConfigError& e) {
      const std::string prefix = e.module() + ": " + e.kind() + ": ";
      throw ConfigError(at + std::string(e.what()).substr(prefix.size()));
    }
  }
  return c;
}

RunConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str());
}

std::string configEcho(const RunConfig& c) {
  std::ostringstream o;
  const auto rep = [&](const char* name, const RepSpec& r) {
    const double tr[3] = {r.traces.trA, r.traces.trB, r.traces.trAB};
    o << "[" << name << "]\n"
      << "lengths = " << nums(r.fn.lengths.data(), 3) << "\n"
      << "twists = " << nums(r.fn.twists.data(), 3) << "\n"
      << "traces = " << nums(tr, 3) << "\n";
  };
  o << "[run]\n"
    << "mode = " << toString(c.mode) << "\n"
    << "T = " << num(c.T) << "\n"
    << "seed = " << c.seed << "\n";
  rep("rep1", c.rep1);
  rep("rep2", c.rep2);
  o << "[estimate]\n"
    << "log_correction = " << (c.logCorrection ? "true" : "false") << "\n"
    << "primitive_only = " << (c.primitiveOnly ? "true" : "false") << "\n"
    << "orbit_radius = " << num(c.orbitRadius) << "\n"
    << "window_start = " << num(c.windowStart) << "\n"
    << "samples = " << c.samples << "\n"
    << "theta_count = " << c.thetaCount << "\n"
    << "lambda_count = " << c.lambdaCount << "\n"
    << "band_eps = " << num(c.bandEps) << "\n"
    << "tol_floor = " << num(c.tol.floor) << "\n"
    << "tol_factor = " << num(c.tol.factor) << "\n"
    << "[spectrum]\n"
    << "tube_slack = " << num(c.tubeSlack) << "\n"
    << "max_growth_rounds = " << c.maxGrowthRounds << "\n"
    << "[experiment]\n"
    << "n_max = " << c.nMax << "\n"
    << "curve = " << c.curve << "\n"
    << "exact_powers = " << c.exactPowers << "\n"
    << "cutoff_scale = " << num(c.cutoffScale) << "\n"
    << "pants_curve = " << c.pantsCurve << "\n"
    << "detectors = " << nums(c.detectors.data(), c.detectors.size()) << "\n"
    << "twist_grid = " << nums(c.twistGrid.data(), c.twistGrid.size()) << "\n"
    << "twist_index = " << c.twistIndex << "\n"
    << "period_steps = " << c.periodSteps << "\n"
    << "periods = " << c.periods << "\n"
    << "twist_amplitude = " << num(c.twistAmplitude) << "\n"
    << "pairs = " << c.pairs << "\n";
  return o.str();
}

std::string configHash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : configEcho(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MarkedRepresentation buildRepresentation(const RunConfig& c, const RepSpec& r) {
  if (c.mode == PresentationMode::GenusTwoSurface) return fromFenchelNielsen(r.fn);
  return fromFreePair(r.traces.trA, r.traces.trB, r.traces.trAB);
}

int workersFromEnvironment(int fallback) {
  const char* v = std::getenv("MANHATTAN_WORKERS");
  if (v == nullptr || *v == '\0') return fallback;
  return Reader("MANHATTAN_WORKERS", v).integer(1);
}

void parallelFor(int n, int workers, const std::function<void(int)>& f) {
  const int threads = std::min(std::max(workers, 1), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  // Lowest failing index wins, so the reported error does not depend on timing.
  int firstIndex = n;
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (i < firstIndex) {
            firstIndex = i;
            first = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

Check makeCheck(std::string name, double margin, std::string detail) {
  return {std::move(name), margin >= 0.0, margin, std::move(detail)};
}

}  // namespace manhattan
