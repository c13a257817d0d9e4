#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "manhattan/cli.hpp"
#include "manhattan/error.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<double> T;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void addCommon(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "config file (key = value with [section] headers)");
  cmd->add_option("--T", o.T, "cutoff on l1 + l2")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
}

manhattan::RunConfig resolve(const Overrides& o) {
  manhattan::RunConfig c = o.config.empty() ? manhattan::RunConfig{} : manhattan::loadConfig(o.config);
  if (o.T) c.T = *o.T;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  c.workers = manhattan::workersFromEnvironment(c.workers);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairs of hyperbolic surfaces: spectra, critical exponents, Manhattan curves"};
  app.require_subcommand(1);
  Overrides o;
  auto* spectrum = app.add_subcommand("spectrum", "enumerate the pair spectrum and write an MSPEC/1 file");
  auto* delta = app.add_subcommand("delta", "critical exponent in the class and orbit frames");
  auto* curve = app.add_subcommand("curve", "Manhattan curve, slopes and directional exponents");
  auto* experiment = app.add_subcommand("experiment", "run a named family experiment");
  std::string name;
  experiment->add_option("name", name, "experiment name")
      ->required()
      ->check(CLI::IsMember(manhattan::experimentNames()));
  for (auto* cmd : {spectrum, delta, curve, experiment}) addCommon(cmd, o);
  CLI11_PARSE(app, argc, argv);

  try {
    const manhattan::RunConfig c = resolve(o);
    if (spectrum->parsed()) return manhattan::cmdSpectrum(c);
    if (delta->parsed()) return manhattan::cmdDelta(c);
    if (curve->parsed()) return manhattan::cmdCurve(c);
    return manhattan::cmdExperiment(name, c);
  } catch (const manhattan::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
  }
  return 1;
}
