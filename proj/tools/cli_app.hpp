#pragma once

// btq_lab command-line driver.

#include "btq/quantization.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace btq::cli {

struct ExperimentConfig {
  std::string command;
  std::vector<int> ks;
  std::string quantizer = "standard";
  std::string f = "z";
  std::string g = "P2";
  std::string rho;
  std::string v;
  std::optional<double> t;
  std::uint64_t seed = 0;
  std::string out = ".";
  int trials = 1000;
  std::string multipliers;
  std::map<std::string, double> tol;

  double tolerance(const std::string& name, double fallback) const;
};

/// Parsed quantizer tag: standard | heat:<t> | metaplectic | markov:<rho> | twist:<v>.
struct QuantizerSpec {
  std::string kind;
  double t = 0.0;
  std::string rho;
  std::string v;
};

QuantizerSpec parse_quantizer(const ExperimentConfig& cfg);
QuantizationFamily make_family(const QuantizerSpec& spec, int symbol_band = 8);

/// Runs a full invocation; args excludes the program name. Returns the exit code
/// (0 all checks pass, 1 a check failed, 2 usage error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace btq::cli
