#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/core.hpp"

namespace qwalk::cli {

enum ExitStatus : int {
  kOk = 0,
  kUnexpected = 1,
  kValidation = 2,
  kResource = 3,
  kConsistency = 4,
};

struct RunConfig {
  std::string command;  // simulate | scan | rank-test | certificate | search | decide
  std::string coin = "fourier:2";
  int steps = 200;
  int grid = 32;
  double tol = 1e-8;
  double rank_tol = 1e-10;
  int radius = 2;
  std::optional<std::vector<int>> site;
  /// simulate only: delta | random | grover-stationary | <state file>
  std::string init = "delta";
  /// search only; when absent every distinct eigenvalue of U^(0) is tried.
  std::optional<Complex> lambda;
  std::string out;
  std::uint64_t seed = 0;
  bool json = false;
};

/// Resolves fourier:<d>, grover2d, hadamard, or a coin file path.
CoinMatrix resolve_coin(const std::string& source);

/// Runs one command. The artifact goes to config.out, or to `out` when no
/// path is given (the summary then goes to `err`).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qwalk::cli
