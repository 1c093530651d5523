#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kmt/asymptotics.hpp"
#include "kmt/model.hpp"

namespace kmt {

struct VerifyTolerances {
  double theta_abs = 1e-3;
  double alpha_abs = 0.15;
  double alpha_abs_case3 = 0.2;
  double c_rel = 0.05;
};

struct RunOptions {
  double eps_eq = kDefaultEpsEq;
  int truncation = 400;
  bool verify = false;
  bool assume_stable = false;
  bool resultant_check = false;
  bool keep_sequence = false;  ///< retain the oracle boundary sequence for CSV output
  VerifyTolerances tol;
};

struct RunResult {
  nlohmann::json report;
  bool oracle_disagrees = false;
  std::optional<TailForm> tail;    ///< primary tail of the discrete walk
  std::vector<double> sequence;    ///< pi_{n,0}, n = 1..N, when kept
};

/// Full pipeline for one model; throws kmt::Error on validation or analysis
/// failures. Oracle failures during constant estimation become warnings.
RunResult run_analysis(const ModelSpec& model, const RunOptions& opts);

/// Kernel polynomials and branch data as JSON, for any family.
nlohmann::json kernel_dump(const ModelSpec& model);

std::string render_json(const nlohmann::json& report);
std::string render_text(const nlohmann::json& report);

/// n, pi_n0, predicted, ratio. Throws NoOracle on an empty sequence.
std::string plot_csv(const std::vector<double>& sequence, const TailForm& tail);

/// Write through a temporary file in the same directory and rename.
void write_atomic(const std::string& path, const std::string& content);

/// JSON number, or null when not finite.
nlohmann::json num(double v);

}  // namespace kmt
