#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "calib/calibration.hpp"
#include "calib/loss.hpp"

namespace calib {

struct SyntheticProblem {
  int X_size = 1;
  int K = 2;
  std::vector<Vec> conditional;  // X_size rows on the K-simplex
  Vec marginal;                  // distribution over the feature points
  std::uint64_t seed = 0;

  void validate() const;
  std::string to_json() const;
  static SyntheticProblem from_json(const std::string& text);
};

struct ExperimentResult {
  std::string name;
  std::map<std::string, std::string> tables;  // name -> CSV blob
  bool pass = false;
  std::vector<std::pair<std::string, double>> details;
  std::string to_json() const;

  double detail(const std::string& key) const;
};

// Closed forms against the numeric binary values for every calibrated
// transformation-function row, plus the shared-curve identities and the
// not-calibrated flags.
ExperimentResult reproduce_table2(const std::vector<double>& eps_grid,
                                  const OptimizerSettings& settings = {});

// The kink transformation inside the sum-to-zero loss: risk minimizers tie
// the top classes, so worst-case selection misclassifies and the pointwise
// calibration value collapses to zero.
ExperimentResult kink_counterexample(const OptimizerSettings& settings = {});

// Coupled softmax form on R^K against the decoupled negative-log form on
// the simplex: constrained minima agree and coupled minimizers normalize
// to a zero coupling term.
ExperimentResult logistic_equivalence(int K, int resolution,
                                      const OptimizerSettings& settings = {});

struct ErmConfig {
  std::vector<long> n_grid{10000};
  int trials = 100;
  double slack = 2e-2;  // grid slack added to the converted bound
};

// Tabular ERM on a finite feature space: exact per-trial surrogate and
// true excess risks, with the conversion inequality audited against the
// supplied calibration curve (curve == nullptr skips the audit).
ExperimentResult simulate_erm(const SyntheticProblem& problem, const Loss& loss,
                              const CalibrationCurve* curve,
                              const ErmConfig& config,
                              const OptimizerSettings& settings = {});

}  // namespace calib
