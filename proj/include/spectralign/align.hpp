#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spectralign/hamiltonian.hpp"

namespace spectralign {

/// Full-shape operators under both metrics plus the partial shape's target
/// spectra. One raw potential drives both Hamiltonians.
struct AlignmentProblem {
  OperatorPair regular;
  OperatorPair scale_invariant;
  Eigen::VectorXd target_regular;  // mu, ascending positive
  Eigen::VectorXd target_si;       // mu~, empty when the si term is off
  Reparam reparam = Reparam::saturation;
  double c = 0.0;  // explicit step height; 0 derives c_factor * max target
  double c_factor = 50.0;
  double weight_regular = 1.0;
  double weight_si = 1.0;
  VertexSet dirichlet;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(regular.mass.size()); }
  bool si_active() const { return weight_si > 0.0 && target_si.size() > 0; }
  bool regular_active() const { return weight_regular > 0.0 && target_regular.size() > 0; }
  double step_height() const;
  void validate() const;
};

// sum_i (a_i - b_i)^2 / b_i^2
double weighted_sq_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct CostGrad {
  double cost = 0.0;
  Eigen::VectorXd grad;
};

/// Caches the factorization patterns and warm bases across repeated cost
/// evaluations. One instance per worker thread.
class AlignmentEvaluator {
 public:
  explicit AlignmentEvaluator(const AlignmentProblem& problem);
  CostGrad eval(const Eigen::VectorXd& v_raw);

 private:
  const AlignmentProblem* problem_;
  double c_ = 0.0;
  std::optional<PencilEigenSolver> regular_solver_;
  std::optional<PencilEigenSolver> si_solver_;
};

CostGrad cost_and_grad(const AlignmentProblem& problem, const Eigen::VectorXd& v_raw);

struct MinimizeOptions {
  int max_iter = 150;            // accepted steps
  double grad_tol_factor = 1e-6;  // stop at ||grad||_inf <= factor * f(start)
  double initial_radius = 0.0;    // 0 = 0.05 * sqrt(n)
};

struct LocalizationResult {
  Eigen::VectorXd v_opt;
  VertexSet predicted;
  double final_cost = std::numeric_limits<double>::infinity();
  std::vector<double> cost_trace;  // start value, then each accepted step
  int init_id = -1;
  int iterations = 0;  // accepted steps
  double wall_ms = 0.0;
  bool stalled = false;
  std::string error;  // set when the start aborted
};

// Trust-region descent with a diagonal secant curvature model.
LocalizationResult minimize(const AlignmentProblem& problem, const Eigen::VectorXd& v_init,
                            const MinimizeOptions& opts = {});

// 2 * n_samples raw potentials: an inverted geodesic Gaussian well around
// each farthest-point sample, at widths sqrt(area) and sqrt(2 * area).
std::vector<Eigen::VectorXd> make_initializations(const TriMesh& full, double area, int n_samples,
                                                  std::uint64_t seed, Reparam reparam, double c);

// {j : q(v_j) < tau}; tau = c/2 for saturation, interquartile-clamped median
// of q for square.
VertexSet predict_region(const Eigen::VectorXd& v_raw, Reparam reparam, double c);

struct LocalizeOutput {
  int best_index = -1;
  std::vector<LocalizationResult> results;

  const LocalizationResult& best() const { return results.at(best_index); }
};

// Runs minimize once per initialization (parallel across starts), keeps every
// result, and selects the lowest final cost (ties to the lowest id).
LocalizeOutput localize(const AlignmentProblem& problem,
                        const std::vector<Eigen::VectorXd>& inits, int parallelism,
                        const MinimizeOptions& opts = {});

}  // namespace spectralign
