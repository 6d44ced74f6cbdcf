#pragma once

#include <Eigen/SparseCholesky>

#include "spectralign/operators.hpp"

namespace spectralign {

/// Truncated lower spectrum of a pencil (W, M). Eigenvectors span the full
/// vertex set and are exactly zero on Dirichlet vertices; they are
/// M-orthonormal with the sign fixed so the largest-magnitude entry is
/// positive.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // n x k
  Metric metric = Metric::regular;

  int k() const { return static_cast<int>(eigenvalues.size()); }
};

struct EigOptions {
  double tol = 1e-8;       // relative residual target
  std::uint64_t seed = 0;  // start-vector seed
  int max_ops = 0;         // cap on operator applications, 0 = 300*k
  int dense_cutoff = -1;   // free-size at or below which the dense path runs;
                           // -1 = max(350, 2k+30)
};

/// Smallest eigenpairs of (W + M diag(q)) x = lambda M x with homogeneous
/// Dirichlet rows/columns deleted. Built once per stiffness pattern; solve()
/// may be called repeatedly with different potentials (the sparsity and the
/// symbolic factorization are reused).
///
/// Small systems go through a dense solve; larger ones run shift-invert
/// Lanczos with full reorthogonalization and thick restarts at Krylov
/// dimension 2k+10, shifted by sigma = -1e-6 * trace(M^-1 H).
class PencilEigenSolver {
 public:
  PencilEigenSolver(const SpMat& stiffness, Eigen::VectorXd mass, VertexSet dirichlet);

  // q: full-length nonnegative potential values, or empty for the plain pencil
  Spectrum solve(int k, const Eigen::VectorXd& q, const EigOptions& opts = {});

  int n_free() const { return static_cast<int>(free_.size()); }

 private:
  Spectrum solve_dense(int k, const Eigen::VectorXd& h_values) const;
  Spectrum solve_lanczos(int k, const Eigen::VectorXd& h_values, const EigOptions& opts);
  Spectrum embed(const Eigen::VectorXd& lambdas, const Eigen::MatrixXd& vectors_free) const;

  void apply_h(const Eigen::VectorXd& h_values, const Eigen::VectorXd& x,
               Eigen::VectorXd& y) const;
  double factorize_shifted(const Eigen::VectorXd& h_values);
  double diag_scale(const Eigen::VectorXd& h_values) const;
  bool pairs_verified(const Eigen::VectorXd& h_values, const Eigen::VectorXd& lambdas,
                      const Eigen::MatrixXd& u, double tol) const;
  bool count_complete(const Eigen::VectorXd& h_values, const Eigen::VectorXd& lambdas);
  bool warm_sweep(int k, const Eigen::VectorXd& h_values, double sigma, Eigen::VectorXd& lambdas,
                  Eigen::MatrixXd& u) const;

  // true count of pencil eigenvalues below tau (Sylvester inertia)
  int eigenvalues_below(const Eigen::VectorXd& h_values, double tau);

  int n_ = 0;
  std::vector<int> free_;
  Eigen::VectorXd mass_full_;
  Eigen::VectorXd mass_free_;
  SpMat w_free_;                // restricted stiffness, compressed, with full diagonal
  std::vector<int> diag_pos_;   // value index of each diagonal entry in w_free_
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::SimplicialLDLT<SpMat> ldlt_inertia_;
  Eigen::MatrixXd warm_basis_;  // eigenvectors of the previous solve (free rows)
  bool pattern_analyzed_ = false;
  bool inertia_pattern_analyzed_ = false;
};

Spectrum smallest_eigenpairs(const OperatorPair& ops, int k, const VertexSet& dirichlet,
                             const EigOptions& opts = {});

// ||W phi - lambda M phi|| / max(||W phi||, |lambda| ||M phi||) per pair,
// rows restricted to free vertices. The denominator is floored at
// 1e-6 * max_diag(W) * ||phi|| so exact kernel modes (both sides ~0) report
// a small residual instead of 0/0 noise.
Eigen::VectorXd spectrum_residuals(const Spectrum& spec, const OperatorPair& ops,
                                   const VertexSet& dirichlet);

}  // namespace spectralign
