#include "spectralign/eigensolver.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "spectralign/errors.hpp"
#include "spectralign/log.hpp"

namespace spectralign {

namespace {

// uniform in [-1, 1), reproducible across platforms
double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

double mass_dot(const Eigen::VectorXd& mass, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (mass.array() * a.array() * b.array()).sum();
}

}  // namespace

PencilEigenSolver::PencilEigenSolver(const SpMat& stiffness, Eigen::VectorXd mass,
                                     VertexSet dirichlet)
    : n_(static_cast<int>(stiffness.rows())), mass_full_(std::move(mass)) {
  if (stiffness.rows() != stiffness.cols()) throw std::invalid_argument("stiffness not square");
  if (mass_full_.size() != n_) throw std::invalid_argument("mass length does not match stiffness");
  dirichlet.check_range(n_);

  std::vector<int> full_to_free(n_, -1);
  free_.reserve(n_ - dirichlet.size());
  for (int i = 0; i < n_; ++i) {
    if (!dirichlet.contains(i)) {
      full_to_free[i] = static_cast<int>(free_.size());
      free_.push_back(i);
    }
  }
  const int nf = n_free();
  if (nf == 0) throw std::invalid_argument("no free vertices left");

  mass_free_.resize(nf);
  for (int i = 0; i < nf; ++i) mass_free_[i] = mass_full_[free_[i]];
  if (mass_free_.minCoeff() <= 0.0)
    throw SingularMass("mass matrix not strictly positive on free vertices");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(stiffness.nonZeros() + nf);
  for (int outer = 0; outer < stiffness.outerSize(); ++outer) {
    for (SpMat::InnerIterator it(stiffness, outer); it; ++it) {
      const int r = full_to_free[static_cast<int>(it.row())];
      const int c = full_to_free[static_cast<int>(it.col())];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  }
  for (int i = 0; i < nf; ++i) trip.emplace_back(i, i, 0.0);  // keep diagonal in the pattern
  w_free_.resize(nf, nf);
  w_free_.setFromTriplets(trip.begin(), trip.end());
  w_free_.makeCompressed();

  diag_pos_.assign(nf, -1);
  const int* outer_idx = w_free_.outerIndexPtr();
  const int* inner_idx = w_free_.innerIndexPtr();
  for (int c = 0; c < nf; ++c) {
    for (int p = outer_idx[c]; p < outer_idx[c + 1]; ++p) {
      if (inner_idx[p] == c) {
        diag_pos_[c] = p;
        break;
      }
    }
  }
}

void PencilEigenSolver::apply_h(const Eigen::VectorXd& h_values, const Eigen::VectorXd& x,
                                Eigen::VectorXd& y) const {
  // symmetric CSC arrays double as CSR arrays
  par::spmv_csr(n_free(), w_free_.outerIndexPtr(), w_free_.innerIndexPtr(), h_values.data(), x,
                y);
}

double PencilEigenSolver::factorize_shifted(const Eigen::VectorXd& h_values) {
  const int nf = n_free();
  double trace_scale = 0.0;
  for (int i = 0; i < nf; ++i) trace_scale += h_values[diag_pos_[i]] / mass_free_[i];
  const double sigma = -1e-6 * std::abs(trace_scale);

  SpMat p_mat = w_free_;
  Eigen::Map<Eigen::VectorXd>(p_mat.valuePtr(), p_mat.nonZeros()) = h_values;
  for (int i = 0; i < nf; ++i) p_mat.valuePtr()[diag_pos_[i]] -= sigma * mass_free_[i];

  if (!pattern_analyzed_) {
    ldlt_.analyzePattern(p_mat);
    pattern_analyzed_ = true;
  }
  ldlt_.factorize(p_mat);
  if (ldlt_.info() != Eigen::Success)
    throw ConvergenceFailure("sparse factorization failed at shift");
  return sigma;
}

int PencilEigenSolver::eigenvalues_below(const Eigen::VectorXd& h_values, double tau) {
  const int nf = n_free();
  SpMat shifted = w_free_;
  Eigen::Map<Eigen::VectorXd>(shifted.valuePtr(), shifted.nonZeros()) = h_values;
  for (int i = 0; i < nf; ++i) shifted.valuePtr()[diag_pos_[i]] -= tau * mass_free_[i];
  if (!inertia_pattern_analyzed_) {
    ldlt_inertia_.analyzePattern(shifted);
    inertia_pattern_analyzed_ = true;
  }
  ldlt_inertia_.factorize(shifted);
  if (ldlt_inertia_.info() != Eigen::Success) return -1;  // inconclusive
  int below = 0;
  const auto& d = ldlt_inertia_.vectorD();
  for (int i = 0; i < d.size(); ++i)
    if (d[i] < 0.0) ++below;
  return below;
}

double PencilEigenSolver::diag_scale(const Eigen::VectorXd& h_values) const {
  double s = 0.0;
  for (int i = 0; i < n_free(); ++i) s = std::max(s, std::abs(h_values[diag_pos_[i]]));
  return s;
}

bool PencilEigenSolver::pairs_verified(const Eigen::VectorXd& h_values,
                                       const Eigen::VectorXd& lambdas, const Eigen::MatrixXd& u,
                                       double tol) const {
  const double scale = diag_scale(h_values);
  Eigen::VectorXd hu;
  // boundary pairs converge last; walk downward to fail fast
  for (int i = static_cast<int>(lambdas.size()) - 1; i >= 0; --i) {
    apply_h(h_values, u.col(i), hu);
    const Eigen::VectorXd mu = mass_free_.cwiseProduct(u.col(i));
    const double numer = (hu - lambdas[i] * mu).norm();
    const double denom = std::max(
        {hu.norm(), std::abs(lambdas[i]) * mu.norm(), 1e-6 * scale * u.col(i).norm()});
    if (!(numer <= tol * denom)) return false;
  }
  return true;
}

bool PencilEigenSolver::count_complete(const Eigen::VectorXd& h_values,
                                       const Eigen::VectorXd& lambdas) {
  // a single Krylov sequence (or a drifting warm subspace) can under-count
  // tight multiplicities; cross-check the eigenvalue count below the top
  // accepted one by Sylvester inertia
  const int k = static_cast<int>(lambdas.size());
  const double lam_top = lambdas[k - 1];
  const double resolution =
      std::max({1e-6 * std::abs(lam_top), 1e-12 * diag_scale(h_values), 1e-300});
  const double tau = lam_top - resolution;
  int ours_below = 0;
  for (int i = 0; i < k; ++i)
    if (lambdas[i] < tau) ++ours_below;
  const int true_below = eigenvalues_below(h_values, tau);
  if (true_below >= 0 && true_below != ours_below) {
    SPECTRALIGN_LOG_DEBUG("eigensolver missed %d eigenvalue(s) below %.6g", true_below - ours_below,
                          tau);
    return false;
  }
  return true;
}

// One pass of shift-inverted subspace iteration with Rayleigh-Ritz over
// [U, (H - sigma M)^-1 M U]. Cheap when the potential moved slightly since
// the previous solve; every result still passes the residual and inertia
// gates before being accepted.
bool PencilEigenSolver::warm_sweep(int k, const Eigen::VectorXd& h_values, double sigma,
                                   Eigen::VectorXd& lambdas, Eigen::MatrixXd& u) const {
  const int nf = n_free();
  Eigen::MatrixXd S(nf, 2 * k);
  S.leftCols(k) = u;
  S.rightCols(k) = ldlt_.solve(mass_free_.asDiagonal() * u);

  // M-orthonormalize via the projected Gram matrix, dropping null directions
  Eigen::MatrixXd G = S.transpose() * (mass_free_.asDiagonal() * S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(G);
  if (ges.info() != Eigen::Success) return false;
  const double gmax = ges.eigenvalues().maxCoeff();
  if (!(gmax > 0.0)) return false;
  int rank = 0;
  for (int i = 0; i < G.rows(); ++i)
    if (ges.eigenvalues()[i] > 1e-12 * gmax) ++rank;
  if (rank < k) return false;
  Eigen::MatrixXd whiten(G.rows(), rank);
  for (int i = 0, at = 0; i < G.rows(); ++i) {
    if (ges.eigenvalues()[i] > 1e-12 * gmax)
      whiten.col(at++) = ges.eigenvectors().col(i) / std::sqrt(ges.eigenvalues()[i]);
  }

  // H S column by column; H (P^-1 M u) = M u + sigma M (P^-1 M u) needs no
  // extra sparse products
  Eigen::MatrixXd HS(nf, 2 * k);
  Eigen::VectorXd hcol;
  for (int i = 0; i < k; ++i) {
    apply_h(h_values, S.col(i), hcol);
    HS.col(i) = hcol;
  }
  HS.rightCols(k) =
      mass_free_.asDiagonal() * u + sigma * (mass_free_.asDiagonal() * S.rightCols(k));

  Eigen::MatrixXd Q = S * whiten;  // nf x rank, M-orthonormal
  Eigen::MatrixXd Hp = Q.transpose() * (HS * whiten);
  Hp = 0.5 * (Hp + Hp.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hp);
  if (es.info() != Eigen::Success) return false;
  lambdas = es.eigenvalues().head(k);
  u = Q * es.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i)
    u.col(i) /= std::sqrt(mass_dot(mass_free_, u.col(i), u.col(i)));
  return true;
}

Spectrum PencilEigenSolver::embed(const Eigen::VectorXd& lambdas,
                                  const Eigen::MatrixXd& vectors_free) const {
  Spectrum spec;
  spec.eigenvalues = lambdas;
  spec.eigenvectors = Eigen::MatrixXd::Zero(n_, lambdas.size());
  for (int col = 0; col < vectors_free.cols(); ++col)
    for (int i = 0; i < n_free(); ++i) spec.eigenvectors(free_[i], col) = vectors_free(i, col);

  // sign convention: largest-magnitude entry positive
  for (int col = 0; col < spec.eigenvectors.cols(); ++col) {
    int at = 0;
    spec.eigenvectors.col(col).cwiseAbs().maxCoeff(&at);
    if (spec.eigenvectors(at, col) < 0.0) spec.eigenvectors.col(col) *= -1.0;
  }
  return spec;
}

Spectrum PencilEigenSolver::solve_dense(int k, const Eigen::VectorXd& h_values) const {
  const int nf = n_free();
  Eigen::VectorXd inv_sqrt_m = mass_free_.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(nf, nf);
  const int* outer_idx = w_free_.outerIndexPtr();
  const int* inner_idx = w_free_.innerIndexPtr();
  for (int c = 0; c < nf; ++c)
    for (int p = outer_idx[c]; p < outer_idx[c + 1]; ++p)
      dense(inner_idx[p], c) = h_values[p] * inv_sqrt_m[inner_idx[p]] * inv_sqrt_m[c];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed");
  Eigen::VectorXd lambdas = es.eigenvalues().head(k);
  Eigen::MatrixXd vecs = inv_sqrt_m.asDiagonal() * es.eigenvectors().leftCols(k);
  return embed(lambdas, vecs);
}

Spectrum PencilEigenSolver::solve_lanczos(int k, const Eigen::VectorXd& h_values,
                                          const EigOptions& opts) {
  const int nf = n_free();
  const int m_max = std::min(nf, std::max(2 * k + 10, 40));
  const int ops_cap = opts.max_ops > 0 ? opts.max_ops : 300 * std::max(k, 1);

  const double sigma = factorize_shifted(h_values);

  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ull);
  auto random_vector = [&] {
    Eigen::VectorXd v(nf);
    for (int i = 0; i < nf; ++i) v[i] = symmetric_uniform(rng);
    return v;
  };

  // warm fast path: Rayleigh-Ritz refinement of the previous eigenbasis
  if (warm_basis_.rows() == nf && warm_basis_.cols() == k) {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd u = warm_basis_;
    for (int sweep = 0; sweep < 2; ++sweep) {
      if (!warm_sweep(k, h_values, sigma, lambdas, u)) break;
      if (pairs_verified(h_values, lambdas, u, opts.tol)) {
        if (count_complete(h_values, lambdas)) {
          warm_basis_ = u;
          return embed(lambdas, u);
        }
        break;  // missed a crossing; the full iteration below recovers it
      }
    }
  }

  Eigen::MatrixXd V(nf, m_max + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max + 1, m_max + 1);
  Eigen::VectorXd w(nf), mw(nf);

  {
    Eigen::VectorXd v0 = random_vector();
    v0 /= std::sqrt(mass_dot(mass_free_, v0, v0));
    V.col(0) = v0;
  }

  int ops_used = 0;
  int last = 0;  // index of the newest basis vector

  auto expand = [&](int j) {
    mw = mass_free_.cwiseProduct(V.col(j));
    w = ldlt_.solve(mw);
    ++ops_used;
    // two-pass full reorthogonalization in the M inner product
    Eigen::VectorXd c1 = V.leftCols(j + 1).transpose() * mass_free_.cwiseProduct(w);
    w.noalias() -= V.leftCols(j + 1) * c1;
    Eigen::VectorXd c2 = V.leftCols(j + 1).transpose() * mass_free_.cwiseProduct(w);
    w.noalias() -= V.leftCols(j + 1) * c2;
    T(j, j) = c1[j] + c2[j];
    double beta = std::sqrt(std::max(0.0, mass_dot(mass_free_, w, w)));
    if (beta <= 1e-14 * std::abs(T(j, j)) || beta <= 1e-300) {
      // invariant subspace found; continue in its M-orthogonal complement
      Eigen::VectorXd fresh = random_vector();
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd c = V.leftCols(j + 1).transpose() * mass_free_.cwiseProduct(fresh);
        fresh.noalias() -= V.leftCols(j + 1) * c;
      }
      fresh /= std::sqrt(mass_dot(mass_free_, fresh, fresh));
      V.col(j + 1) = fresh;
      T(j + 1, j) = T(j, j + 1) = 0.0;
    } else {
      V.col(j + 1) = w / beta;
      T(j + 1, j) = T(j, j + 1) = beta;
    }
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes;

  while (true) {
    expand(last);
    ++last;
    const int s = last;  // usable subspace size

    const bool cycle_full = (s == m_max);
    if (s >= k + 1 && (s % 3 == 0 || cycle_full)) {
      tes.compute(T.topLeftCorner(s, s));
      const Eigen::VectorXd& theta = tes.eigenvalues();  // ascending
      const Eigen::MatrixXd& y = tes.eigenvectors();
      const double beta_out = T(s, s - 1);

      bool bounds_ok = true;
      for (int i = 0; i < k; ++i) {
        const double th = theta[s - 1 - i];
        const double bound = std::abs(beta_out * y(s - 1, s - 1 - i));
        if (!(bound <= 0.1 * opts.tol * std::abs(th))) {
          bounds_ok = false;
          break;
        }
      }

      if (bounds_ok) {
        Eigen::VectorXd lambdas(k);
        Eigen::MatrixXd u(nf, k);
        for (int i = 0; i < k; ++i) {
          const int col = s - 1 - i;  // descending theta = ascending lambda
          lambdas[i] = sigma + 1.0 / theta[col];
          u.col(i).noalias() = V.leftCols(s) * y.col(col);
          u.col(i) /= std::sqrt(mass_dot(mass_free_, u.col(i), u.col(i)));
        }
        if (pairs_verified(h_values, lambdas, u, opts.tol) && count_complete(h_values, lambdas)) {
          warm_basis_ = u;
          return embed(lambdas, u);
        }
      }

      if (cycle_full) {
        // thick restart: keep the best Ritz pairs plus the residual direction
        const int l = std::min(k + 10, s - 2);
        Eigen::MatrixXd kept(nf, l);
        Eigen::VectorXd kept_theta(l);
        Eigen::VectorXd arrow(l);
        for (int i = 0; i < l; ++i) {
          const int col = s - 1 - i;
          kept.col(i).noalias() = V.leftCols(s) * y.col(col);
          kept_theta[i] = theta[col];
          arrow[i] = beta_out * y(s - 1, col);
        }
        V.leftCols(l) = kept;
        V.col(l) = V.col(s);
        T.setZero();
        for (int i = 0; i < l; ++i) {
          T(i, i) = kept_theta[i];
          T(l, i) = T(i, l) = arrow[i];
        }
        last = l;
      }
    }

    if (ops_used > ops_cap)
      throw ConvergenceFailure("eigenvalue iteration cap reached before residual target (" +
                               std::to_string(ops_used) + " operator applications)");
  }
}

Spectrum PencilEigenSolver::solve(int k, const Eigen::VectorXd& q, const EigOptions& opts) {
  if (k < 0) throw std::invalid_argument("negative eigenpair count");
  if (k > n_free())
    throw std::invalid_argument("requested more eigenpairs than free vertices");
  if (q.size() != 0 && q.size() != n_)
    throw std::invalid_argument("potential length does not match vertex count");
  if (q.size() != 0 && q.minCoeff() < 0.0)
    throw std::invalid_argument("potential must be nonnegative");

  Spectrum spec;
  if (k == 0) {
    spec.eigenvectors.resize(n_, 0);
    return spec;
  }

  Eigen::VectorXd h_values =
      Eigen::Map<const Eigen::VectorXd>(w_free_.valuePtr(), w_free_.nonZeros());
  if (q.size() != 0) {
    for (int i = 0; i < n_free(); ++i)
      h_values[diag_pos_[i]] += mass_free_[i] * q[free_[i]];
  }

  const int cutoff = opts.dense_cutoff >= 0 ? opts.dense_cutoff : std::max(350, 2 * k + 30);
  if (n_free() <= cutoff) return solve_dense(k, h_values);
  return solve_lanczos(k, h_values, opts);
}

Spectrum smallest_eigenpairs(const OperatorPair& ops, int k, const VertexSet& dirichlet,
                             const EigOptions& opts) {
  PencilEigenSolver solver(ops.stiffness, ops.mass, dirichlet);
  Spectrum spec = solver.solve(k, Eigen::VectorXd(), opts);
  spec.metric = ops.metric;
  return spec;
}

Eigen::VectorXd spectrum_residuals(const Spectrum& spec, const OperatorPair& ops,
                                   const VertexSet& dirichlet) {
  const int n = static_cast<int>(ops.stiffness.rows());
  const int k = spec.k();
  if (spec.eigenvectors.rows() != n) throw std::invalid_argument("spectrum/operator mismatch");

  double diag_scale = 0.0;
  for (int i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(ops.stiffness.coeff(i, i)));

  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd w_phi = ops.stiffness * spec.eigenvectors.col(i);
    Eigen::VectorXd m_phi = ops.mass.cwiseProduct(spec.eigenvectors.col(i));
    for (int d : dirichlet.indices) {
      w_phi[d] = 0.0;
      m_phi[d] = 0.0;
    }
    const double lambda = spec.eigenvalues[i];
    const double numer = (w_phi - lambda * m_phi).norm();
    const double denom = std::max({w_phi.norm(), std::abs(lambda) * m_phi.norm(),
                                   1e-6 * diag_scale * spec.eigenvectors.col(i).norm()});
    out[i] = denom > 0.0 ? numer / denom : 0.0;
  }
  return out;
}

}  // namespace spectralign
