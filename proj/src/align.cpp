#include "spectralign/align.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "spectralign/errors.hpp"
#include "spectralign/log.hpp"

namespace spectralign {

double AlignmentProblem::step_height() const {
  if (c > 0.0) return c;
  double top = 0.0;
  if (regular_active()) top = std::max(top, target_regular[target_regular.size() - 1]);
  if (si_active()) top = std::max(top, target_si[target_si.size() - 1]);
  return c_factor * top;
}

void AlignmentProblem::validate() const {
  if (!regular_active() && !si_active())
    throw std::invalid_argument("alignment problem has no active metric term");
  auto check_target = [](const Eigen::VectorXd& t, const char* name) {
    for (int i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
      if (i > 0 && t[i] < t[i - 1])
        throw std::invalid_argument(std::string(name) + " must be ascending");
    }
  };
  if (regular_active()) check_target(target_regular, "regular target spectrum");
  if (si_active()) check_target(target_si, "scale-invariant target spectrum");
  if (scale_invariant.mass.size() != 0 && scale_invariant.mass.size() != regular.mass.size())
    throw std::invalid_argument("metric operator dimensions disagree");
  if (!(step_height() > 0.0)) throw std::invalid_argument("step height must be positive");
}

double weighted_sq_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spectrum lengths differ");
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double r = (a[i] - b[i]) / b[i];
    acc += r * r;
  }
  return acc;
}

AlignmentEvaluator::AlignmentEvaluator(const AlignmentProblem& problem) : problem_(&problem) {
  problem.validate();
  c_ = problem.step_height();
  if (problem.regular_active())
    regular_solver_.emplace(problem.regular.stiffness, problem.regular.mass, problem.dirichlet);
  if (problem.si_active())
    si_solver_.emplace(problem.scale_invariant.stiffness, problem.scale_invariant.mass,
                       problem.dirichlet);
}

CostGrad AlignmentEvaluator::eval(const Eigen::VectorXd& v_raw) {
  const AlignmentProblem& p = *problem_;
  if (v_raw.size() != p.n()) throw std::invalid_argument("potential length mismatch");

  Potential pot;
  pot.raw = v_raw;
  pot.reparam = p.reparam;
  pot.c = c_;
  const Eigen::VectorXd q = apply_reparam(pot);
  const Eigen::VectorXd qprime = reparam_derivative(pot);

  EigOptions eopts;
  eopts.seed = p.seed;

  CostGrad out;
  out.grad = Eigen::VectorXd::Zero(p.n());

  auto accumulate = [&](PencilEigenSolver& solver, const OperatorPair& ops,
                        const Eigen::VectorXd& target, double weight) {
    const int k = static_cast<int>(target.size());
    Spectrum spec = solver.solve(k, q, eopts);
    out.cost += weight * weighted_sq_distance(spec.eigenvalues, target);

    Eigen::VectorXd coeff(k);
    for (int i = 0; i < k; ++i)
      coeff[i] = 2.0 * weight * (spec.eigenvalues[i] - target[i]) / (target[i] * target[i]);
    Eigen::MatrixXd table;
    par::gradient_table(spec.eigenvectors, ops.mass, qprime, table);
    out.grad.noalias() += table.transpose() * coeff;
  };

  if (p.regular_active())
    accumulate(*regular_solver_, p.regular, p.target_regular, p.weight_regular);
  if (p.si_active()) accumulate(*si_solver_, p.scale_invariant, p.target_si, p.weight_si);
  return out;
}

CostGrad cost_and_grad(const AlignmentProblem& problem, const Eigen::VectorXd& v_raw) {
  AlignmentEvaluator evaluator(problem);
  return evaluator.eval(v_raw);
}

namespace {

// minimize g's + s'Ds/2 over ||s|| <= radius for diagonal positive D
Eigen::VectorXd trust_region_step(const Eigen::VectorXd& g, const Eigen::VectorXd& d,
                                  double radius) {
  Eigen::VectorXd s = -g.cwiseQuotient(d);
  double norm = s.norm();
  if (norm <= radius) return s;

  // secular iteration on nu: || g / (d + nu) || = radius
  double nu = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::ArrayXd denom = d.array() + nu;
    Eigen::ArrayXd sa = g.array() / denom;
    norm = std::sqrt((sa * sa).sum());
    if (std::abs(norm - radius) <= 1e-10 * radius) break;
    const double dnorm = (sa * sa / denom).sum() / norm;  // -d||s||/dnu
    const double step = (norm - radius) / radius * (norm / dnorm);
    nu = std::max(nu + step, nu * 0.5 + 1e-18);
  }
  return (-g.array() / (d.array() + nu)).matrix();
}

}  // namespace

LocalizationResult minimize(const AlignmentProblem& problem, const Eigen::VectorXd& v_init,
                            const MinimizeOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!v_init.allFinite()) throw std::invalid_argument("initial potential must be finite");

  AlignmentEvaluator evaluator(problem);
  const double c = problem.step_height();
  const int n = problem.n();

  LocalizationResult result;
  result.v_opt = v_init;

  CostGrad cur = evaluator.eval(v_init);
  result.cost_trace.push_back(cur.cost);
  const double f0 = cur.cost;
  const double grad_tol = opts.grad_tol_factor * f0;

  double radius = opts.initial_radius > 0.0 ? opts.initial_radius : 0.05 * std::sqrt(double(n));
  const double radius_max = 1e3 * radius;
  Eigen::VectorXd diag =
      Eigen::VectorXd::Constant(n, std::max(cur.grad.norm() / radius, 1e-12));
  const double diag_ref = diag[0];

  int accepted = 0;
  int evals = 1;
  int consecutive_rejects = 0;
  int flat_accepts = 0;

  auto finish = [&](bool stalled) {
    result.final_cost = cur.cost;
    result.iterations = accepted;
    result.stalled = stalled;
    result.predicted = predict_region(result.v_opt, problem.reparam, c);
    result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
  };

  if (f0 == 0.0 || cur.grad.lpNorm<Eigen::Infinity>() <= grad_tol) return finish(false);

  while (accepted < opts.max_iter && evals < 4 * opts.max_iter) {
    Eigen::VectorXd step = trust_region_step(cur.grad, diag, radius);
    const double pred = -(cur.grad.dot(step) + 0.5 * step.dot(diag.cwiseProduct(step)));
    if (!(pred > 0.0)) break;  // model exhausted at this scale

    Eigen::VectorXd v_trial = result.v_opt + step;
    CostGrad trial = evaluator.eval(v_trial);
    ++evals;
    const double rho = (cur.cost - trial.cost) / pred;

    if (rho >= 0.05 && trial.cost < cur.cost) {
      const double improve = (cur.cost - trial.cost) / std::max(cur.cost, 1e-300);
      // diagonal secant update
      Eigen::VectorXd y = trial.grad - cur.grad;
      const double ys = y.dot(step);
      if (ys > 1e-12 * y.norm() * step.norm()) {
        const double sds = step.dot(diag.cwiseProduct(step));
        for (int i = 0; i < n; ++i) {
          const double di =
              diag[i] - (diag[i] * step[i]) * (diag[i] * step[i]) / sds + y[i] * y[i] / ys;
          diag[i] = std::clamp(di, 1e-8 * diag_ref, 1e8 * diag_ref);
        }
      }
      result.v_opt = std::move(v_trial);
      cur = std::move(trial);
      result.cost_trace.push_back(cur.cost);
      ++accepted;
      consecutive_rejects = 0;

      if (rho >= 0.75 && step.norm() >= 0.8 * radius) radius = std::min(2.0 * radius, radius_max);
      if (cur.grad.lpNorm<Eigen::Infinity>() <= grad_tol) return finish(false);
      flat_accepts = improve < 1e-7 ? flat_accepts + 1 : 0;
      if (flat_accepts >= 3) return finish(false);
    } else {
      radius = std::max(0.25 * step.norm(), 1e-12);
      if (++consecutive_rejects >= 10) return finish(true);
    }
  }
  return finish(false);
}

std::vector<Eigen::VectorXd> make_initializations(const TriMesh& full, double area, int n_samples,
                                                  std::uint64_t seed, Reparam reparam, double c) {
  if (!(area > 0.0)) throw std::invalid_argument("area must be positive");
  const std::vector<int> samples = farthest_point_samples(full, n_samples, seed);
  const double widths[2] = {std::sqrt(area), std::sqrt(2.0 * area)};

  std::vector<Eigen::VectorXd> inits;
  inits.reserve(2 * samples.size());
  for (int p : samples) {
    const Eigen::VectorXd dist = graph_geodesics(full, p);
    for (double sigma : widths) {
      Eigen::VectorXd q_target(full.n_vertices());
      for (int i = 0; i < full.n_vertices(); ++i) {
        const double d = dist[i];
        q_target[i] = std::isfinite(d) ? c * (1.0 - std::exp(-d * d / (2.0 * sigma * sigma))) : c;
      }
      inits.push_back(reparam_preimage(q_target, reparam, c));
    }
  }
  return inits;
}

VertexSet predict_region(const Eigen::VectorXd& v_raw, Reparam reparam, double c) {
  Potential pot;
  pot.raw = v_raw;
  pot.reparam = reparam;
  pot.c = c;
  Eigen::VectorXd q = apply_reparam(pot);

  double tau;
  if (reparam == Reparam::saturation) {
    tau = 0.5 * c;
  } else {
    std::vector<double> sorted(q.data(), q.data() + q.size());
    std::sort(sorted.begin(), sorted.end());
    const double q25 = sorted[sorted.size() / 4];
    const double q50 = sorted[sorted.size() / 2];
    const double q75 = sorted[(3 * sorted.size()) / 4];
    tau = std::clamp(q50, q25, q75);
  }

  std::vector<int> region;
  for (int i = 0; i < q.size(); ++i)
    if (q[i] < tau) region.push_back(i);
  return VertexSet(std::move(region));
}

LocalizeOutput localize(const AlignmentProblem& problem,
                        const std::vector<Eigen::VectorXd>& inits, int parallelism,
                        const MinimizeOptions& opts) {
  if (inits.empty()) throw std::invalid_argument("localize needs at least one initialization");

  LocalizeOutput out;
  out.results.resize(inits.size());

  const int saved_jobs = par::jobs();
  if (parallelism > 0) par::set_jobs(parallelism);
  par::parallel_for(static_cast<int>(inits.size()), [&](int i) {
    try {
      out.results[i] = minimize(problem, inits[i], opts);
    } catch (const std::exception& e) {
      out.results[i].error = e.what();
      out.results[i].stalled = true;
    }
    out.results[i].init_id = i;
  });
  par::set_jobs(saved_jobs);

  bool all_flagged = true;
  for (size_t i = 0; i < out.results.size(); ++i) {
    const auto& r = out.results[i];
    if (!r.stalled && r.error.empty()) all_flagged = false;
    if (r.error.empty() &&
        (out.best_index < 0 || r.final_cost < out.results[out.best_index].final_cost))
      out.best_index = static_cast<int>(i);
  }
  if (all_flagged || out.best_index < 0) throw AllStalled("every start stalled or failed");
  return out;
}

}  // namespace spectralign
