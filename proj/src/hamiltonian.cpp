#include "spectralign/hamiltonian.hpp"

#include <cmath>

#include "spectralign/errors.hpp"

namespace spectralign {

const char* reparam_name(Reparam r) { return r == Reparam::square ? "square" : "saturation"; }

Reparam reparam_from_name(const std::string& name) {
  if (name == "square") return Reparam::square;
  if (name == "saturation" || name == "sat") return Reparam::saturation;
  throw std::invalid_argument("unknown reparametrization: " + name);
}

Eigen::VectorXd apply_reparam(const Potential& pot) {
  if (pot.reparam == Reparam::square) return pot.raw.array().square();
  return pot.c * (pot.raw.array().tanh() + 1.0);
}

Eigen::VectorXd reparam_derivative(const Potential& pot) {
  if (pot.reparam == Reparam::square) return 2.0 * pot.raw;
  Eigen::ArrayXd t = pot.raw.array().tanh();
  return pot.c * (1.0 - t.square());
}

Eigen::VectorXd reparam_preimage(const Eigen::VectorXd& q_target, Reparam reparam, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("step height c must be positive");
  Eigen::VectorXd v(q_target.size());
  if (reparam == Reparam::square) {
    const double floor = 1e-6 * c;
    for (int i = 0; i < v.size(); ++i) v[i] = std::sqrt(std::max(q_target[i], floor));
  } else {
    const double margin = 1e-4;  // keeps q inside (0, 2c) and atanh finite
    for (int i = 0; i < v.size(); ++i) {
      double t = std::clamp(q_target[i] / c - 1.0, -1.0 + margin, 1.0 - margin);
      v[i] = std::atanh(t);
    }
  }
  return v;
}

HamiltonianSpectrum hamiltonian_spectrum(const OperatorPair& ops, const Potential& pot, int k,
                                         const VertexSet& dirichlet, const EigOptions& opts) {
  if (pot.raw.size() != ops.mass.size())
    throw std::invalid_argument("potential length does not match operator dimension");
  PencilEigenSolver solver(ops.stiffness, ops.mass, dirichlet);
  HamiltonianSpectrum out;
  out.spectrum = solver.solve(k, apply_reparam(pot), opts);
  out.spectrum.metric = ops.metric;
  out.potential = pot;
  return out;
}

Eigen::MatrixXd eigenvalue_gradients(const HamiltonianSpectrum& spec, const OperatorPair& ops) {
  const Eigen::VectorXd qprime = reparam_derivative(spec.potential);
  Eigen::MatrixXd table;
  par::gradient_table(spec.spectrum.eigenvectors, ops.mass, qprime, table);
  return table;
}

}  // namespace spectralign
