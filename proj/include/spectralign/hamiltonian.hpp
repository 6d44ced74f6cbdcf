#pragma once

#include "spectralign/eigensolver.hpp"

namespace spectralign {

enum class Reparam { square, saturation };

const char* reparam_name(Reparam r);
Reparam reparam_from_name(const std::string& name);

/// Raw per-vertex variable v together with the map q(v) onto nonnegative
/// step potentials: q1(v) = v^2 or q2(v) = c (tanh(v) + 1) with q2 in (0, 2c).
struct Potential {
  Eigen::VectorXd raw;
  Reparam reparam = Reparam::saturation;
  double c = 1.0;  // saturation ceiling half-height; also the step height scale
};

Eigen::VectorXd apply_reparam(const Potential& pot);
Eigen::VectorXd reparam_derivative(const Potential& pot);

// Raw variable whose q(v) matches the target, clamped into the interior of
// q's range so the preimage stays finite and responsive.
Eigen::VectorXd reparam_preimage(const Eigen::VectorXd& q_target, Reparam reparam, double c);

struct HamiltonianSpectrum {
  Spectrum spectrum;
  Potential potential;
};

// Eigenpairs of (W + M diag(q(v))) phi = lambda M phi.
HamiltonianSpectrum hamiltonian_spectrum(const OperatorPair& ops, const Potential& pot, int k,
                                         const VertexSet& dirichlet, const EigOptions& opts = {});

// d lambda_i / d v_j = M_jj phi_i(j)^2 q'(v_j), one row per eigenvalue.
Eigen::MatrixXd eigenvalue_gradients(const HamiltonianSpectrum& spec, const OperatorPair& ops);

}  // namespace spectralign
