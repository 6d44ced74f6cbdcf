#pragma once

#include <string>

#include "spectralign/parallel.hpp"

namespace spectralign {

enum class Metric { regular, scale_invariant };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// Per-vertex Gaussian curvature with the smoothing state and the
/// scale-interpolation parameters used to build the scale-invariant mass.
struct CurvatureField {
  Eigen::VectorXd values;
  bool smoothed = false;
  double alpha = 0.33;
  double eps = 1e-8;
};

/// Stiffness + diagonal mass defining one metric's operator pencil.
struct OperatorPair {
  SpMat stiffness;
  Eigen::VectorXd mass;
  Metric metric = Metric::regular;
};

// W_ij = -1/2 (cot a_ij + cot b_ij) over the angles opposite edge (i,j);
// one term on boundary edges. Diagonal makes each row sum to zero.
SpMat cotangent_stiffness(const TriMesh& mesh);

// A_ii = 1/3 of the incident triangle area; trace equals total_area.
Eigen::VectorXd lumped_mass(const TriMesh& mesh);

// Angle defect over the lumped vertex area (2*pi interior, pi boundary).
// smooth: replace each value by the mean over the vertex and its 1-ring.
CurvatureField gaussian_curvature(const TriMesh& mesh, bool smooth);

// (|K_i| + eps)^alpha * A_ii; alpha = 0 reproduces the lumped mass.
Eigen::VectorXd si_mass(const TriMesh& mesh, const CurvatureField& curvature);

OperatorPair operator_pair(const TriMesh& mesh, Metric metric, double alpha = 0.33,
                           double eps = 1e-8);

// Coordinate-format text dump, "%d %d %.17g" per entry, 0-based.
void dump_matrix(const SpMat& S, const std::string& path);
void dump_diagonal(const Eigen::VectorXd& d, const std::string& path);

}  // namespace spectralign
