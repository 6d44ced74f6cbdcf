#include "spectralign/operators.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <vector>

#include "spectralign/errors.hpp"

namespace spectralign {

const char* metric_name(Metric m) {
  return m == Metric::regular ? "regular" : "scale_invariant";
}

Metric metric_from_name(const std::string& name) {
  if (name == "regular") return Metric::regular;
  if (name == "scale_invariant" || name == "si") return Metric::scale_invariant;
  throw std::invalid_argument("unknown metric: " + name);
}

SpMat cotangent_stiffness(const TriMesh& mesh) {
  const int n = mesh.n_vertices();
  Eigen::VectorXd areas;
  Eigen::MatrixX3d cots;
  par::face_geometry(mesh, areas, cots);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.n_faces() * 12);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& face = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      const int i = face[(c + 1) % 3];
      const int j = face[(c + 2) % 3];
      const double half_cot = 0.5 * cots(f, c);
      trip.emplace_back(i, j, -half_cot);
      trip.emplace_back(j, i, -half_cot);
      trip.emplace_back(i, i, half_cot);
      trip.emplace_back(j, j, half_cot);
    }
  }
  SpMat W(n, n);
  W.setFromTriplets(trip.begin(), trip.end());
  W.makeCompressed();
  return W;
}

Eigen::VectorXd lumped_mass(const TriMesh& mesh) {
  Eigen::VectorXd areas;
  Eigen::MatrixX3d cots;
  par::face_geometry(mesh, areas, cots);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int f = 0; f < mesh.n_faces(); ++f)
    for (int c = 0; c < 3; ++c) mass[mesh.faces[f][c]] += areas[f] / 3.0;
  return mass;
}

CurvatureField gaussian_curvature(const TriMesh& mesh, bool smooth) {
  const int n = mesh.n_vertices();
  Eigen::VectorXd angle_sum = Eigen::VectorXd::Zero(n);
  for (const auto& face : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      const Vec3& p = mesh.vertices[face[c]];
      const Vec3 u = mesh.vertices[face[(c + 1) % 3]] - p;
      const Vec3 v = mesh.vertices[face[(c + 2) % 3]] - p;
      angle_sum[face[c]] += std::atan2(u.cross(v).norm(), u.dot(v));
    }
  }

  const Eigen::VectorXd mass = lumped_mass(mesh);
  const VertexSet boundary = boundary_vertices(mesh);
  CurvatureField field;
  field.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double full_turn = boundary.contains(i) ? M_PI : 2.0 * M_PI;
    field.values[i] = (full_turn - angle_sum[i]) / mass[i];
  }

  if (smooth) {
    std::vector<std::vector<int>> ring(n);
    std::unordered_map<std::uint64_t, bool> seen;
    for (const auto& face : mesh.faces) {
      for (int c = 0; c < 3; ++c) {
        int a = face[c], b = face[(c + 1) % 3];
        std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                            static_cast<std::uint32_t>(std::max(a, b));
        if (seen.emplace(key, true).second) {
          ring[a].push_back(b);
          ring[b].push_back(a);
        }
      }
    }
    Eigen::VectorXd smoothed(n);
    for (int i = 0; i < n; ++i) {
      double acc = field.values[i];
      for (int j : ring[i]) acc += field.values[j];
      smoothed[i] = acc / (1.0 + ring[i].size());
    }
    field.values = std::move(smoothed);
    field.smoothed = true;
  }
  return field;
}

Eigen::VectorXd si_mass(const TriMesh& mesh, const CurvatureField& curvature) {
  if (curvature.values.size() != mesh.n_vertices())
    throw std::invalid_argument("curvature field does not match mesh");
  const Eigen::VectorXd mass = lumped_mass(mesh);
  Eigen::VectorXd result(mass.size());
  for (int i = 0; i < mass.size(); ++i)
    result[i] = std::pow(std::abs(curvature.values[i]) + curvature.eps, curvature.alpha) * mass[i];
  return result;
}

OperatorPair operator_pair(const TriMesh& mesh, Metric metric, double alpha, double eps) {
  OperatorPair ops;
  ops.metric = metric;
  ops.stiffness = cotangent_stiffness(mesh);
  if (metric == Metric::regular) {
    ops.mass = lumped_mass(mesh);
  } else {
    CurvatureField k = gaussian_curvature(mesh, /*smooth=*/true);
    k.alpha = alpha;
    k.eps = eps;
    ops.mass = si_mass(mesh, k);
  }
  return ops;
}

void dump_matrix(const SpMat& S, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IOError("cannot open " + path + " for writing");
  for (int outer = 0; outer < S.outerSize(); ++outer)
    for (SpMat::InnerIterator it(S, outer); it; ++it)
      std::fprintf(f, "%d %d %.17g\n", static_cast<int>(it.row()), static_cast<int>(it.col()),
                   it.value());
  if (std::fclose(f) != 0) throw IOError("write failed for " + path);
}

void dump_diagonal(const Eigen::VectorXd& d, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IOError("cannot open " + path + " for writing");
  for (int i = 0; i < d.size(); ++i)
    std::fprintf(f, "%d %d %.17g\n", i, i, d[i]);
  if (std::fclose(f) != 0) throw IOError("write failed for " + path);
}

}  // namespace spectralign
