#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectralign {

using Vec3 = Eigen::Vector3d;

/// Sorted unique vertex indices into a mesh (boundaries, regions, samples).
struct VertexSet {
  std::vector<int> indices;

  VertexSet() = default;
  explicit VertexSet(std::vector<int> idx);  // sorts and dedups

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
  bool contains(int v) const;
  void check_range(int n_vertices) const;
};

/// Immutable triangle mesh. Vertex order is preserved from the source file.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  double bbox_diagonal() const;
  double face_area(int f) const;

  // Throws ParseError / DegenerateFace / NonManifold when an invariant fails.
  void validate() const;
};

TriMesh load_mesh(const std::string& path);
void save_mesh_off(const TriMesh& mesh, const std::string& path);

// Ascii PLY with per-vertex RGB from the min-max normalized field through a
// fixed 256-entry colormap.
void save_mesh_with_scalar(const TriMesh& mesh, const Eigen::VectorXd& field,
                           const std::string& path);

VertexSet boundary_vertices(const TriMesh& mesh);

double total_area(const TriMesh& mesh);

// Shortest-path distance along mesh edges (Euclidean edge weights).
// Unreachable vertices get +infinity.
Eigen::VectorXd graph_geodesics(const TriMesh& mesh, int source);

// Greedy farthest-point sampling under graph geodesics. The first sample is
// vertex (seed mod n_vertices); ties break toward the lowest index.
std::vector<int> farthest_point_samples(const TriMesh& mesh, int n, std::uint64_t seed);

// FNV-1a over a canonical text serialization of vertices and faces.
std::uint64_t mesh_checksum(const TriMesh& mesh);

// 256-entry RGB table used by save_mesh_with_scalar.
const std::array<std::array<unsigned char, 3>, 256>& colormap_table();

}  // namespace spectralign
