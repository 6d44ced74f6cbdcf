#pragma once

#include "spectralign/mesh.hpp"

namespace spectralign {

struct CutSpec {
  enum class Kind { plane, ball };
  Kind kind = Kind::plane;
  Vec3 normal = Vec3(0, 0, 1);   // plane; unit length
  double offset = 0.0;           // plane; fraction of the bbox diagonal
  int center = -1;               // ball; vertex index
  double radius_fraction = 0.0;  // ball; of the shape radius
  std::uint64_t seed = 0;
};

struct CutResult {
  TriMesh partial;
  VertexSet ground_truth;    // surviving vertices on the full mesh
  std::vector<int> to_full;  // partial vertex -> full vertex
};

// Keep the positive side of the plane through (bbox center + offset * diag *
// normal); faces with all three vertices kept; largest connected component.
CutResult plane_cut(const TriMesh& mesh, const CutSpec& spec);

// Keep vertices within radius_fraction * shape_radius graph-geodesic distance
// of the center. shape_radius = half the diameter estimated over 10 farthest
// point samples.
CutResult ball_cut(const TriMesh& mesh, const CutSpec& spec);

// Draws specs (plane: uniform sphere normals, offsets in +-0.3 diag; ball:
// centers from 10 FPS samples, fractions in [0.2, 0.7]), resampling each
// degenerate cut up to 20 times.
std::vector<std::pair<CutSpec, CutResult>> generate_suite(const TriMesh& mesh, int n_cuts,
                                                          CutSpec::Kind kind, std::uint64_t seed);

double estimate_shape_radius(const TriMesh& mesh, std::uint64_t seed);

}  // namespace spectralign
