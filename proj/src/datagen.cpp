#include "spectralign/datagen.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <unordered_map>
#include <numeric>
#include <random>

#include "spectralign/errors.hpp"
#include "spectralign/log.hpp"

namespace spectralign {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// induced submesh over the kept flags: faces fully inside, then the largest
// connected component, reindexed
CutResult induced_submesh(const TriMesh& mesh, const std::vector<char>& keep) {
  const int n = mesh.n_vertices();

  std::vector<std::array<int, 3>> kept_faces;
  for (const auto& f : mesh.faces)
    if (keep[f[0]] && keep[f[1]] && keep[f[2]]) kept_faces.push_back(f);
  if (kept_faces.empty()) throw DegenerateCut("no face survives the cut");

  // union-find over full-mesh vertex ids restricted to kept faces
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& f : kept_faces) {
    parent[find(f[1])] = find(f[0]);
    parent[find(f[2])] = find(f[0]);
  }

  std::unordered_map<int, double> component_area;
  for (const auto& f : kept_faces) {
    const double area =
        0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                  .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]])
                  .norm();
    component_area[find(f[0])] += area;
  }
  int best_root = -1;
  double best_area = -1.0;
  for (const auto& [root, area] : component_area) {
    if (area > best_area || (area == best_area && root < best_root)) {
      best_area = area;
      best_root = root;
    }
  }

  CutResult result;
  std::vector<int> to_partial(n, -1);
  std::vector<int> gt;
  for (const auto& f : kept_faces) {
    if (find(f[0]) != best_root) continue;
    std::array<int, 3> reindexed{};
    for (int c = 0; c < 3; ++c) {
      if (to_partial[f[c]] < 0) {
        to_partial[f[c]] = result.partial.n_vertices();
        result.partial.vertices.push_back(mesh.vertices[f[c]]);
        result.to_full.push_back(f[c]);
        gt.push_back(f[c]);
      }
      reindexed[c] = to_partial[f[c]];
    }
    result.partial.faces.push_back(reindexed);
  }
  result.ground_truth = VertexSet(std::move(gt));

  const int kept_n = result.ground_truth.size();
  if (kept_n < 50) throw DegenerateCut("cut keeps fewer than 50 vertices");
  if (kept_n > static_cast<int>(0.95 * n)) throw DegenerateCut("cut keeps more than 95% of the mesh");
  result.partial.validate();
  return result;
}

}  // namespace

CutResult plane_cut(const TriMesh& mesh, const CutSpec& spec) {
  if (std::abs(spec.normal.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("plane normal must be unit length");
  Vec3 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec3 center = 0.5 * (lo + hi);
  const double diag = (hi - lo).norm();
  const double threshold = spec.normal.dot(center) + spec.offset * diag;

  std::vector<char> keep(mesh.n_vertices(), 0);
  int kept = 0;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    keep[i] = spec.normal.dot(mesh.vertices[i]) >= threshold;
    kept += keep[i];
  }
  if (kept == 0 || kept == mesh.n_vertices())
    throw DegenerateCut("plane does not separate the mesh");
  return induced_submesh(mesh, keep);
}

double estimate_shape_radius(const TriMesh& mesh, std::uint64_t seed) {
  const std::vector<int> probes = farthest_point_samples(mesh, std::min(10, mesh.n_vertices()), seed);
  double diameter = 0.0;
  for (int p : probes) {
    const Eigen::VectorXd dist = graph_geodesics(mesh, p);
    for (int q : probes)
      if (std::isfinite(dist[q])) diameter = std::max(diameter, dist[q]);
  }
  return 0.5 * diameter;
}

CutResult ball_cut(const TriMesh& mesh, const CutSpec& spec) {
  if (spec.center < 0 || spec.center >= mesh.n_vertices())
    throw std::invalid_argument("ball center out of range");
  const double radius = spec.radius_fraction * estimate_shape_radius(mesh, spec.seed);
  const Eigen::VectorXd dist = graph_geodesics(mesh, spec.center);

  std::vector<char> keep(mesh.n_vertices(), 0);
  for (int i = 0; i < mesh.n_vertices(); ++i) keep[i] = dist[i] <= radius;
  return induced_submesh(mesh, keep);
}

std::vector<std::pair<CutSpec, CutResult>> generate_suite(const TriMesh& mesh, int n_cuts,
                                                          CutSpec::Kind kind,
                                                          std::uint64_t seed) {
  if (n_cuts < 1) throw std::invalid_argument("need at least one cut");
  std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbull);

  std::vector<int> centers;
  if (kind == CutSpec::Kind::ball)
    centers = farthest_point_samples(mesh, std::min(10, mesh.n_vertices()), seed);

  std::vector<std::pair<CutSpec, CutResult>> suite;
  suite.reserve(n_cuts);
  for (int cut = 0; cut < n_cuts; ++cut) {
    bool made = false;
    for (int attempt = 0; attempt < 20 && !made; ++attempt) {
      CutSpec spec;
      spec.kind = kind;
      spec.seed = seed;
      if (kind == CutSpec::Kind::plane) {
        // gaussian triple via Box-Muller, normalized
        double u1 = std::max(uniform01(rng), 1e-300), u2 = uniform01(rng);
        double u3 = std::max(uniform01(rng), 1e-300), u4 = uniform01(rng);
        Vec3 g(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2),
               std::sqrt(-2.0 * std::log(u1)) * std::sin(2.0 * M_PI * u2),
               std::sqrt(-2.0 * std::log(u3)) * std::cos(2.0 * M_PI * u4));
        if (g.norm() < 1e-12) continue;
        spec.normal = g.normalized();
        spec.offset = -0.3 + 0.6 * uniform01(rng);
      } else {
        spec.center = centers[static_cast<size_t>(uniform01(rng) * centers.size()) %
                              centers.size()];
        spec.radius_fraction = 0.2 + 0.5 * uniform01(rng);
      }
      try {
        CutResult result = kind == CutSpec::Kind::plane ? plane_cut(mesh, spec)
                                                        : ball_cut(mesh, spec);
        suite.emplace_back(spec, std::move(result));
        made = true;
      } catch (const DegenerateCut& e) {
        SPECTRALIGN_LOG_DEBUG("cut %d attempt %d rejected: %s", cut, attempt, e.what());
      }
    }
    if (!made)
      throw GenerationExhausted("could not draw a valid cut " + std::to_string(cut) +
                                " in 20 attempts");
  }
  return suite;
}

}  // namespace spectralign
