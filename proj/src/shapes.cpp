#include "spectralign/shapes.hpp"

#include <cmath>
#include <map>

namespace spectralign {

TriMesh make_tetrahedron() {
  TriMesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

TriMesh make_grid(int nx, int ny, double width, double height) {
  TriMesh m;
  m.vertices.reserve(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.vertices.emplace_back(width * i / (nx - 1), height * j / (ny - 1), 0.0);
  auto at = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  return m;
}

TriMesh make_icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = m.n_vertices();
      m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& [a, b, c] : m.faces) {
      int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  for (auto& v : m.vertices) v = radius * v.normalized();
  return m;
}

namespace {

TriMesh uv_sphere_topology(int n_theta, int n_phi) {
  TriMesh m;
  m.vertices.reserve(n_theta * n_phi + 2);
  m.vertices.emplace_back(0, 0, 1);  // north pole = 0
  for (int j = 0; j < n_phi; ++j) {
    const double phi = M_PI * (j + 1) / (n_phi + 1);
    for (int i = 0; i < n_theta; ++i) {
      const double theta = 2.0 * M_PI * i / n_theta;
      m.vertices.emplace_back(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                              std::cos(phi));
    }
  }
  m.vertices.emplace_back(0, 0, -1);  // south pole
  const int south = m.n_vertices() - 1;
  auto ring = [n_theta](int j, int i) { return 1 + j * n_theta + (i % n_theta); };

  for (int i = 0; i < n_theta; ++i) m.faces.push_back({0, ring(0, i), ring(0, i + 1)});
  for (int j = 0; j + 1 < n_phi; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      int a = ring(j, i), b = ring(j, i + 1), c = ring(j + 1, i), d = ring(j + 1, i + 1);
      m.faces.push_back({a, c, d});
      m.faces.push_back({a, d, b});
    }
  }
  for (int i = 0; i < n_theta; ++i)
    m.faces.push_back({south, ring(n_phi - 1, i + 1), ring(n_phi - 1, i)});
  return m;
}

}  // namespace

TriMesh make_uv_sphere(int n_theta, int n_phi, double radius) {
  TriMesh m = uv_sphere_topology(n_theta, n_phi);
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriMesh make_test_blob(int n_theta, int n_phi) {
  struct Bump {
    Vec3 dir;
    double amplitude;
    double width;  // radians
  };
  // six protrusions, deliberately unequal so no two limbs are isometric
  const Bump bumps[] = {
      {Vec3(0.25, 0.12, 0.96).normalized(), 0.55, 0.30},    // head
      {Vec3(0.95, 0.28, 0.12).normalized(), 0.85, 0.22},    // long arm
      {Vec3(-0.92, 0.35, 0.10).normalized(), 0.65, 0.18},   // short arm
      {Vec3(0.40, -0.25, -0.88).normalized(), 1.05, 0.26},  // long leg
      {Vec3(-0.45, -0.18, -0.86).normalized(), 0.80, 0.21}, // short leg
      {Vec3(0.05, -0.98, 0.15).normalized(), 0.50, 0.15},   // tail
  };
  const Vec3 semi = Vec3(1.0, 0.85, 0.70);  // ellipsoid semi-axes

  TriMesh m = uv_sphere_topology(n_theta, n_phi);
  for (auto& v : m.vertices) {
    const Vec3 u = v.normalized();
    double inv2 = (u[0] / semi[0]) * (u[0] / semi[0]) + (u[1] / semi[1]) * (u[1] / semi[1]) +
                  (u[2] / semi[2]) * (u[2] / semi[2]);
    double r = 1.0 / std::sqrt(inv2);
    for (const auto& b : bumps) {
      double angle = std::acos(std::clamp(u.dot(b.dir), -1.0, 1.0));
      r += b.amplitude * std::exp(-0.5 * (angle / b.width) * (angle / b.width));
    }
    v = r * u;
  }
  return m;
}

}  // namespace spectralign
