#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <Eigen/Geometry>

#include "spectralign/errors.hpp"
#include "spectralign/mesh.hpp"
#include "spectralign/shapes.hpp"

using namespace spectralign;

namespace {

std::string write_temp(const char* name, const std::string& body) {
  std::string path = std::string("/tmp/spectralign_test_") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

// three collinear vertices spaced 1 apart along x, kept non-degenerate by a
// second row of vertices
TriMesh path_strip() {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0.5, 0.4, 0),
                Vec3(1.5, 0.4, 0)};
  m.faces = {{0, 1, 3}, {1, 4, 3}, {1, 2, 4}};
  return m;
}

}  // namespace

TEST_CASE("load OFF tetrahedron") {
  auto path = write_temp("tetra.off",
                         "OFF\n4 4 6\n"
                         "1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
                         "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n");
  TriMesh m = load_mesh(path);
  CHECK(m.n_vertices() == 4);
  CHECK(m.n_faces() == 4);
  CHECK(boundary_vertices(m).empty());
}

TEST_CASE("OBJ indices are 1-based") {
  auto bad = write_temp("zeroidx.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
  CHECK_THROWS_AS(load_mesh(bad), ParseError);

  auto good = write_temp("good.obj",
                         "v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\n"
                         "f 1//1 2//1 3//1\n");
  TriMesh m = load_mesh(good);
  CHECK(m.n_faces() == 1);
  CHECK(m.vertices[1][0] == doctest::Approx(1.0));
}

TEST_CASE("ascii PLY unit square") {
  auto path = write_temp("square.ply",
                         "ply\nformat ascii 1.0\n"
                         "element vertex 4\n"
                         "property float x\nproperty float y\nproperty float z\n"
                         "element face 2\n"
                         "property list uchar int vertex_indices\n"
                         "end_header\n"
                         "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
                         "3 0 1 2\n3 0 2 3\n");
  TriMesh m = load_mesh(path);
  CHECK(m.n_vertices() == 4);
  CHECK(total_area(m) == doctest::Approx(1.0));
  CHECK(boundary_vertices(m).size() == 4);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS(load_mesh(write_temp("bad.off", "OFF\n3 1 0\n0 0 0\n1 0 0\nxyz 1 0\n3 0 1 2\n")),
                  ParseError);
  // an edge shared by three faces
  CHECK_THROWS_AS(load_mesh(write_temp("nonmanifold.off",
                                       "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n"
                                       "3 0 1 2\n3 0 1 3\n3 0 1 4\n")),
                  NonManifold);
  CHECK_THROWS_AS(load_mesh(write_temp("degenerate.off",
                                       "OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n0.5 0 0\n"
                                       "3 0 1 2\n3 0 1 3\n")),
                  DegenerateFace);
  CHECK_THROWS_AS(load_mesh(write_temp("repeat.off",
                                       "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n")),
                  DegenerateFace);
}

TEST_CASE("boundary vertices of a grid patch") {
  TriMesh grid = make_grid(10, 10);
  VertexSet boundary = boundary_vertices(grid);
  CHECK(boundary.size() == 36);  // perimeter of a 10x10 vertex grid

  // oracle: enumerate edges with a single incident face
  std::map<std::pair<int, int>, int> count;
  for (const auto& f : grid.faces)
    for (int c = 0; c < 3; ++c)
      ++count[std::minmax(f[c], f[(c + 1) % 3])];
  std::set<int> expected;
  for (const auto& [e, n] : count) {
    if (n == 1) {
      expected.insert(e.first);
      expected.insert(e.second);
    }
  }
  CHECK(std::vector<int>(expected.begin(), expected.end()) == boundary.indices);
}

TEST_CASE("total area") {
  TriMesh square = make_grid(2, 2);
  CHECK(total_area(square) == doctest::Approx(1.0));

  TriMesh sphere = make_icosphere(5, 2.0);
  CHECK(std::abs(total_area(sphere) - 16 * M_PI) / (16 * M_PI) < 0.005);

  TriMesh scaled = square;
  for (auto& v : scaled.vertices) v *= 3.0;
  CHECK(total_area(scaled) == doctest::Approx(9.0 * total_area(square)));
}

TEST_CASE("area is invariant under rigid motion") {
  TriMesh blob = make_test_blob(24, 18);
  double before = total_area(blob);
  Eigen::Matrix3d rot =
      Eigen::AngleAxisd(1.234, Vec3(0.3, -0.5, 0.81).normalized()).toRotationMatrix();
  for (auto& v : blob.vertices) v = rot * v + Vec3(4.2, -1.7, 0.9);
  CHECK(std::abs(total_area(blob) - before) / before < 1e-10);
}

TEST_CASE("graph geodesics on a path strip") {
  TriMesh m = path_strip();
  Eigen::VectorXd d = graph_geodesics(m, 0);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(1.0));
  CHECK(d[2] == doctest::Approx(2.0));
}

TEST_CASE("geodesics against a brute-force relaxation oracle") {
  TriMesh grid = make_grid(8, 8);
  const int n = grid.n_vertices();
  Eigen::VectorXd d = graph_geodesics(grid, 0);

  // corner-to-corner bounds
  double diag = std::sqrt(2.0);
  CHECK(d[n - 1] >= diag - 1e-12);
  CHECK(d[n - 1] <= 1.5 * diag);

  // Bellman-Ford style oracle over explicit edges
  std::vector<double> oracle(n, 1e100);
  oracle[0] = 0.0;
  std::vector<std::tuple<int, int, double>> edges;
  for (const auto& f : grid.faces) {
    for (int c = 0; c < 3; ++c) {
      int a = f[c], b = f[(c + 1) % 3];
      edges.emplace_back(a, b, (grid.vertices[a] - grid.vertices[b]).norm());
    }
  }
  for (int pass = 0; pass < n; ++pass)
    for (const auto& [a, b, w] : edges) {
      oracle[b] = std::min(oracle[b], oracle[a] + w);
      oracle[a] = std::min(oracle[a], oracle[b] + w);
    }
  for (int v = 0; v < n; ++v) CHECK(d[v] == doctest::Approx(oracle[v]).epsilon(1e-12));
}

TEST_CASE("geodesics satisfy the triangle inequality") {
  TriMesh blob = make_test_blob(20, 16);
  const int probes[] = {0, 17, 101, 250};
  std::vector<Eigen::VectorXd> dist;
  for (int p : probes) dist.push_back(graph_geodesics(blob, p));
  for (size_t a = 0; a < dist.size(); ++a)
    for (size_t b = 0; b < dist.size(); ++b)
      for (int v : {3, 55, 180, 301})
        CHECK(dist[a][v] <= dist[a][probes[b]] + dist[b][v] + 1e-9);
}

TEST_CASE("disconnected meshes report infinite distance") {
  TriMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                Vec3(5, 5, 5), Vec3(6, 5, 5), Vec3(5, 6, 5)};
  m.faces = {{0, 1, 2}, {3, 4, 5}};
  Eigen::VectorXd d = graph_geodesics(m, 0);
  CHECK(std::isinf(d[3]));
  CHECK(std::isfinite(d[1]));
}

TEST_CASE("farthest point sampling") {
  TriMesh m = path_strip();
  auto one = farthest_point_samples(m, 1, 1);
  CHECK(one == std::vector<int>{1});

  // seeded at the middle of the strip, the second sample is an endpoint;
  // brute force the farthest vertex as the oracle
  auto two = farthest_point_samples(m, 2, 1);
  CHECK(two[0] == 1);
  Eigen::VectorXd from_first = graph_geodesics(m, 1);
  int oracle = 0;
  for (int v = 1; v < m.n_vertices(); ++v)
    if (from_first[v] > from_first[oracle]) oracle = v;
  CHECK(two[1] == oracle);
  bool endpoint = two[1] == 0 || two[1] == 2;
  CHECK(endpoint);

  TriMesh blob = make_test_blob(16, 12);
  auto all = farthest_point_samples(blob, blob.n_vertices(), 7);
  std::set<int> uniq(all.begin(), all.end());
  CHECK(static_cast<int>(uniq.size()) == blob.n_vertices());

  // prefix property
  auto p5 = farthest_point_samples(blob, 5, 3);
  auto p9 = farthest_point_samples(blob, 9, 3);
  CHECK(std::equal(p5.begin(), p5.end(), p9.begin()));
}

TEST_CASE("scalar PLY export") {
  TriMesh grid = make_grid(4, 4);
  const int n = grid.n_vertices();

  auto colors_of = [](const std::string& path, int n_vertices) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line) && line != "end_header") {
    }
    std::set<std::string> colors;
    for (int i = 0; i < n_vertices; ++i) {
      std::getline(in, line);
      auto pos = line.find(' ');
      pos = line.find(' ', pos + 1);
      pos = line.find(' ', pos + 1);
      colors.insert(line.substr(pos + 1));
    }
    return colors;
  };

  std::string p1 = "/tmp/spectralign_test_const.ply";
  save_mesh_with_scalar(grid, Eigen::VectorXd::Constant(n, 3.5), p1);
  CHECK(colors_of(p1, n).size() == 1);

  Eigen::VectorXd half(n);
  for (int i = 0; i < n; ++i) half[i] = i < n / 2 ? 0.0 : 1.0;
  std::string p2 = "/tmp/spectralign_test_half.ply";
  save_mesh_with_scalar(grid, half, p2);
  CHECK(colors_of(p2, n).size() == 2);

  TriMesh back = load_mesh(p2);
  REQUIRE(back.n_vertices() == n);
  REQUIRE(back.n_faces() == grid.n_faces());
  for (int i = 0; i < n; ++i)
    CHECK((back.vertices[i] - grid.vertices[i]).norm() < 1e-6);
}

TEST_CASE("mesh checksum changes with geometry") {
  TriMesh a = make_grid(3, 3);
  TriMesh b = a;
  CHECK(mesh_checksum(a) == mesh_checksum(b));
  b.vertices[4][2] += 1e-9;
  CHECK(mesh_checksum(a) != mesh_checksum(b));
}

TEST_CASE("OFF round trip") {
  TriMesh blob = make_test_blob(12, 9);
  std::string path = "/tmp/spectralign_test_roundtrip.off";
  save_mesh_off(blob, path);
  TriMesh back = load_mesh(path);
  REQUIRE(back.n_vertices() == blob.n_vertices());
  CHECK(mesh_checksum(back) == mesh_checksum(blob));
}
