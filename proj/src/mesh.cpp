#include "spectralign/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "spectralign/errors.hpp"

namespace spectralign {

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Token reader that skips '#' comments.
struct Tokenizer {
  std::istream& in;
  explicit Tokenizer(std::istream& s) : in(s) {}

  bool next(std::string& tok) {
    while (in >> tok) {
      if (!tok.empty() && tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return true;
    }
    return false;
  }

  int next_int(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(std::string("unexpected end of file reading ") + what);
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || errno != 0)
      throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'");
    return static_cast<int>(v);
  }

  double next_double(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(std::string("unexpected end of file reading ") + what);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno != 0)
      throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'");
    return v;
  }
};

TriMesh load_off(std::istream& in) {
  Tokenizer tok(in);
  std::string header;
  if (!tok.next(header) || header != "OFF") throw ParseError("missing OFF header");
  int nv = tok.next_int("vertex count");
  int nf = tok.next_int("face count");
  tok.next_int("edge count");
  if (nv < 0 || nf < 0) throw ParseError("negative counts in OFF header");

  TriMesh mesh;
  mesh.vertices.resize(nv);
  for (int i = 0; i < nv; ++i)
    for (int c = 0; c < 3; ++c) mesh.vertices[i][c] = tok.next_double("vertex coordinate");
  mesh.faces.resize(nf);
  for (int f = 0; f < nf; ++f) {
    int deg = tok.next_int("face degree");
    if (deg != 3) throw ParseError("only triangle faces are supported");
    for (int c = 0; c < 3; ++c) mesh.faces[f][c] = tok.next_int("face index");
  }
  return mesh;
}

int parse_obj_index(const std::string& field, int n_vertices) {
  // "i", "i/t", "i//n", "i/t/n" — only the vertex index is used.
  auto slash = field.find('/');
  std::string head = slash == std::string::npos ? field : field.substr(0, slash);
  errno = 0;
  char* end = nullptr;
  long v = std::strtol(head.c_str(), &end, 10);
  if (end == head.c_str() || *end != '\0' || errno != 0)
    throw ParseError("bad OBJ face index '" + field + "'");
  if (v <= 0) throw ParseError("OBJ face indices are 1-based and positive, got '" + field + "'");
  if (v > n_vertices) throw ParseError("OBJ face index out of range: " + head);
  return static_cast<int>(v - 1);
}

TriMesh load_obj(std::istream& in) {
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) throw ParseError("malformed OBJ vertex line: " + line);
      mesh.vertices.push_back(p);
    } else if (kind == "f") {
      std::vector<std::string> fields;
      std::string fld;
      while (ls >> fld) fields.push_back(fld);
      if (fields.size() != 3) throw ParseError("only triangle faces are supported: " + line);
      std::array<int, 3> face{};
      for (int c = 0; c < 3; ++c) face[c] = parse_obj_index(fields[c], mesh.n_vertices());
      mesh.faces.push_back(face);
    }
    // normals, texcoords, groups, materials are ignored
  }
  return mesh;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  int count = 0;
  std::vector<PlyProperty> props;
};

TriMesh load_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw ParseError("missing ply magic");

  std::vector<PlyElement> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = (fmt == "ascii");
      if (!ascii) throw ParseError("only ascii PLY is supported");
    } else if (kw == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      elements.push_back(el);
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError("property before element in PLY header");
      std::string type;
      ls >> type;
      PlyProperty prop;
      if (type == "list") {
        std::string count_t, val_t;
        ls >> count_t >> val_t >> prop.name;
        prop.is_list = true;
      } else {
        ls >> prop.name;
      }
      elements.back().props.push_back(prop);
    } else if (kw == "end_header") {
      break;
    } else {
      throw ParseError("unknown PLY header keyword: " + kw);
    }
  }

  TriMesh mesh;
  Tokenizer tok(in);
  for (const auto& el : elements) {
    if (el.name == "vertex") {
      int ix = -1, iy = -1, iz = -1;
      for (size_t p = 0; p < el.props.size(); ++p) {
        if (el.props[p].name == "x") ix = static_cast<int>(p);
        if (el.props[p].name == "y") iy = static_cast<int>(p);
        if (el.props[p].name == "z") iz = static_cast<int>(p);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw ParseError("PLY vertex element lacks x/y/z");
      mesh.vertices.resize(el.count);
      for (int i = 0; i < el.count; ++i) {
        for (size_t p = 0; p < el.props.size(); ++p) {
          double v = tok.next_double("vertex property");
          if (static_cast<int>(p) == ix) mesh.vertices[i][0] = v;
          if (static_cast<int>(p) == iy) mesh.vertices[i][1] = v;
          if (static_cast<int>(p) == iz) mesh.vertices[i][2] = v;
        }
      }
    } else if (el.name == "face") {
      int list_at = -1;
      for (size_t p = 0; p < el.props.size(); ++p) {
        if (el.props[p].is_list &&
            (el.props[p].name == "vertex_indices" || el.props[p].name == "vertex_index"))
          list_at = static_cast<int>(p);
      }
      if (list_at < 0) throw ParseError("PLY face element lacks vertex_indices");
      mesh.faces.resize(el.count);
      for (int f = 0; f < el.count; ++f) {
        for (size_t p = 0; p < el.props.size(); ++p) {
          if (static_cast<int>(p) == list_at) {
            int deg = tok.next_int("face degree");
            if (deg != 3) throw ParseError("only triangle faces are supported");
            for (int c = 0; c < 3; ++c) mesh.faces[f][c] = tok.next_int("face index");
          } else {
            tok.next_double("face property");
          }
        }
      }
    } else {
      // skip unknown element payload (scalar properties only)
      for (int i = 0; i < el.count; ++i)
        for (size_t p = 0; p < el.props.size(); ++p) tok.next_double("skipped property");
    }
  }
  return mesh;
}

}  // namespace

VertexSet::VertexSet(std::vector<int> idx) : indices(std::move(idx)) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
}

bool VertexSet::contains(int v) const {
  return std::binary_search(indices.begin(), indices.end(), v);
}

void VertexSet::check_range(int n_vertices) const {
  if (!indices.empty() && (indices.front() < 0 || indices.back() >= n_vertices))
    throw std::out_of_range("vertex set index out of range");
}

double TriMesh::bbox_diagonal() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

double TriMesh::face_area(int f) const {
  const auto& [i, j, k] = faces[f];
  return 0.5 * (vertices[j] - vertices[i]).cross(vertices[k] - vertices[i]).norm();
}

void TriMesh::validate() const {
  const int nv = n_vertices();
  const double area_floor = 1e-12 * bbox_diagonal() * bbox_diagonal();
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(faces.size() * 3);

  for (int f = 0; f < n_faces(); ++f) {
    const auto& face = faces[f];
    for (int c = 0; c < 3; ++c) {
      if (face[c] < 0 || face[c] >= nv)
        throw ParseError("face " + std::to_string(f) + " references vertex " +
                         std::to_string(face[c]) + " outside [0, " + std::to_string(nv) + ")");
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      throw DegenerateFace("face " + std::to_string(f) + " repeats a vertex index");
    if (!(face_area(f) > area_floor))
      throw DegenerateFace("face " + std::to_string(f) + " is degenerate (area " +
                           std::to_string(face_area(f)) + ")");
    for (int c = 0; c < 3; ++c) {
      int count = ++edge_count[edge_key(face[c], face[(c + 1) % 3])];
      if (count > 2)
        throw NonManifold("edge (" + std::to_string(face[c]) + ", " +
                          std::to_string(face[(c + 1) % 3]) + ") has more than 2 faces");
    }
  }
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path);
  const std::string ext = lower_ext(path);
  TriMesh mesh;
  if (ext == "off")
    mesh = load_off(in);
  else if (ext == "obj")
    mesh = load_obj(in);
  else if (ext == "ply")
    mesh = load_ply(in);
  else
    throw ParseError("unsupported mesh extension: " + path);
  mesh.validate();
  return mesh;
}

void save_mesh_off(const TriMesh& mesh, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IOError("cannot open " + path + " for writing");
  std::fprintf(f, "OFF\n%d %d 0\n", mesh.n_vertices(), mesh.n_faces());
  for (const auto& v : mesh.vertices)
    std::fprintf(f, "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
  for (const auto& face : mesh.faces)
    std::fprintf(f, "3 %d %d %d\n", face[0], face[1], face[2]);
  if (std::fclose(f) != 0) throw IOError("write failed for " + path);
}

void save_mesh_with_scalar(const TriMesh& mesh, const Eigen::VectorXd& field,
                           const std::string& path) {
  if (field.size() != mesh.n_vertices())
    throw std::invalid_argument("scalar field length must equal vertex count");
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  const double span = hi - lo;

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IOError("cannot open " + path + " for writing");
  std::fprintf(f,
               "ply\nformat ascii 1.0\nelement vertex %d\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\n"
               "element face %d\nproperty list uchar int vertex_indices\nend_header\n",
               mesh.n_vertices(), mesh.n_faces());
  const auto& cmap = colormap_table();
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    double t = span > 0 ? (field[i] - lo) / span : 0.0;
    int bin = std::min(255, std::max(0, static_cast<int>(t * 255.0 + 0.5)));
    const auto& rgb = cmap[bin];
    const Vec3& v = mesh.vertices[i];
    std::fprintf(f, "%.9g %.9g %.9g %d %d %d\n", v[0], v[1], v[2], rgb[0], rgb[1], rgb[2]);
  }
  for (const auto& face : mesh.faces)
    std::fprintf(f, "3 %d %d %d\n", face[0], face[1], face[2]);
  if (std::fclose(f) != 0) throw IOError("write failed for " + path);
}

VertexSet boundary_vertices(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(mesh.faces.size() * 3);
  for (const auto& face : mesh.faces)
    for (int c = 0; c < 3; ++c) ++edge_count[edge_key(face[c], face[(c + 1) % 3])];

  std::vector<int> on_boundary;
  for (const auto& [key, count] : edge_count) {
    if (count == 1) {
      on_boundary.push_back(static_cast<int>(key >> 32));
      on_boundary.push_back(static_cast<int>(key & 0xffffffffu));
    }
  }
  return VertexSet(std::move(on_boundary));
}

double total_area(const TriMesh& mesh) {
  double area = 0.0;
  for (int f = 0; f < mesh.n_faces(); ++f) area += mesh.face_area(f);
  return area;
}

namespace {

std::vector<std::vector<std::pair<int, double>>> edge_graph(const TriMesh& mesh) {
  std::vector<std::vector<std::pair<int, double>>> adj(mesh.n_vertices());
  std::unordered_map<std::uint64_t, bool> seen;
  seen.reserve(mesh.faces.size() * 3);
  for (const auto& face : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      int a = face[c], b = face[(c + 1) % 3];
      auto [it, inserted] = seen.emplace(edge_key(a, b), true);
      if (!inserted) continue;
      double w = (mesh.vertices[a] - mesh.vertices[b]).norm();
      adj[a].emplace_back(b, w);
      adj[b].emplace_back(a, w);
    }
  }
  return adj;
}

Eigen::VectorXd dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj,
                         int source) {
  const int n = static_cast<int>(adj.size());
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

}  // namespace

Eigen::VectorXd graph_geodesics(const TriMesh& mesh, int source) {
  if (source < 0 || source >= mesh.n_vertices())
    throw std::out_of_range("geodesic source out of range");
  return dijkstra(edge_graph(mesh), source);
}

std::vector<int> farthest_point_samples(const TriMesh& mesh, int n, std::uint64_t seed) {
  const int nv = mesh.n_vertices();
  if (n < 0 || n > nv) throw std::invalid_argument("sample count exceeds vertex count");
  if (n == 0) return {};

  auto adj = edge_graph(mesh);
  std::vector<int> samples;
  samples.reserve(n);
  std::vector<char> chosen(nv, 0);

  int first = static_cast<int>(seed % static_cast<std::uint64_t>(nv));
  samples.push_back(first);
  chosen[first] = 1;
  Eigen::VectorXd min_dist = dijkstra(adj, first);

  while (static_cast<int>(samples.size()) < n) {
    int best = -1;
    double best_d = -1.0;
    for (int v = 0; v < nv; ++v) {
      if (chosen[v]) continue;
      if (min_dist[v] > best_d) {
        best_d = min_dist[v];
        best = v;
      }
    }
    samples.push_back(best);
    chosen[best] = 1;
    min_dist = min_dist.cwiseMin(dijkstra(adj, best));
  }
  return samples;
}

std::uint64_t mesh_checksum(const TriMesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const char* s) {
    for (; *s; ++s) {
      h ^= static_cast<unsigned char>(*s);
      h *= 1099511628211ull;
    }
  };
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    mix(buf);
  }
  for (const auto& face : mesh.faces) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", face[0], face[1], face[2]);
    mix(buf);
  }
  return h;
}

}  // namespace spectralign
