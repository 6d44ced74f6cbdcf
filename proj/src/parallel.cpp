#include "spectralign/parallel.hpp"

#include <Eigen/Geometry>

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spectralign/errors.hpp"

namespace spectralign::par {

namespace {
std::atomic<int> g_jobs{0};

int resolve_jobs() {
  int j = g_jobs.load();
#ifdef _OPENMP
  if (j <= 0) j = omp_get_max_threads();
#else
  if (j <= 0) j = 1;
#endif
  return j;
}
}  // namespace

void set_jobs(int jobs) { g_jobs.store(jobs); }
int jobs() { return resolve_jobs(); }

void spmv_csr_serial(int rows, const int* outer, const int* inner, const double* vals,
                     const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(rows);
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int p = outer[r]; p < outer[r + 1]; ++p) acc += vals[p] * x[inner[p]];
    y[r] = acc;
  }
}

void spmv_csr(int rows, const int* outer, const int* inner, const double* vals,
              const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  y.resize(rows);
#pragma omp parallel for schedule(static) num_threads(resolve_jobs())
  for (int r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (int p = outer[r]; p < outer[r + 1]; ++p) acc += vals[p] * x[inner[p]];
    y[r] = acc;
  }
}

void spmv_serial(const SpMatRM& S, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  spmv_csr_serial(static_cast<int>(S.rows()), S.outerIndexPtr(), S.innerIndexPtr(), S.valuePtr(),
                  x, y);
}

void spmv(const SpMatRM& S, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  spmv_csr(static_cast<int>(S.rows()), S.outerIndexPtr(), S.innerIndexPtr(), S.valuePtr(), x, y);
}

namespace {

inline void face_geometry_one(const TriMesh& mesh, int f, Eigen::VectorXd& areas,
                              Eigen::MatrixX3d& cots) {
  const auto& face = mesh.faces[f];
  const Vec3& a = mesh.vertices[face[0]];
  const Vec3& b = mesh.vertices[face[1]];
  const Vec3& c = mesh.vertices[face[2]];
  const Vec3 cross = (b - a).cross(c - a);
  const double doubled = cross.norm();
  if (!(doubled > 0.0))
    throw DegenerateFace("zero-area triangle at face " + std::to_string(f));
  areas[f] = 0.5 * doubled;
  // cot of the corner angle = dot / |cross| of the two edges leaving it
  cots(f, 0) = (b - a).dot(c - a) / doubled;
  cots(f, 1) = (c - b).dot(a - b) / doubled;
  cots(f, 2) = (a - c).dot(b - c) / doubled;
}

}  // namespace

void face_geometry_serial(const TriMesh& mesh, Eigen::VectorXd& areas, Eigen::MatrixX3d& cots) {
  areas.resize(mesh.n_faces());
  cots.resize(mesh.n_faces(), 3);
  for (int f = 0; f < mesh.n_faces(); ++f) face_geometry_one(mesh, f, areas, cots);
}

void face_geometry(const TriMesh& mesh, Eigen::VectorXd& areas, Eigen::MatrixX3d& cots) {
  areas.resize(mesh.n_faces());
  cots.resize(mesh.n_faces(), 3);
  const int nf = mesh.n_faces();
  std::atomic<bool> degenerate{false};
#pragma omp parallel for schedule(static) num_threads(resolve_jobs())
  for (int f = 0; f < nf; ++f) {
    try {
      face_geometry_one(mesh, f, areas, cots);
    } catch (const DegenerateFace&) {
      degenerate.store(true);
    }
  }
  if (degenerate.load()) throw DegenerateFace("zero-area triangle");
}

void gradient_table_serial(const Eigen::MatrixXd& phi, const Eigen::VectorXd& mass,
                           const Eigen::VectorXd& qprime, Eigen::MatrixXd& table) {
  const int n = static_cast<int>(phi.rows());
  const int k = static_cast<int>(phi.cols());
  table.resize(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) table(i, j) = mass[j] * phi(j, i) * phi(j, i) * qprime[j];
}

void gradient_table(const Eigen::MatrixXd& phi, const Eigen::VectorXd& mass,
                    const Eigen::VectorXd& qprime, Eigen::MatrixXd& table) {
  const int n = static_cast<int>(phi.rows());
  const int k = static_cast<int>(phi.cols());
  table.resize(k, n);
#pragma omp parallel for schedule(static) num_threads(resolve_jobs())
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) table(i, j) = mass[j] * phi(j, i) * phi(j, i) * qprime[j];
}

void parallel_for(int n, const std::function<void(int)>& body) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_jobs())
  for (int i = 0; i < n; ++i) body(i);
}

}  // namespace spectralign::par
