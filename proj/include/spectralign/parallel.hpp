#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spectralign/mesh.hpp"

namespace spectralign {

using SpMat = Eigen::SparseMatrix<double>;                     // CSC, factorization side
using SpMatRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;  // CSR, product side

// Data-parallel inner loops. Each kernel ships in two variants: the OpenMP
// one used on hot paths and a serial reference the tests compare against.
// Every parallel kernel writes disjoint outputs, so results are identical to
// the serial ones bit for bit regardless of thread count.
namespace par {

// Worker cap for all parallel regions in this library. 0 = hardware default.
void set_jobs(int jobs);
int jobs();

// y = S x
void spmv(const SpMatRM& S, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void spmv_serial(const SpMatRM& S, const Eigen::VectorXd& x, Eigen::VectorXd& y);

// Raw CSR form of the same kernel (a symmetric CSC matrix may pass its own
// arrays here unchanged).
void spmv_csr(int rows, const int* outer, const int* inner, const double* vals,
              const Eigen::VectorXd& x, Eigen::VectorXd& y);
void spmv_csr_serial(int rows, const int* outer, const int* inner, const double* vals,
                     const Eigen::VectorXd& x, Eigen::VectorXd& y);

// Per-face areas and per-corner cotangents (corner c opposite edge (c+1,c+2)).
// Throws DegenerateFace when a zero-area triangle is hit.
void face_geometry(const TriMesh& mesh, Eigen::VectorXd& areas, Eigen::MatrixX3d& cots);
void face_geometry_serial(const TriMesh& mesh, Eigen::VectorXd& areas, Eigen::MatrixX3d& cots);

// G(i, j) = mass(j) * phi(j, i)^2 * qprime(j)
void gradient_table(const Eigen::MatrixXd& phi, const Eigen::VectorXd& mass,
                    const Eigen::VectorXd& qprime, Eigen::MatrixXd& table);
void gradient_table_serial(const Eigen::MatrixXd& phi, const Eigen::VectorXd& mass,
                           const Eigen::VectorXd& qprime, Eigen::MatrixXd& table);

// Runs body(i) for i in [0, n) across up to `jobs()` workers; body instances
// must be independent.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace par
}  // namespace spectralign
