#include <doctest.h>

#include <cmath>

#include "spectralign/hamiltonian.hpp"
#include "spectralign/shapes.hpp"

using namespace spectralign;

namespace {

Potential make_potential(const Eigen::VectorXd& raw, Reparam reparam, double c) {
  Potential p;
  p.raw = raw;
  p.reparam = reparam;
  p.c = c;
  return p;
}

Eigen::VectorXd smooth_raw(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 0.8 + 0.3 * std::sin(1.7 * i);
  return v;
}

}  // namespace

TEST_CASE("reparametrizations") {
  Eigen::VectorXd raw(3);
  raw << -2.0, 0.0, 3.0;
  Potential sq = make_potential(raw, Reparam::square, 1.0);
  Eigen::VectorXd q = apply_reparam(sq);
  CHECK(q[0] == doctest::Approx(4.0));
  CHECK(q[1] == doctest::Approx(0.0));
  CHECK(q[2] == doctest::Approx(9.0));
  CHECK(reparam_derivative(sq)[2] == doctest::Approx(6.0));

  Eigen::VectorXd at(3);
  at << 0.0, 20.0, -20.0;
  Potential sat = make_potential(at, Reparam::saturation, 10.0);
  Eigen::VectorXd qs = apply_reparam(sat);
  CHECK(qs[0] == doctest::Approx(10.0));
  CHECK(std::abs(qs[1] - 20.0) < 1e-8);
  CHECK(std::abs(qs[2]) < 1e-8);
  CHECK(reparam_derivative(sat)[0] == doctest::Approx(10.0));
}

TEST_CASE("reparam derivative matches finite differences") {
  Eigen::VectorXd raw(7);
  raw << -2.5, -1.0, -0.3, 0.0, 0.4, 1.1, 2.2;
  const double h = 1e-6;
  for (Reparam r : {Reparam::square, Reparam::saturation}) {
    Potential p = make_potential(raw, r, 10.0);
    Eigen::VectorXd deriv = reparam_derivative(p);
    for (int i = 0; i < raw.size(); ++i) {
      Potential plus = p, minus = p;
      plus.raw[i] += h;
      minus.raw[i] -= h;
      double fd = (apply_reparam(plus)[i] - apply_reparam(minus)[i]) / (2.0 * h);
      double scale = std::max(1.0, std::abs(fd));
      CHECK(std::abs(deriv[i] - fd) < 1e-6 * scale);
    }
  }
}

TEST_CASE("preimage lands on the target inside the range") {
  const double c = 25.0;
  Eigen::VectorXd target(4);
  target << 0.0, 0.5 * c, c, 2.0 * c;
  for (Reparam r : {Reparam::square, Reparam::saturation}) {
    Eigen::VectorXd v = reparam_preimage(target, r, c);
    Potential p = make_potential(v, r, c);
    Eigen::VectorXd q = apply_reparam(p);
    CHECK(q[0] < 1e-3 * c);  // zero target clamps just inside the range
    CHECK(q[1] == doctest::Approx(0.5 * c).epsilon(1e-3));
    CHECK(q[2] == doctest::Approx(c).epsilon(1e-3));
    CHECK(q.minCoeff() >= 0.0);
  }
}

TEST_CASE("zero potential reproduces the plain pencil") {
  TriMesh blob = make_test_blob(16, 12);
  OperatorPair ops = operator_pair(blob, Metric::regular);
  Spectrum plain = smallest_eigenpairs(ops, 8, {});

  Potential zero = make_potential(Eigen::VectorXd::Zero(blob.n_vertices()), Reparam::square, 1.0);
  HamiltonianSpectrum ham = hamiltonian_spectrum(ops, zero, 8, {});
  for (int i = 0; i < 8; ++i) {
    double scale = std::max(1.0, plain.eigenvalues[i]);
    CHECK(std::abs(ham.spectrum.eigenvalues[i] - plain.eigenvalues[i]) < 1e-10 * scale);
  }
}

TEST_CASE("constant potential shifts the spectrum") {
  TriMesh blob = make_test_blob(16, 12);
  for (Metric metric : {Metric::regular, Metric::scale_invariant}) {
    OperatorPair ops = operator_pair(blob, metric);
    Spectrum plain = smallest_eigenpairs(ops, 6, {});
    const double sigma_shift = 2.75;
    Potential shift = make_potential(
        Eigen::VectorXd::Constant(blob.n_vertices(), std::sqrt(sigma_shift)), Reparam::square, 1.0);
    HamiltonianSpectrum ham = hamiltonian_spectrum(ops, shift, 6, {});
    for (int i = 0; i < 6; ++i) {
      double expected = plain.eigenvalues[i] + sigma_shift;
      CHECK(std::abs(ham.spectrum.eigenvalues[i] - expected) <= 1e-8 * expected);
    }
  }
}

TEST_CASE("step potential approximates the dirichlet problem") {
  TriMesh sphere = make_icosphere(4);
  const int n = sphere.n_vertices();
  const int k = 10;

  // half sphere, equator excluded
  std::vector<char> inside(n, 0);
  for (int i = 0; i < n; ++i) inside[i] = sphere.vertices[i][2] > 1e-9;

  // induced submesh for the dirichlet reference
  std::vector<int> to_partial(n, -1);
  TriMesh part;
  for (int i = 0; i < n; ++i) {
    if (inside[i]) {
      to_partial[i] = part.n_vertices();
      part.vertices.push_back(sphere.vertices[i]);
    }
  }
  for (const auto& f : sphere.faces) {
    if (inside[f[0]] && inside[f[1]] && inside[f[2]])
      part.faces.push_back({to_partial[f[0]], to_partial[f[1]], to_partial[f[2]]});
  }
  OperatorPair part_ops = operator_pair(part, Metric::regular);
  VertexSet part_boundary = boundary_vertices(part);
  Spectrum dirichlet = smallest_eigenpairs(part_ops, k, part_boundary);

  // the wall covers everything the dirichlet condition zeroes: the outside
  // and the boundary ring itself
  std::vector<char> in_well(n, 0);
  {
    std::vector<int> from_partial(part.n_vertices());
    for (int i = 0; i < n; ++i)
      if (to_partial[i] >= 0) from_partial[to_partial[i]] = i;
    for (int i = 0; i < part.n_vertices(); ++i)
      in_well[from_partial[i]] = !part_boundary.contains(i);
  }

  OperatorPair full_ops = operator_pair(sphere, Metric::regular);
  const double wall = 1e3 * dirichlet.eigenvalues[k - 1];
  Eigen::VectorXd q_target(n);
  for (int i = 0; i < n; ++i) q_target[i] = in_well[i] ? 0.0 : wall;
  Potential pot = make_potential(q_target.cwiseSqrt(), Reparam::square, wall);
  HamiltonianSpectrum ham = hamiltonian_spectrum(full_ops, pot, k, {});

  for (int i = 0; i < k; ++i) {
    CHECK(std::abs(ham.spectrum.eigenvalues[i] - dirichlet.eigenvalues[i]) <
          0.05 * dirichlet.eigenvalues[i]);
  }

  // eigenfunctions decay outside the well
  for (int i = 0; i < k; ++i) {
    double outside_mass = 0.0;
    for (int j = 0; j < n; ++j)
      if (!in_well[j])
        outside_mass += ham.spectrum.eigenvectors(j, i) * ham.spectrum.eigenvectors(j, i) *
                        full_ops.mass[j];
    CHECK(outside_mass < 0.05);
  }
}

TEST_CASE("gradient of the constant mode") {
  TriMesh sphere = make_icosphere(2);
  OperatorPair ops = operator_pair(sphere, Metric::regular);
  Potential pot =
      make_potential(Eigen::VectorXd::Ones(sphere.n_vertices()), Reparam::square, 1.0);
  // constant q = 1 only shifts, so phi_1 stays constant with lambda_1 = 1
  HamiltonianSpectrum ham = hamiltonian_spectrum(ops, pot, 1, {});
  Eigen::MatrixXd grads = eigenvalue_gradients(ham, ops);
  CHECK(grads.row(0).sum() == doctest::Approx(2.0).epsilon(1e-8));  // q'(1) = 2
  CHECK(grads.minCoeff() >= 0.0);
}

TEST_CASE("eigenvalue gradients match finite differences") {
  TriMesh blob = make_test_blob(16, 12);
  const int n = blob.n_vertices();
  const int k = 5;
  const double h = 1e-5;
  const int probes[] = {0, 7, 33, 60, 101, 150, 193};

  for (Metric metric : {Metric::regular, Metric::scale_invariant}) {
    OperatorPair ops = operator_pair(blob, metric);
    for (Reparam reparam : {Reparam::square, Reparam::saturation}) {
      Potential pot = make_potential(smooth_raw(n), reparam, 4.0);
      HamiltonianSpectrum ham = hamiltonian_spectrum(ops, pot, k + 1, {});

      // skip clustered eigenvalues; their directional derivative is not unique
      const double cluster_gap = 1e-6 * ham.spectrum.eigenvalues[k];
      Eigen::MatrixXd grads = eigenvalue_gradients(ham, ops);

      for (int i = 0; i < k; ++i) {
        const bool clustered =
            (i > 0 && ham.spectrum.eigenvalues[i] - ham.spectrum.eigenvalues[i - 1] < cluster_gap) ||
            (ham.spectrum.eigenvalues[i + 1] - ham.spectrum.eigenvalues[i] < cluster_gap);
        if (clustered) continue;
        Eigen::VectorXd fd(std::size(probes)), an(std::size(probes));
        for (size_t p = 0; p < std::size(probes); ++p) {
          const int j = probes[p];
          Potential plus = pot, minus = pot;
          plus.raw[j] += h;
          minus.raw[j] -= h;
          double up = hamiltonian_spectrum(ops, plus, k + 1, {}).spectrum.eigenvalues[i];
          double dn = hamiltonian_spectrum(ops, minus, k + 1, {}).spectrum.eigenvalues[i];
          fd[p] = (up - dn) / (2.0 * h);
          an[p] = grads(i, j);
        }
        CHECK((an - fd).norm() <= 1e-4 * fd.norm());
      }
    }
  }
}

TEST_CASE("raising the potential raises every eigenvalue") {
  TriMesh blob = make_test_blob(16, 12);
  OperatorPair ops = operator_pair(blob, Metric::regular);
  Potential pot = make_potential(smooth_raw(blob.n_vertices()), Reparam::square, 1.0);
  HamiltonianSpectrum base = hamiltonian_spectrum(ops, pot, 6, {});

  // nonnegative bump around vertex 40
  Potential bumped = pot;
  Eigen::VectorXd q = apply_reparam(pot);
  for (int j = 0; j < blob.n_vertices(); ++j) {
    double d = (blob.vertices[j] - blob.vertices[40]).norm();
    q[j] += 2.0 * std::exp(-8.0 * d * d);
  }
  bumped.raw = q.cwiseSqrt();
  HamiltonianSpectrum up = hamiltonian_spectrum(ops, bumped, 6, {});
  for (int i = 0; i < 6; ++i)
    CHECK(up.spectrum.eigenvalues[i] >= base.spectrum.eigenvalues[i] - 1e-10);
}

TEST_CASE("eigenvalues are continuous in the potential") {
  TriMesh blob = make_test_blob(14, 10);
  OperatorPair ops = operator_pair(blob, Metric::regular);
  Potential pot = make_potential(smooth_raw(blob.n_vertices()), Reparam::saturation, 8.0);
  HamiltonianSpectrum base = hamiltonian_spectrum(ops, pot, 6, {});

  Potential nudged = pot;
  for (int i = 0; i < nudged.raw.size(); ++i) nudged.raw[i] += ((i % 3) - 1) * 1e-6;
  HamiltonianSpectrum moved = hamiltonian_spectrum(ops, nudged, 6, {});
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(moved.spectrum.eigenvalues[i] - base.spectrum.eigenvalues[i]) <=
          1e-4 * (1.0 + base.spectrum.eigenvalues[i]));
  }
}
