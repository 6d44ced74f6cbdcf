#pragma once

#include "spectralign/mesh.hpp"

namespace spectralign {

TriMesh make_tetrahedron();

// (nx x ny) vertex grid in the z=0 plane covering [0,w] x [0,h], quads split
// along the (i,j)->(i+1,j+1) diagonal.
TriMesh make_grid(int nx, int ny, double width = 1.0, double height = 1.0);

// Icosahedron subdivided `subdivisions` times, projected to the sphere.
TriMesh make_icosphere(int subdivisions, double radius = 1.0);

// Longitude/latitude sphere: n_theta azimuth steps, n_phi latitude rings,
// two pole vertices. n_theta*n_phi + 2 vertices.
TriMesh make_uv_sphere(int n_theta, int n_phi, double radius = 1.0);

// Closed genus-0 "creature": an ellipsoid with six radial protrusions of
// distinct lengths and widths (head, four limbs, tail). Deterministic; used
// as the articulated test shape. n_theta*n_phi + 2 vertices.
TriMesh make_test_blob(int n_theta, int n_phi);

}  // namespace spectralign
