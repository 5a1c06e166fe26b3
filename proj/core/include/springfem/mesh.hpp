#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "springfem/errors.hpp"
#include "springfem/types.hpp"

namespace springfem {

// Vertex indices of one simplex. Only the first dim+1 entries are used.
using Simplex = std::array<int, 4>;

// Conforming simplicial mesh: triangles in 2D, tetrahedra in 3D.
//
// Invariants established by the constructor: every element references valid,
// pairwise distinct nodes; every element has strictly positive signed volume
// (negatively oriented input is fixed by swapping the last two vertices);
// all coordinates are finite. A Mesh is immutable after construction.
class Mesh {
public:
  Mesh(int dim, std::vector<Vec> nodes, std::vector<Simplex> elements);

  int dim() const noexcept { return dim_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_elements() const noexcept { return elements_.size(); }

  const Vec& node(std::size_t i) const { return nodes_.at(i); }
  std::span<const Vec> nodes() const noexcept { return nodes_; }

  std::span<const int> element(std::size_t e) const {
    return {elements_.at(e).data(), static_cast<std::size_t>(dim_ + 1)};
  }
  const std::vector<Simplex>& elements() const noexcept { return elements_; }

  // Elements containing node i, ascending.
  std::span<const int> node_elements(std::size_t i) const;

private:
  int dim_;
  std::vector<Vec> nodes_;
  std::vector<Simplex> elements_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<int> incidence_;
};

// Signed volume (area in 2D) of the simplex spanned by the given points.
double signed_volume(int dim, std::span<const Vec> vertices);

// ---------------------------------------------------------------------------
// Boundary
// ---------------------------------------------------------------------------

// Node-wise split into interior (J0) and boundary (J1) index sets. Both are
// sorted ascending and together partition [0, num_nodes).
struct BoundaryPartition {
  std::vector<int> interior;
  std::vector<int> boundary;
  std::vector<std::uint8_t> on_boundary;  // indexed by node

  bool is_boundary(int i) const { return on_boundary.at(i) != 0; }
};

// Facets with exactly one incident element are boundary facets; their nodes
// form J1. Throws MeshError(NonManifold) for a facet shared by > 2 elements.
BoundaryPartition classify_boundary(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Element geometry
// ---------------------------------------------------------------------------

// Volume and the constant P1 basis gradients of one element, in local vertex
// order.
struct ElementGeometry {
  double volume = 0.0;
  std::array<Vec, 4> gradients;
  int num_vertices = 0;

  std::span<const Vec> basis_gradients() const {
    return {gradients.data(), static_cast<std::size_t>(num_vertices)};
  }
};

ElementGeometry element_geometry(const Mesh& mesh, std::size_t e);

// Local position (0..dim) of node `node` inside element e, or -1.
int local_index(const Mesh& mesh, std::size_t e, int node);

// ---------------------------------------------------------------------------
// Springs
// ---------------------------------------------------------------------------

// Unordered node pair sharing at least one element.
struct SpringPair {
  int i = 0;  // i < j
  int j = 0;
  std::vector<int> incident_elements;  // ascending
  bool satisfies_a_pij = false;        // not both endpoints on the boundary
};

// One SpringPair per node pair appearing together in some element, ordered
// lexicographically by (i, j).
std::vector<SpringPair> spring_adjacency(const Mesh& mesh, const BoundaryPartition& partition);
std::vector<SpringPair> spring_adjacency(const Mesh& mesh);

// Angle opposite the pair inside element e: the triangle angle at the third
// vertex in 2D, the dihedral angle along the opposite edge in 3D. Radians in
// (0, pi).
double opposite_angle(const Mesh& mesh, std::size_t e, const SpringPair& pair);

// Opposite angles over all incident elements, in incident_elements order.
std::vector<double> opposite_angles(const Mesh& mesh, const SpringPair& pair);

// ---------------------------------------------------------------------------
// springmesh v1 text format
// ---------------------------------------------------------------------------

Mesh parse_mesh(std::string_view text);
std::string write_mesh(const Mesh& mesh);

Mesh read_mesh_file(const std::string& path);
void write_mesh_file(const Mesh& mesh, const std::string& path);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Unit square, n x n cells, each split along its (0,0)-(1,1) diagonal.
Mesh square_right(int n);
// Parallelogram of 2 n^2 unit equilateral triangles (n rows of n rhombi).
Mesh equilateral(int n);
// Unit cube, n^3 cells, each split into 6 tetrahedra around its main diagonal.
Mesh cube_kuhn(int n);
// Two unit equilateral triangles sharing the edge (0,0)-(1,0).
Mesh patch_equilateral();
// Unit square split by its (0,0)-(1,1) diagonal.
Mesh patch_square();
// Five tetrahedra around the z-axis edge with unit ring and spoke edges; the
// dihedral angle along the axis is exactly 72 degrees.
Mesh patch_regular_tet_ring();
// A single regular tetrahedron with unit edges.
Mesh regular_tetrahedron();

// Moves every interior node by a uniform random offset in
// [-amplitude, amplitude]^d. Redraws up to 20 times if an element inverts or
// degenerates, then throws InputError.
Mesh jitter(const Mesh& mesh, double amplitude, std::uint64_t seed);

// Builds a mesh from a generator expression such as "square_right(8)",
// "patch_equilateral" or "jitter(cube_kuhn(3),0.05,7)".
Mesh generate_mesh(std::string_view spec);

}  // namespace springfem
