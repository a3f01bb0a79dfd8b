#pragma once

#include "mpsawave/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace mpsaw {

/// Axis-aligned box; only the first `dim` coordinates are meaningful.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

enum class GridKind { Cartesian, Simplex, Prism };

/// Construction recipe kept on the grid so uniform refinement can rebuild it
/// at halved spacing.
struct GridRecipe {
  GridKind kind = GridKind::Cartesian;
  Box box;
  int dim = 2;
  std::array<int, 3> cells_per_axis = {1, 1, 1};
  bool fractured = false;
};

struct Cell {
  double volume = 0.0;
  Vec3 center = Vec3::Zero();
  std::vector<int> faces;     ///< F_K
  std::vector<int> vertices;  ///< corner vertices, builder order
};

struct Face {
  double measure = 0.0;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::Zero();      ///< unit, outward from cells[0]
  std::array<int, 2> cells = {-1, -1};
  std::vector<int> vertices;       ///< oriented loop (edge pair in 2D)
  bool boundary = false;
};

/// Matched boundary-face pairs produced by splitting interior faces that lie
/// on a fracture surface. Each side keeps its own outward normal.
struct FractureTag {
  std::vector<std::array<int, 2>> pairs;
};

/// Cell/face/vertex topology with the geometry and stencil sets the
/// multi-point stress discretization needs. Immutable after construction.
class Grid {
 public:
  int dim = 2;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<Vec3> vertices;

  /// Cells sharing at least one vertex with face f.
  std::vector<std::vector<int>> cells_near_face;  ///< T_f, sorted
  /// Boundary faces sharing at least one vertex with face f.
  std::vector<std::vector<int>> bfaces_near_face;  ///< F~_f, sorted

  std::vector<std::vector<int>> vertex_cells;
  std::vector<std::vector<int>> vertex_faces;

  double spacing = 1.0;  ///< characteristic grid size (dx)
  GridRecipe recipe;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }

  /// +1 if the stored face normal points out of cell c, -1 otherwise.
  int orientation(int cell, int face) const {
    return faces[face].cells[0] == cell ? 1 : -1;
  }

  double domain_measure() const;
  std::vector<int> boundary_faces() const;

  /// Verifies the geometric and topological invariants (closure, partition,
  /// unit normals, adjacency counts, stencil symmetry). Throws MeshError.
  void validate() const;
};

/// Structured axis-aligned grid of squares/cubes.
Grid build_cartesian_grid(const Box& box, const std::vector<int>& cells_per_axis);

/// Structured-split simplex grid: every Cartesian cell is cut into 2
/// triangles (2D) or 6 tetrahedra (3D, Kuhn split along the main diagonal).
/// The number of cells per axis is chosen so the spacing is at most
/// target_size.
Grid build_simplex_grid(const Box& box, double target_size, int dim);

/// 3D grid of triangular prisms: every Cartesian cube is cut in two by the
/// plane through its xz anti-diagonal. The cut faces tile planes of the form
/// x/Lx + z/Lz = const, which lets fracture polygons on such planes conform
/// to the mesh.
Grid build_prism_grid(const Box& box, const std::vector<int>& cells_per_axis);

/// Rebuilds the grid from its recipe with all spacing parameters halved.
Grid refine_uniform(const Grid& grid);

/// Duplicates every interior face whose center lies on the (planar, convex)
/// polygon into two boundary faces, one per side, and updates adjacency so
/// each side sees only its own copy.
std::pair<Grid, FractureTag> split_fracture_faces(const Grid& grid,
                                                  const std::vector<Vec3>& polygon);

}  // namespace mpsaw
