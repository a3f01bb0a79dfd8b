#include "mpsawave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace mpsaw {

namespace {

// One cell described by its vertices plus its faces as vertex loops.
struct ProtoCell {
  std::vector<int> vertices;
  std::vector<std::vector<int>> face_loops;
};

Vec3 newell_normal(const std::vector<Vec3>& loop) {
  Vec3 n = Vec3::Zero();
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vec3& a = loop[i];
    const Vec3& b = loop[(i + 1) % m];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return 0.5 * n;  // length equals the polygon area
}

// Area and centroid of a planar polygon via a fan around the vertex mean.
void polygon_geometry(const std::vector<Vec3>& loop, double& area, Vec3& centroid,
                      Vec3& unit_normal) {
  Vec3 an = newell_normal(loop);
  area = an.norm();
  if (area <= 0.0) throw MeshError("degenerate face (zero area)");
  unit_normal = an / area;

  Vec3 mean = Vec3::Zero();
  for (const auto& p : loop) mean += p;
  mean /= static_cast<double>(loop.size());

  Vec3 c = Vec3::Zero();
  double asum = 0.0;
  const int m = static_cast<int>(loop.size());
  for (int i = 0; i < m; ++i) {
    const Vec3& a = loop[i];
    const Vec3& b = loop[(i + 1) % m];
    const double tri = 0.5 * ((a - mean).cross(b - mean)).dot(unit_normal);
    c += tri * (mean + a + b) / 3.0;
    asum += tri;
  }
  centroid = c / asum;
}

Grid assemble_grid(int dim, std::vector<Vec3> verts, const std::vector<ProtoCell>& pcells,
                   GridRecipe recipe, double spacing) {
  Grid g;
  g.dim = dim;
  g.vertices = std::move(verts);
  g.recipe = recipe;
  g.spacing = spacing;
  g.cells.resize(pcells.size());

  std::map<std::vector<int>, int> face_of_key;
  for (int c = 0; c < static_cast<int>(pcells.size()); ++c) {
    g.cells[c].vertices = pcells[c].vertices;
    for (const auto& loop : pcells[c].face_loops) {
      std::vector<int> key = loop;
      std::sort(key.begin(), key.end());
      auto it = face_of_key.find(key);
      if (it == face_of_key.end()) {
        Face f;
        f.vertices = loop;
        f.cells = {c, -1};
        const int fid = g.num_faces();
        face_of_key.emplace(std::move(key), fid);
        g.faces.push_back(std::move(f));
        g.cells[c].faces.push_back(fid);
      } else {
        Face& f = g.faces[it->second];
        if (f.cells[1] != -1) throw MeshError("face shared by more than two cells");
        f.cells[1] = c;
        g.cells[c].faces.push_back(it->second);
      }
    }
  }

  // Face geometry; normals oriented outward from the primary cell.
  for (auto& f : g.faces) {
    if (dim == 2) {
      const Vec3& a = g.vertices[f.vertices[0]];
      const Vec3& b = g.vertices[f.vertices[1]];
      const Vec3 t = b - a;
      f.measure = t.norm();
      if (f.measure <= 0.0) throw MeshError("degenerate edge");
      f.center = 0.5 * (a + b);
      f.normal = Vec3(t.y(), -t.x(), 0.0) / f.measure;
    } else {
      std::vector<Vec3> loop;
      loop.reserve(f.vertices.size());
      for (int v : f.vertices) loop.push_back(g.vertices[v]);
      polygon_geometry(loop, f.measure, f.center, f.normal);
    }
    Vec3 pmean = Vec3::Zero();
    for (int v : g.cells[f.cells[0]].vertices) pmean += g.vertices[v];
    pmean /= static_cast<double>(g.cells[f.cells[0]].vertices.size());
    if (f.normal.dot(f.center - pmean) < 0.0) {
      f.normal = -f.normal;
      std::reverse(f.vertices.begin(), f.vertices.end());
    }
    f.boundary = (f.cells[1] < 0);
  }

  // Cell volume and centroid from the divergence theorem over face fans.
  for (int c = 0; c < g.num_cells(); ++c) {
    Cell& K = g.cells[c];
    Vec3 x0 = Vec3::Zero();
    for (int v : K.vertices) x0 += g.vertices[v];
    x0 /= static_cast<double>(K.vertices.size());

    double vol = 0.0;
    Vec3 cen = Vec3::Zero();
    for (int fid : K.faces) {
      const Face& f = g.faces[fid];
      const double s = (f.cells[0] == c) ? 1.0 : -1.0;
      if (dim == 2) {
        const Vec3& a = g.vertices[f.vertices[0]];
        const Vec3& b = g.vertices[f.vertices[1]];
        const double tri = 0.5 * s * ((a - x0).x() * (b - x0).y() - (a - x0).y() * (b - x0).x());
        vol += tri;
        cen += tri * (x0 + a + b) / 3.0;
      } else {
        const int m = static_cast<int>(f.vertices.size());
        for (int i = 0; i < m; ++i) {
          const Vec3& a = g.vertices[f.vertices[i]];
          const Vec3& b = g.vertices[f.vertices[(i + 1) % m]];
          const double tet = s * (a - x0).cross(b - x0).dot(f.center - x0) / 6.0;
          vol += tet;
          cen += tet * (x0 + a + b + f.center) / 4.0;
        }
      }
    }
    if (vol <= 0.0) throw MeshError("non-positive cell volume");
    K.volume = vol;
    K.center = cen / vol;
  }

  // Vertex adjacency and the stencil sets T_f, F~_f.
  g.vertex_cells.assign(g.num_vertices(), {});
  g.vertex_faces.assign(g.num_vertices(), {});
  for (int c = 0; c < g.num_cells(); ++c)
    for (int v : g.cells[c].vertices) g.vertex_cells[v].push_back(c);
  for (int f = 0; f < g.num_faces(); ++f)
    for (int v : g.faces[f].vertices) g.vertex_faces[v].push_back(f);

  g.cells_near_face.assign(g.num_faces(), {});
  g.bfaces_near_face.assign(g.num_faces(), {});
  for (int f = 0; f < g.num_faces(); ++f) {
    std::set<int> tf;
    std::set<int> bf;
    for (int v : g.faces[f].vertices) {
      tf.insert(g.vertex_cells[v].begin(), g.vertex_cells[v].end());
      for (int fb : g.vertex_faces[v])
        if (g.faces[fb].boundary) bf.insert(fb);
    }
    g.cells_near_face[f].assign(tf.begin(), tf.end());
    g.bfaces_near_face[f].assign(bf.begin(), bf.end());
  }

  g.validate();
  return g;
}

int lattice_id(int i, int j, int k, int nx, int ny) {
  return i + (nx + 1) * (j + (ny + 1) * k);
}

std::vector<Vec3> lattice_vertices(const Box& box, int dim, int nx, int ny, int nz) {
  std::vector<Vec3> verts;
  const Vec3 ext = box.hi - box.lo;
  verts.reserve(static_cast<size_t>(nx + 1) * (ny + 1) * (dim == 3 ? nz + 1 : 1));
  const int kmax = (dim == 3) ? nz : 0;
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        verts.emplace_back(box.lo.x() + ext.x() * i / nx, box.lo.y() + ext.y() * j / ny,
                           dim == 3 ? box.lo.z() + ext.z() * k / nz : 0.0);
  return verts;
}

void check_box(const Box& box, int dim) {
  for (int a = 0; a < dim; ++a)
    if (!(box.hi[a] - box.lo[a] > 0.0))
      throw std::invalid_argument("domain box must have positive extent in every axis");
}

double grid_spacing(const Box& box, int dim, const std::array<int, 3>& n) {
  double h = 0.0;
  for (int a = 0; a < dim; ++a) h = std::max(h, (box.hi[a] - box.lo[a]) / n[a]);
  return h;
}

}  // namespace

double Grid::domain_measure() const {
  // Compensated summation: the partition check is tighter than what naive
  // accumulation over ~10^6 cells guarantees.
  double m = 0.0, comp = 0.0;
  for (const auto& c : cells) {
    const double y = c.volume - comp;
    const double t = m + y;
    comp = (t - m) - y;
    m = t;
  }
  return m;
}

std::vector<int> Grid::boundary_faces() const {
  std::vector<int> out;
  for (int f = 0; f < num_faces(); ++f)
    if (faces[f].boundary) out.push_back(f);
  return out;
}

void Grid::validate() const {
  const double box_measure = [&] {
    double m = 1.0;
    for (int a = 0; a < dim; ++a) m *= recipe.box.hi[a] - recipe.box.lo[a];
    return m;
  }();
  if (std::abs(domain_measure() - box_measure) > 1e-12 * box_measure)
    throw MeshError("cell volumes do not partition the domain");

  for (int f = 0; f < num_faces(); ++f) {
    const Face& fc = faces[f];
    if (fc.cells[0] < 0) throw MeshError("face without primary cell");
    if (fc.boundary != (fc.cells[1] < 0)) throw MeshError("inconsistent boundary tag");
    if (std::abs(fc.normal.norm() - 1.0) > 1e-12) throw MeshError("non-unit face normal");
    if (cells_near_face[f].empty()) throw MeshError("empty face stencil T_f");
  }

  for (int c = 0; c < num_cells(); ++c) {
    Vec3 closure = Vec3::Zero();
    double scale = 0.0;
    for (int fid : cells[c].faces) {
      const Face& f = faces[fid];
      closure += orientation(c, fid) * f.measure * f.normal;
      scale += f.measure;
      if (!std::binary_search(cells_near_face[fid].begin(), cells_near_face[fid].end(), c))
        throw MeshError("cell missing from its own face stencil");
    }
    if (closure.norm() > 1e-12 * scale) throw MeshError("cell is not geometrically closed");
  }
}

Grid build_cartesian_grid(const Box& box, const std::vector<int>& cells_per_axis) {
  const int dim = static_cast<int>(cells_per_axis.size());
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  check_box(box, dim);
  for (int n : cells_per_axis)
    if (n < 1) throw std::invalid_argument("cell counts must be positive");

  const int nx = cells_per_axis[0], ny = cells_per_axis[1];
  const int nz = dim == 3 ? cells_per_axis[2] : 1;
  auto verts = lattice_vertices(box, dim, nx, ny, nz);

  std::vector<ProtoCell> pcells;
  if (dim == 2) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int v00 = lattice_id(i, j, 0, nx, ny), v10 = lattice_id(i + 1, j, 0, nx, ny);
        const int v11 = lattice_id(i + 1, j + 1, 0, nx, ny), v01 = lattice_id(i, j + 1, 0, nx, ny);
        ProtoCell pc;
        pc.vertices = {v00, v10, v11, v01};
        pc.face_loops = {{v00, v10}, {v10, v11}, {v11, v01}, {v01, v00}};
        pcells.push_back(std::move(pc));
      }
  } else {
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          auto id = [&](int di, int dj, int dk) {
            return lattice_id(i + di, j + dj, k + dk, nx, ny);
          };
          const int a = id(0, 0, 0), b = id(1, 0, 0), c = id(1, 1, 0), d = id(0, 1, 0);
          const int e = id(0, 0, 1), f = id(1, 0, 1), gg = id(1, 1, 1), h = id(0, 1, 1);
          ProtoCell pc;
          pc.vertices = {a, b, c, d, e, f, gg, h};
          pc.face_loops = {{a, b, c, d}, {e, f, gg, h}, {a, b, f, e},
                           {d, c, gg, h}, {a, d, h, e}, {b, c, gg, f}};
          pcells.push_back(std::move(pc));
        }
  }

  GridRecipe recipe{GridKind::Cartesian, box, dim, {nx, ny, nz}, false};
  return assemble_grid(dim, std::move(verts), pcells, recipe, grid_spacing(box, dim, {nx, ny, nz}));
}

namespace {

Grid build_simplex_from_counts(const Box& box, int dim, int nx, int ny, int nz) {
  auto verts = lattice_vertices(box, dim, nx, ny, nz);
  std::vector<ProtoCell> pcells;

  if (dim == 2) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int v00 = lattice_id(i, j, 0, nx, ny), v10 = lattice_id(i + 1, j, 0, nx, ny);
        const int v11 = lattice_id(i + 1, j + 1, 0, nx, ny), v01 = lattice_id(i, j + 1, 0, nx, ny);
        for (auto tri : {std::array<int, 3>{v00, v10, v11}, std::array<int, 3>{v00, v11, v01}}) {
          ProtoCell pc;
          pc.vertices = {tri[0], tri[1], tri[2]};
          pc.face_loops = {{tri[0], tri[1]}, {tri[1], tri[2]}, {tri[2], tri[0]}};
          pcells.push_back(std::move(pc));
        }
      }
  } else {
    // Kuhn split: six tetrahedra per cube sharing the main diagonal.
    constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          auto id = [&](std::array<int, 3> d) {
            return lattice_id(i + d[0], j + d[1], k + d[2], nx, ny);
          };
          for (const auto& p : perms) {
            std::array<int, 3> d0 = {0, 0, 0};
            std::array<int, 3> d1 = d0, d2 = d0;
            d1[p[0]] = 1;
            d2[p[0]] = 1;
            d2[p[1]] = 1;
            const int t0 = id(d0), t1 = id(d1), t2 = id(d2), t3 = id({1, 1, 1});
            ProtoCell pc;
            pc.vertices = {t0, t1, t2, t3};
            pc.face_loops = {{t0, t1, t2}, {t0, t1, t3}, {t0, t2, t3}, {t1, t2, t3}};
            pcells.push_back(std::move(pc));
          }
        }
  }

  GridRecipe recipe{GridKind::Simplex, box, dim, {nx, ny, nz}, false};
  return assemble_grid(dim, std::move(verts), pcells, recipe, grid_spacing(box, dim, {nx, ny, nz}));
}

}  // namespace

Grid build_simplex_grid(const Box& box, double target_size, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  check_box(box, dim);
  if (!(target_size > 0.0)) throw std::invalid_argument("target size must be positive");
  std::array<int, 3> n = {1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    const double ext = box.hi[a] - box.lo[a];
    if (target_size > ext) throw std::invalid_argument("target size exceeds the box extent");
    n[a] = std::max(1, static_cast<int>(std::ceil(ext / target_size - 1e-9)));
  }
  return build_simplex_from_counts(box, dim, n[0], n[1], n[2]);
}

Grid build_prism_grid(const Box& box, const std::vector<int>& cells_per_axis) {
  if (cells_per_axis.size() != 3) throw std::invalid_argument("prism grids are 3D only");
  check_box(box, 3);
  for (int n : cells_per_axis)
    if (n < 1) throw std::invalid_argument("cell counts must be positive");
  const int nx = cells_per_axis[0], ny = cells_per_axis[1], nz = cells_per_axis[2];
  auto verts = lattice_vertices(box, 3, nx, ny, nz);

  std::vector<ProtoCell> pcells;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        auto id = [&](int di, int dj, int dk) {
          return lattice_id(i + di, j + dj, k + dk, nx, ny);
        };
        // Cut along the xz anti-diagonal: x/dx + z/dz = i + k + 1.
        const int a000 = id(0, 0, 0), a100 = id(1, 0, 0), a001 = id(0, 0, 1);
        const int a010 = id(0, 1, 0), a110 = id(1, 1, 0), a011 = id(0, 1, 1);
        const int a101 = id(1, 0, 1), a111 = id(1, 1, 1);
        ProtoCell lo;  // x/dx + z/dz <= i + k + 1
        lo.vertices = {a000, a100, a001, a010, a110, a011};
        lo.face_loops = {{a000, a100, a001},
                         {a010, a110, a011},
                         {a000, a001, a011, a010},
                         {a000, a100, a110, a010},
                         {a100, a110, a011, a001}};
        ProtoCell hi;
        hi.vertices = {a100, a101, a001, a110, a111, a011};
        hi.face_loops = {{a100, a101, a001},
                         {a110, a111, a011},
                         {a100, a110, a111, a101},
                         {a001, a101, a111, a011},
                         {a100, a110, a011, a001}};
        pcells.push_back(std::move(lo));
        pcells.push_back(std::move(hi));
      }

  GridRecipe recipe{GridKind::Prism, box, 3, {nx, ny, nz}, false};
  return assemble_grid(3, std::move(verts), pcells, recipe, grid_spacing(box, 3, {nx, ny, nz}));
}

Grid refine_uniform(const Grid& grid) {
  if (grid.recipe.fractured)
    throw MeshError("refine the unsplit grid, then re-apply the fracture split");
  const auto& r = grid.recipe;
  std::array<int, 3> n = {2 * r.cells_per_axis[0], 2 * r.cells_per_axis[1],
                          2 * r.cells_per_axis[2]};
  switch (r.kind) {
    case GridKind::Cartesian: {
      std::vector<int> counts(n.begin(), n.begin() + r.dim);
      return build_cartesian_grid(r.box, counts);
    }
    case GridKind::Simplex:
      return build_simplex_from_counts(r.box, r.dim, n[0], n[1], r.dim == 3 ? n[2] : 1);
    case GridKind::Prism:
      return build_prism_grid(r.box, {n[0], n[1], n[2]});
  }
  throw MeshError("unknown grid kind");
}

std::pair<Grid, FractureTag> split_fracture_faces(const Grid& grid,
                                                  const std::vector<Vec3>& polygon) {
  if (polygon.size() < 3) throw std::invalid_argument("fracture polygon needs >= 3 vertices");

  Vec3 pn = newell_normal(polygon);
  const double pa = pn.norm();
  if (pa <= 0.0) throw std::invalid_argument("degenerate fracture polygon");
  pn /= pa;
  double diam = 0.0;
  for (const auto& p : polygon) diam = std::max(diam, (p - polygon[0]).norm());
  for (const auto& p : polygon)
    if (std::abs(pn.dot(p - polygon[0])) > 1e-9 * diam)
      throw std::invalid_argument("fracture polygon is not planar");

  // In-plane basis for the point-in-polygon test.
  Vec3 u = (polygon[1] - polygon[0]).normalized();
  Vec3 w = pn.cross(u);
  auto to_plane = [&](const Vec3& p) {
    return Eigen::Vector2d(u.dot(p - polygon[0]), w.dot(p - polygon[0]));
  };
  std::vector<Eigen::Vector2d> poly2;
  poly2.reserve(polygon.size());
  for (const auto& p : polygon) poly2.push_back(to_plane(p));
  auto inside = [&](const Eigen::Vector2d& q) {
    bool in = false;
    const int m = static_cast<int>(poly2.size());
    for (int i = 0, j = m - 1; i < m; j = i++) {
      const auto& pi = poly2[i];
      const auto& pj = poly2[j];
      if ((pi.y() > q.y()) != (pj.y() > q.y()) &&
          q.x() < (pj.x() - pi.x()) * (q.y() - pi.y()) / (pj.y() - pi.y()) + pi.x())
        in = !in;
    }
    return in;
  };

  const double tol = 1e-9 * grid.spacing;
  std::vector<int> on_plane;
  for (int f = 0; f < grid.num_faces(); ++f) {
    const Face& fc = grid.faces[f];
    if (fc.boundary) continue;
    if (std::abs(pn.dot(fc.center - polygon[0])) > tol) continue;
    if (std::abs(std::abs(pn.dot(fc.normal)) - 1.0) > 1e-9) continue;
    if (!inside(to_plane(fc.center))) continue;
    on_plane.push_back(f);
  }
  if (on_plane.empty())
    throw MeshError("no grid faces found on the fracture polygon (mesh/polygon mismatch)");

  Grid g = grid;
  g.recipe.fractured = true;
  FractureTag tag;
  for (int f : on_plane) {
    Face& orig = g.faces[f];
    const int other = orig.cells[1];
    Face twin = orig;
    twin.cells = {other, -1};
    twin.normal = -orig.normal;
    std::reverse(twin.vertices.begin(), twin.vertices.end());
    twin.boundary = true;
    orig.cells[1] = -1;
    orig.boundary = true;
    const int f2 = g.num_faces();
    g.faces.push_back(std::move(twin));
    auto& flist = g.cells[other].faces;
    std::replace(flist.begin(), flist.end(), f, f2);
    tag.pairs.push_back({f, f2});
  }

  // Rebuild vertex adjacency and stencils against the split topology.
  g.vertex_faces.assign(g.num_vertices(), {});
  for (int f = 0; f < g.num_faces(); ++f)
    for (int v : g.faces[f].vertices) g.vertex_faces[v].push_back(f);
  g.cells_near_face.assign(g.num_faces(), {});
  g.bfaces_near_face.assign(g.num_faces(), {});
  for (int f = 0; f < g.num_faces(); ++f) {
    std::set<int> tf;
    std::set<int> bf;
    for (int v : g.faces[f].vertices) {
      tf.insert(g.vertex_cells[v].begin(), g.vertex_cells[v].end());
      for (int fb : g.vertex_faces[v])
        if (g.faces[fb].boundary) bf.insert(fb);
    }
    g.cells_near_face[f].assign(tf.begin(), tf.end());
    g.bfaces_near_face[f].assign(bf.begin(), bf.end());
  }

  g.validate();
  return {std::move(g), std::move(tag)};
}

}  // namespace mpsaw
