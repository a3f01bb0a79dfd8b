#include "mpsawave/mpsa.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mpsaw {

VecX SparseOp::apply(const VecX& x) const {
  if (x.size() != cols) throw std::invalid_argument("SparseOp::apply: dimension mismatch");
  VecX y = VecX::Zero(rows);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = outer[r]; k < outer[r + 1]; ++k) s += vals[k] * x(inner[k]);
    y(r) = s;
  }
  return y;
}

VecX SparseOp::row(int r) const {
  VecX out = VecX::Zero(cols);
  for (std::size_t k = outer[r]; k < outer[r + 1]; ++k) out(inner[k]) += vals[k];
  return out;
}

namespace {

// CSR skeleton whose row r holds one D-column block per stencil member.
SparseOp make_pattern(int nrows_blocks, int ncols, int dim,
                      const std::vector<std::vector<int>>& stencil,
                      const std::vector<int>& col_of_member) {
  SparseOp op;
  op.rows = nrows_blocks * dim;
  op.cols = ncols;
  op.outer.assign(op.rows + 1, 0);
  for (int b = 0; b < nrows_blocks; ++b) {
    const std::size_t n = stencil[b].size() * dim;
    for (int i = 0; i < dim; ++i) op.outer[b * dim + i + 1] = n;
  }
  for (int r = 0; r < op.rows; ++r) op.outer[r + 1] += op.outer[r];
  op.inner.resize(op.outer.back());
  op.vals.assign(op.outer.back(), 0.0);
  for (int b = 0; b < nrows_blocks; ++b)
    for (int i = 0; i < dim; ++i) {
      std::size_t k = op.outer[b * dim + i];
      for (int member : stencil[b])
        for (int c = 0; c < dim; ++c) op.inner[k++] = col_of_member[member] * dim + c;
    }
  return op;
}

int stencil_pos(const std::vector<int>& stencil, int member) {
  auto it = std::lower_bound(stencil.begin(), stencil.end(), member);
  return static_cast<int>(it - stencil.begin());
}

// Traction coefficients: row i maps vec(G) to (C:G . n)_i.
MatX normal_hooke(const StiffnessTensor& C, const Vec3& normal, int d) {
  MatX N = MatX::Zero(d, d * d);
  const MatX& m = C.matrix();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) N.row(i) += normal[j] * m.row(i * d + j);
  return N;
}

// Coefficients of the divergence-free flux augmentation
//   alpha (tr(G) n - G^T n),
// the traction of the null tensor alpha (d_ij d_kl - d_il d_kj). For constant
// alpha its divergence vanishes for every displacement field, and it
// annihilates rank-one gradient jumps a (x) n, so adding it to the
// conservative flux changes neither the discrete balance consistency nor any
// continuous piecewise-linear solution. What it does change is the local
// systems: the Hooke action alone couples the subcell gradients only through
// their symmetric part, which is too rigid on simplex grids.
MatX normal_gauge(double alpha, const Vec3& normal, int d) {
  MatX N = MatX::Zero(d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        double c = 0.0;
        if (k == l) c += normal[i];
        if (l == i) c -= normal[k];
        N(i, k * d + l) = alpha * c;
      }
  return N;
}

// Mean shear coefficient of C, the scale used for the flux augmentation.
double mean_shear(const StiffnessTensor& C, int d) {
  double s = 0.0;
  int count = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) {
        s += C.entry(i, j, i, j);
        ++count;
      }
  return s / count;
}

struct TraceAccum {
  // Good (full-rank) and fallback (rank-deficient) contributions per slot.
  std::vector<int> count_good, count_def;
  std::vector<std::vector<double>> def_cell, def_data;
};

}  // namespace

StressOperators discretize(const Grid& grid, const StiffnessField& field, const BoundarySpec& bc,
                           const AbcWeight& abc, const MpsaOptions& opts) {
  const int d = grid.dim;
  const int nb = bc.num_boundary_faces();

  // Column index of a boundary face in the assembled data vector.
  std::vector<int> slot_of_face(grid.num_faces(), -1);
  for (int s = 0; s < nb; ++s) slot_of_face[bc.face_of_slot(s)] = s;

  std::vector<std::vector<int>> bslot_stencil(nb);
  std::vector<std::vector<int>> trace_cell_stencil(nb), trace_data_stencil(nb);
  for (int s = 0; s < nb; ++s) {
    const int f = bc.face_of_slot(s);
    bslot_stencil[s] = grid.cells_near_face[f];
    trace_cell_stencil[s] = grid.cells_near_face[f];
    trace_data_stencil[s] = grid.bfaces_near_face[f];
  }

  std::vector<int> identity_cells(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) identity_cells[c] = c;

  // The conservative flux draws on cell-averaged gradients, so its rows span
  // the regions of every vertex of the adjacent cells (the global balance
  // matrix keeps the same pattern as with the T_f stencils).
  std::vector<std::vector<int>> cons_cell_stencil(grid.num_faces());
  std::vector<std::vector<int>> cons_bface_stencil(grid.num_faces());
  for (int f = 0; f < grid.num_faces(); ++f) {
    std::set<int> cs;
    std::set<int> bs;
    for (int side = 0; side < 2; ++side) {
      const int K = grid.faces[f].cells[side];
      if (K < 0) continue;
      for (int v : grid.cells[K].vertices) {
        cs.insert(grid.vertex_cells[v].begin(), grid.vertex_cells[v].end());
        for (int fb : grid.vertex_faces[v])
          if (grid.faces[fb].boundary) bs.insert(fb);
      }
    }
    cons_cell_stencil[f].assign(cs.begin(), cs.end());
    cons_bface_stencil[f].assign(bs.begin(), bs.end());
  }

  StressOperators ops;
  ops.dim = d;
  ops.stress = make_pattern(grid.num_faces(), grid.num_cells() * d, d, grid.cells_near_face,
                            identity_cells);
  ops.bound_stress =
      make_pattern(grid.num_faces(), nb * d, d, grid.bfaces_near_face, slot_of_face);
  ops.stress_cons =
      make_pattern(grid.num_faces(), grid.num_cells() * d, d, cons_cell_stencil, identity_cells);
  ops.bound_stress_cons =
      make_pattern(grid.num_faces(), nb * d, d, cons_bface_stencil, slot_of_face);
  ops.trace_cell = make_pattern(nb, grid.num_cells() * d, d, trace_cell_stencil, identity_cells);
  ops.trace_data = make_pattern(nb, nb * d, d, trace_data_stencil, slot_of_face);

  // One global augmentation constant; a spatially varying alpha would break
  // the divergence-free property the construction relies on.
  double alpha = 0.0;
  for (int r = 0; r < field.num_regions(); ++r)
    alpha += mean_shear(field.region_data(r).C, d);
  alpha *= opts.gauge_scale / std::max(field.num_regions(), 1);

  TraceAccum tr;
  tr.count_good.assign(nb, 0);
  tr.count_def.assign(nb, 0);
  tr.def_cell.resize(nb);
  tr.def_data.resize(nb);

  const int dd = d * d;

  for (int v = 0; v < grid.num_vertices(); ++v) {
    const auto& rcells = grid.vertex_cells[v];
    const auto& rfaces = grid.vertex_faces[v];
    if (rcells.empty()) continue;

    const int nc = static_cast<int>(rcells.size());
    const int N = nc * dd;
    auto local_cell = [&](int c) { return stencil_pos(rcells, c); };

    std::vector<int> rbfaces;
    for (int f : rfaces)
      if (grid.faces[f].boundary) rbfaces.push_back(f);
    const int nbf = static_cast<int>(rbfaces.size());
    auto local_bface = [&](int f) { return stencil_pos(rbfaces, f); };

    int n_interior = 0;
    std::vector<int> faces_per_cell(nc, 0);
    for (int f : rfaces) {
      const Face& fc = grid.faces[f];
      if (!fc.boundary) ++n_interior;
      faces_per_cell[local_cell(fc.cells[0])]++;
      if (!fc.boundary) faces_per_cell[local_cell(fc.cells[1])]++;
    }
    for (int lc = 0; lc < nc; ++lc)
      if (faces_per_cell[lc] != d)
        throw DiscretizationError("vertex " + std::to_string(v) +
                                  ": cell with unsupported corner face count");

    const int nrows = n_interior * 2 * d + (static_cast<int>(rfaces.size()) - n_interior) * d;
    const int jrows = n_interior * dd;

    MatX M = MatX::Zero(nrows, N);
    MatX B_cell = MatX::Zero(nrows, nc * d);
    MatX B_bnd = MatX::Zero(nrows, std::max(nbf, 1) * d);
    // Tangential-gradient continuity rows select a representative when the
    // hard system is rank-deficient (all-Neumann corners, degenerate
    // tensors). Continuous piecewise-linear fields satisfy them exactly.
    MatX J = MatX::Zero(std::max(jrows, 1), N);

    int row = 0;
    int jrow = 0;
    for (int f : rfaces) {
      const Face& fc = grid.faces[f];
      const int K1 = fc.cells[0];
      const int p1 = local_cell(K1);
      const MatX N1 = normal_hooke(field.tensor(K1), fc.normal, d);

      if (!fc.boundary) {
        const int K2 = fc.cells[1];
        const int p2 = local_cell(K2);
        const MatX N2 = normal_hooke(field.tensor(K2), fc.normal, d);
        const MatX A = normal_gauge(alpha, fc.normal, d);
        const Vec3 xc = fc.center + opts.eta * (grid.vertices[v] - fc.center);
        const Vec3 d1 = xc - grid.cells[K1].center;
        const Vec3 d2 = xc - grid.cells[K2].center;
        // Balance of the augmented flux across the subface.
        M.block(row, p1 * dd, d, dd) += N1 + A;
        M.block(row, p2 * dd, d, dd) -= N2 + A;
        row += d;
        // Displacement continuity at the continuity point.
        for (int i = 0; i < d; ++i) {
          for (int l = 0; l < d; ++l) {
            M(row + i, p1 * dd + i * d + l) += d1[l];
            M(row + i, p2 * dd + i * d + l) -= d2[l];
          }
          B_cell(row + i, p1 * d + i) -= 1.0;
          B_cell(row + i, p2 * d + i) += 1.0;
        }
        row += d;
        // Selection rows: tangential gradient continuity (G1 - G2)(I - n n^T).
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            for (int l = 0; l < d; ++l) {
              const double pt = (l == j ? 1.0 : 0.0) - fc.normal[l] * fc.normal[j];
              J(jrow, p1 * dd + i * d + l) += pt;
              J(jrow, p2 * dd + i * d + l) -= pt;
            }
            ++jrow;
          }
      } else {
        const int s = slot_of_face[f];
        const int lb = local_bface(f);
        const Vec3 db = fc.center - grid.cells[K1].center;
        const BcKind kind = bc.kind(s);
        switch (kind) {
          case BcKind::Dirichlet:
            for (int i = 0; i < d; ++i) {
              for (int l = 0; l < d; ++l) M(row + i, p1 * dd + i * d + l) += db[l];
              B_cell(row + i, p1 * d + i) -= 1.0;
              B_bnd(row + i, lb * d + i) += 1.0;
            }
            break;
          case BcKind::Neumann:
            M.block(row, p1 * dd, d, dd) += N1;
            for (int i = 0; i < d; ++i) B_bnd(row + i, lb * d + i) += 1.0;
            break;
          case BcKind::Robin:
          case BcKind::Absorbing: {
            const MatX& R =
                kind == BcKind::Robin ? bc.robin_weight(s) : abc.robin_weight.at(s);
            if (R.size() == 0)
              throw DiscretizationError("absorbing face " + std::to_string(f) +
                                        " has no impedance weight");
            M.block(row, p1 * dd, d, dd) += N1;
            for (int i = 0; i < d; ++i) {
              for (int k = 0; k < d; ++k) {
                for (int l = 0; l < d; ++l) M(row + i, p1 * dd + k * d + l) += R(i, k) * db[l];
                B_cell(row + i, p1 * d + k) -= R(i, k);
              }
              B_bnd(row + i, lb * d + i) += 1.0;
            }
            break;
          }
        }
        row += d;
      }
    }

    // Row equilibration keeps traction and displacement rows comparable.
    for (int r = 0; r < nrows; ++r) {
      const double rmax = M.row(r).cwiseAbs().maxCoeff();
      if (rmax > 0.0) {
        M.row(r) /= rmax;
        B_cell.row(r) /= rmax;
        B_bnd.row(r) /= rmax;
      }
    }
    MatX B(nrows, (nc + nbf) * d);
    B << B_cell, B_bnd.leftCols(nbf * d);
    bool deficient = false;
    MatX X;
    Eigen::FullPivLU<MatX> flu(M);
    flu.setThreshold(opts.pivot_rel_tol * N);
    X = flu.solve(B);
    const int kdim = N - static_cast<int>(flu.rank());
    if (kdim > 0) {
      const MatX kernel = flu.kernel();
      const MatX T = J * kernel;
      Eigen::CompleteOrthogonalDecomposition<MatX> tcod(T);
      X -= kernel * tcod.solve(MatX(J * X));
      if (tcod.rank() < kdim) deficient = true;
    }
    if (!X.allFinite())
      throw DiscretizationError("vertex " + std::to_string(v) +
                                ": singular local system (non-finite condensation)");
    if (deficient) ops.deficient_vertices.push_back(v);
    const MatX X_cell = X.leftCols(nc * d);
    const MatX X_bnd = nbf > 0 ? MatX(X.rightCols(nbf * d)) : MatX::Zero(N, d);

    auto scatter_flux = [&](int frow, SparseOp& cell_op, SparseOp& bnd_op, const MatX& coef,
                            int psrc, const std::vector<int>& cstencil,
                            const std::vector<int>& bstencil, double weight) {
      const MatX tc = weight * coef * X_cell.middleRows(psrc * dd, dd);  // d x nc*d
      const MatX tb = weight * coef * X_bnd.middleRows(psrc * dd, dd);   // d x nbf*d
      for (int i = 0; i < d; ++i) {
        const std::size_t base_c = cell_op.outer[frow * d + i];
        for (int lc = 0; lc < nc; ++lc) {
          const int pos = stencil_pos(cstencil, rcells[lc]);
          for (int c = 0; c < d; ++c)
            cell_op.vals[base_c + static_cast<std::size_t>(pos) * d + c] += tc(i, lc * d + c);
        }
        const std::size_t base_b = bnd_op.outer[frow * d + i];
        for (int lb = 0; lb < nbf; ++lb) {
          const int pos = stencil_pos(bstencil, rbfaces[lb]);
          for (int c = 0; c < d; ++c)
            bnd_op.vals[base_b + static_cast<std::size_t>(pos) * d + c] += tb(i, lb * d + c);
        }
      }
    };

    // Scatter subface tractions and boundary traces.
    for (int f : rfaces) {
      const Face& fc = grid.faces[f];
      const int K1 = fc.cells[0];
      const int p1 = local_cell(K1);
      const double ms = fc.measure / static_cast<double>(fc.vertices.size());
      const bool neumann_face = fc.boundary && bc.kind(slot_of_face[f]) == BcKind::Neumann;

      auto scatter_both = [&](const MatX& coef, int psrc, double weight) {
        scatter_flux(f, ops.stress, ops.bound_stress, coef, psrc, grid.cells_near_face[f],
                     grid.bfaces_near_face[f], weight);
        scatter_flux(f, ops.stress_cons, ops.bound_stress_cons, coef, psrc, cons_cell_stencil[f],
                     cons_bface_stencil[f], weight);
      };

      if (neumann_face) {
        // Known traction enters directly: T_f accumulates m_s * data.
        const int pos = stencil_pos(grid.bfaces_near_face[f], f);
        const int pos_cons = stencil_pos(cons_bface_stencil[f], f);
        for (int i = 0; i < d; ++i) {
          const std::size_t base = ops.bound_stress.outer[f * d + i];
          ops.bound_stress.vals[base + static_cast<std::size_t>(pos) * d + i] += ms;
          const std::size_t base_cons = ops.bound_stress_cons.outer[f * d + i];
          ops.bound_stress_cons.vals[base_cons + static_cast<std::size_t>(pos_cons) * d + i] += ms;
        }
      } else if (fc.boundary) {
        scatter_both(normal_hooke(field.tensor(K1), fc.normal, d), p1, ms);
      } else {
        // The physical traction averages the reconstruction from the two
        // sides; the leading reconstruction errors cancel.
        const int K2 = fc.cells[1];
        scatter_both(normal_hooke(field.tensor(K1), fc.normal, d), p1, 0.5 * ms);
        scatter_both(normal_hooke(field.tensor(K2), fc.normal, d), local_cell(K2), 0.5 * ms);
      }

      // One displacement-trace estimate per boundary subface.
      if (fc.boundary) {
        const int s = slot_of_face[f];
        const Vec3 db = fc.center - grid.cells[K1].center;
        MatX ec = MatX::Zero(d, nc * d);
        MatX eb = MatX::Zero(d, nbf * d);
        for (int i = 0; i < d; ++i) {
          ec(i, p1 * d + i) += 1.0;
          for (int l = 0; l < d; ++l) {
            ec.row(i) += db[l] * X_cell.row(p1 * dd + i * d + l);
            eb.row(i) += db[l] * X_bnd.row(p1 * dd + i * d + l);
          }
        }
        if (!deficient) {
          tr.count_good[s]++;
          for (int i = 0; i < d; ++i) {
            const std::size_t base_c = ops.trace_cell.outer[s * d + i];
            for (int lc = 0; lc < nc; ++lc) {
              const int pos = stencil_pos(trace_cell_stencil[s], rcells[lc]);
              for (int c = 0; c < d; ++c)
                ops.trace_cell.vals[base_c + static_cast<std::size_t>(pos) * d + c] +=
                    ec(i, lc * d + c);
            }
            const std::size_t base_d = ops.trace_data.outer[s * d + i];
            for (int lb = 0; lb < nbf; ++lb) {
              const int pos = stencil_pos(trace_data_stencil[s], rbfaces[lb]);
              for (int c = 0; c < d; ++c)
                ops.trace_data.vals[base_d + static_cast<std::size_t>(pos) * d + c] +=
                    eb(i, lb * d + c);
            }
          }
        } else {
          tr.count_def[s]++;
          auto& dc = tr.def_cell[s];
          auto& ddv = tr.def_data[s];
          const std::size_t wc = ops.trace_cell.outer[s * d + 1] - ops.trace_cell.outer[s * d];
          const std::size_t wd = ops.trace_data.outer[s * d + 1] - ops.trace_data.outer[s * d];
          if (dc.empty()) dc.assign(static_cast<std::size_t>(d) * wc, 0.0);
          if (ddv.empty()) ddv.assign(static_cast<std::size_t>(d) * wd, 0.0);
          for (int i = 0; i < d; ++i) {
            for (int lc = 0; lc < nc; ++lc) {
              const int pos = stencil_pos(trace_cell_stencil[s], rcells[lc]);
              for (int c = 0; c < d; ++c)
                dc[i * wc + static_cast<std::size_t>(pos) * d + c] += ec(i, lc * d + c);
            }
            for (int lb = 0; lb < nbf; ++lb) {
              const int pos = stencil_pos(trace_data_stencil[s], rbfaces[lb]);
              for (int c = 0; c < d; ++c)
                ddv[i * wd + static_cast<std::size_t>(pos) * d + c] += eb(i, lb * d + c);
            }
          }
        }
      }
    }
  }

  // Normalize the trace rows: average the usable subface estimates.
  for (int s = 0; s < nb; ++s) {
    double count = tr.count_good[s];
    if (tr.count_good[s] == 0 && tr.count_def[s] > 0) {
      count = tr.count_def[s];
      const std::size_t wc = ops.trace_cell.outer[s * d + 1] - ops.trace_cell.outer[s * d];
      const std::size_t wd = ops.trace_data.outer[s * d + 1] - ops.trace_data.outer[s * d];
      for (int i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < wc; ++k)
          ops.trace_cell.vals[ops.trace_cell.outer[s * d + i] + k] += tr.def_cell[s][i * wc + k];
        for (std::size_t k = 0; k < wd; ++k)
          ops.trace_data.vals[ops.trace_data.outer[s * d + i] + k] += tr.def_data[s][i * wd + k];
      }
    }
    if (count == 0.0)
      throw DiscretizationError("boundary face " + std::to_string(bc.face_of_slot(s)) +
                                ": no usable trace estimate");
    for (int i = 0; i < d; ++i) {
      for (std::size_t k = ops.trace_cell.outer[s * d + i]; k < ops.trace_cell.outer[s * d + i + 1];
           ++k)
        ops.trace_cell.vals[k] /= count;
      for (std::size_t k = ops.trace_data.outer[s * d + i]; k < ops.trace_data.outer[s * d + i + 1];
           ++k)
        ops.trace_data.vals[k] /= count;
    }
  }

  return ops;
}

VecX face_tractions(const StressOperators& ops, const VecX& u_cells, const VecX& boundary_values) {
  return ops.stress.apply(u_cells) + ops.bound_stress.apply(boundary_values);
}

VecX assemble_abc_rhs(const Grid& grid, const BoundarySpec& bc, const AbcWeight& abc,
                      const VecX& u_hist1, const VecX& u_hist2, double t) {
  const int d = grid.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(bc.num_boundary_faces()) * d;
  if (u_hist1.size() != n || u_hist2.size() != n)
    throw DiscretizationError("absorbing history not initialized");
  VecX out = VecX::Zero(n);
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    if (bc.kind(s) != BcKind::Absorbing) continue;
    if (!abc.has(s))
      throw DiscretizationError("absorbing face without impedance weight");
    const VecX h = (4.0 / 3.0) * u_hist1.segment(s * d, d) - (1.0 / 3.0) * u_hist2.segment(s * d, d);
    VecX val = abc.robin_weight[s] * h;
    const Vec3 fa = bc.eval_data(s, t, grid.faces[bc.face_of_slot(s)].center);
    for (int c = 0; c < d; ++c) out(s * d + c) = val(c) + fa(c);
  }
  return out;
}

VecX assemble_boundary_values(const Grid& grid, const BoundarySpec& bc, const AbcWeight& abc,
                              const VecX& u_hist1, const VecX& u_hist2, double t) {
  const int d = grid.dim;
  VecX out = VecX::Zero(static_cast<Eigen::Index>(bc.num_boundary_faces()) * d);
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    const Vec3 x = grid.faces[bc.face_of_slot(s)].center;
    Vec3 val = bc.eval_data(s, t, x);
    if (bc.kind(s) == BcKind::Absorbing) {
      if (!abc.has(s)) throw DiscretizationError("absorbing face without impedance weight");
      const Eigen::Index n = static_cast<Eigen::Index>(bc.num_boundary_faces()) * d;
      if (u_hist1.size() != n || u_hist2.size() != n)
        throw DiscretizationError("absorbing history not initialized");
      const VecX h =
          (4.0 / 3.0) * u_hist1.segment(s * d, d) - (1.0 / 3.0) * u_hist2.segment(s * d, d);
      const VecX add = abc.robin_weight[s] * h;
      for (int c = 0; c < d; ++c) val(c) += add(c);
    }
    for (int c = 0; c < d; ++c) out(s * d + c) = val(c);
  }
  return out;
}

VecX boundary_displacement_trace(const StressOperators& ops, const VecX& u_cells,
                                 const VecX& boundary_values) {
  return ops.trace_cell.apply(u_cells) + ops.trace_data.apply(boundary_values);
}

VecX cell_divergence(const Grid& grid, const VecX& face_values) {
  const int d = grid.dim;
  VecX out = VecX::Zero(static_cast<Eigen::Index>(grid.num_cells()) * d);
  for (int c = 0; c < grid.num_cells(); ++c)
    for (int f : grid.cells[c].faces) {
      const double s = grid.orientation(c, f);
      for (int i = 0; i < d; ++i) out(c * d + i) += s * face_values(f * d + i);
    }
  return out;
}

}  // namespace mpsaw
