#include "doctest.h"

#include "mpsawave/mpsa.hpp"

#include <random>

using namespace mpsaw;

namespace {

Box unit_box() { return Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}; }

struct PatchSetup {
  VecX u_cells;
  VecX boundary_values;
  BoundarySpec bc;
  AbcWeight abc;
};

// Linear displacement field u = A x + b with boundary data matching each
// face's condition kind.
PatchSetup make_patch(const Grid& g, const StiffnessField& field, const MatX& A, const VecX& b,
                      const std::vector<BcKind>& side_kinds, double dt = 0.1) {
  const int d = g.dim;
  PatchSetup ps{VecX(g.num_cells() * d), VecX(), BoundarySpec(g), AbcWeight{}};

  for (int c = 0; c < g.num_cells(); ++c) {
    VecX x(d);
    for (int i = 0; i < d; ++i) x(i) = g.cells[c].center[i];
    ps.u_cells.segment(c * d, d) = A * x + b;
  }

  // Sides are numbered (axis, min/max): x-, x+, y-, y+, z-, z+.
  int side = 0;
  for (int axis = 0; axis < d; ++axis)
    for (int mx = 0; mx < 2; ++mx, ++side)
      ps.bc.set_side(g, axis, mx == 1, side_kinds[side % side_kinds.size()]);

  ps.abc = compute_abc_weights(g, field, ps.bc, dt);

  const int nb = ps.bc.num_boundary_faces();
  ps.boundary_values = VecX::Zero(nb * d);
  for (int s = 0; s < nb; ++s) {
    const Face& f = g.faces[ps.bc.face_of_slot(s)];
    VecX x(d), n(d);
    for (int i = 0; i < d; ++i) {
      x(i) = f.center[i];
      n(i) = f.normal[i];
    }
    const VecX disp = A * x + b;
    const VecX trac = apply_hooke(field.tensor(f.cells[0]), A) * n;
    VecX val;
    switch (ps.bc.kind(s)) {
      case BcKind::Dirichlet: val = disp; break;
      case BcKind::Neumann: val = trac; break;
      case BcKind::Robin: val = trac + ps.bc.robin_weight(s) * disp; break;
      case BcKind::Absorbing: val = trac + ps.abc.robin_weight[s] * disp; break;
    }
    ps.boundary_values.segment(s * d, d) = val;
  }
  return ps;
}

// Largest face-traction deviation from m_f sigma(A) n_f, relative to the
// largest exact traction.
double patch_traction_error(const Grid& g, const StiffnessField& field, const StressOperators& ops,
                            const PatchSetup& ps, const MatX& A) {
  const int d = g.dim;
  const VecX T = face_tractions(ops, ps.u_cells, ps.boundary_values);
  double err = 0.0, scale = 0.0;
  for (int f = 0; f < g.num_faces(); ++f) {
    VecX n(d);
    for (int i = 0; i < d; ++i) n(i) = g.faces[f].normal[i];
    const VecX exact = g.faces[f].measure * (apply_hooke(field.tensor(g.faces[f].cells[0]), A) * n);
    err = std::max(err, (T.segment(f * d, d) - exact).cwiseAbs().maxCoeff());
    scale = std::max(scale, exact.cwiseAbs().maxCoeff());
  }
  return err / scale;
}

double patch_trace_error(const Grid& g, const StressOperators& ops, const PatchSetup& ps,
                         const MatX& A, const VecX& b) {
  const int d = g.dim;
  const VecX tr = boundary_displacement_trace(ops, ps.u_cells, ps.boundary_values);
  double err = 0.0, scale = 1e-30;
  for (int s = 0; s < ps.bc.num_boundary_faces(); ++s) {
    const Face& f = g.faces[ps.bc.face_of_slot(s)];
    VecX x(d);
    for (int i = 0; i < d; ++i) x(i) = f.center[i];
    const VecX exact = A * x + b;
    err = std::max(err, (tr.segment(s * d, d) - exact).cwiseAbs().maxCoeff());
    scale = std::max(scale, exact.cwiseAbs().maxCoeff());
  }
  return err / scale;
}

MatX test_gradient(int d) {
  MatX A(d, d);
  if (d == 2)
    A << 0.8, -0.3, 0.45, 1.2;
  else
    A << 0.8, -0.3, 0.2, 0.45, 1.2, -0.7, 0.15, 0.5, 0.9;
  return A;
}

VecX test_offset(int d) {
  VecX b(d);
  for (int i = 0; i < d; ++i) b(i) = 0.3 - 0.2 * i;
  return b;
}

}  // namespace

TEST_CASE("patch test: linear fields reproduced exactly") {
  struct Case {
    const char* name;
    Grid grid;
    bool ti;
  };
  std::vector<Case> cases;
  cases.push_back({"cartesian 2d", build_cartesian_grid(unit_box(), {5, 4}), false});
  cases.push_back({"simplex 2d", build_simplex_grid(unit_box(), 0.25, 2), false});
  cases.push_back({"cartesian 3d", build_cartesian_grid(unit_box(), {3, 3, 3}), false});
  cases.push_back({"cartesian 3d TI", build_cartesian_grid(unit_box(), {3, 3, 3}), true});
  cases.push_back({"simplex 3d", build_simplex_grid(unit_box(), 1.0 / 3.0, 3), false});
  cases.push_back({"prism 3d", build_prism_grid(unit_box(), {3, 3, 3}), false});

  for (auto& tc : cases) {
    const std::string name = tc.name;
    CAPTURE(name);
    const Grid& g = tc.grid;
    const int d = g.dim;
    auto field =
        tc.ti ? StiffnessField::uniform(
                    g, transversely_isotropic_region({1.0, 5.0, 5.0, 1.0, 2.0, Vec3(0, 0, 1)}, 3))
              : StiffnessField::uniform(g, isotropic_region({1.2, 0.8}, d));
    const MatX A = test_gradient(d);
    const VecX b = test_offset(d);

    SUBCASE("all dirichlet") {}
    // Mixed kinds exercise every boundary branch of the local systems. TI
    // media keep Dirichlet/Neumann/Robin only (no isotropic impedance).
    std::vector<BcKind> kinds = {BcKind::Dirichlet};
    {
      auto ps = make_patch(g, field, A, b, kinds);
      auto ops = discretize(g, field, ps.bc, ps.abc);
      CHECK(patch_traction_error(g, field, ops, ps, A) < 1e-10);
      CHECK(patch_trace_error(g, ops, ps, A, b) < 1e-10);
    }
    {
      std::vector<BcKind> mixed;
      if (tc.ti) {
        mixed = {BcKind::Dirichlet, BcKind::Neumann, BcKind::Dirichlet,
                 BcKind::Neumann, BcKind::Dirichlet, BcKind::Neumann};
      } else {
        mixed = {BcKind::Dirichlet, BcKind::Absorbing, BcKind::Neumann,
                 BcKind::Dirichlet, BcKind::Neumann, BcKind::Absorbing};
      }
      auto ps = make_patch(g, field, A, b, mixed);
      // Give one Robin side a generic SPD weight.
      for (int s = 0; s < ps.bc.num_boundary_faces(); ++s) {
        const int f = ps.bc.face_of_slot(s);
        if (std::abs(g.faces[f].center[1] - 0.0) < 1e-9 && ps.bc.kind(s) == BcKind::Neumann) {
          MatX R = MatX::Identity(d, d) * 2.0;
          R(0, d - 1) = R(d - 1, 0) = 0.3;
          ps.bc.set_face_robin(f, R);
        }
      }
      // Rebuild data for the adjusted kinds.
      for (int s = 0; s < ps.bc.num_boundary_faces(); ++s) {
        const Face& f = g.faces[ps.bc.face_of_slot(s)];
        VecX x(d), n(d);
        for (int i = 0; i < d; ++i) {
          x(i) = f.center[i];
          n(i) = f.normal[i];
        }
        const VecX disp = A * x + b;
        const VecX trac = apply_hooke(field.tensor(f.cells[0]), A) * n;
        VecX val;
        switch (ps.bc.kind(s)) {
          case BcKind::Dirichlet: val = disp; break;
          case BcKind::Neumann: val = trac; break;
          case BcKind::Robin: val = trac + ps.bc.robin_weight(s) * disp; break;
          case BcKind::Absorbing: val = trac + ps.abc.robin_weight[s] * disp; break;
        }
        ps.boundary_values.segment(s * d, d) = val;
      }
      auto ops = discretize(g, field, ps.bc, ps.abc);
      CHECK(patch_traction_error(g, field, ops, ps, A) < 1e-10);
      CHECK(patch_trace_error(g, ops, ps, A, b) < 1e-10);
    }
  }
}

TEST_CASE("rigid-body translation produces no tractions") {
  Grid g = build_simplex_grid(unit_box(), 0.25, 2);
  auto field = StiffnessField::uniform(g, isotropic_region({1.0, 1.0}, 2));

  // All-Neumann boundary: STRESS alone annihilates constants.
  BoundarySpec bc(g);
  AbcWeight abc;
  auto ops = discretize(g, field, bc, abc);
  VecX ones = VecX::Ones(g.num_cells() * 2);
  double scale = 0.0;
  for (double v : ops.stress.vals) scale = std::max(scale, std::abs(v));
  CHECK(ops.stress.apply(ones).cwiseAbs().maxCoeff() < 1e-10 * scale);

  // Dirichlet boundary with matching constant data.
  MatX A0 = MatX::Zero(2, 2);
  VecX b = test_offset(2);
  auto ps = make_patch(g, field, A0, b, {BcKind::Dirichlet});
  auto ops2 = discretize(g, field, ps.bc, ps.abc);
  const VecX T = face_tractions(ops2, ps.u_cells, ps.boundary_values);
  CHECK(T.cwiseAbs().maxCoeff() < 1e-10 * scale);

  // Zero displacement and zero data give zero tractions.
  CHECK(face_tractions(ops2, VecX::Zero(g.num_cells() * 2),
                       VecX::Zero(ps.bc.num_boundary_faces() * 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("locality: stress rows stay inside the vertex stencils") {
  Grid g = build_simplex_grid(unit_box(), 0.2, 2);
  auto field = StiffnessField::uniform(g, isotropic_region({1.0, 1.0}, 2));
  BoundarySpec bc(g);
  bc.set_all(BcKind::Dirichlet);
  auto ops = discretize(g, field, bc, AbcWeight{});
  for (int f = 0; f < g.num_faces(); ++f)
    for (int i = 0; i < 2; ++i) {
      for (std::size_t k = ops.stress.outer[f * 2 + i]; k < ops.stress.outer[f * 2 + i + 1]; ++k) {
        const int cell = ops.stress.inner[k] / 2;
        CHECK(std::binary_search(g.cells_near_face[f].begin(), g.cells_near_face[f].end(), cell));
      }
      for (std::size_t k = ops.bound_stress.outer[f * 2 + i];
           k < ops.bound_stress.outer[f * 2 + i + 1]; ++k) {
        const int slot = ops.bound_stress.inner[k] / 2;
        const int bface = bc.face_of_slot(slot);
        CHECK(std::binary_search(g.bfaces_near_face[f].begin(), g.bfaces_near_face[f].end(),
                                 bface));
      }
    }
}

TEST_CASE("two-sided consistency at a material interface") {
  // Piecewise-linear displacement with traction continuity across x = 0.5.
  for (int dim : {2, 3}) {
    CAPTURE(dim);
    Grid g = dim == 2 ? build_cartesian_grid(unit_box(), {4, 4})
                      : build_cartesian_grid(unit_box(), {4, 4, 4});
    auto left = isotropic_region({1.0, 1.0}, dim);
    auto right = isotropic_region({3.0, 2.0}, dim);
    Box left_box = unit_box();
    left_box.hi.x() = 0.5;
    auto field = StiffnessField::from_boxes(g, right, {{left_box, left}});

    const MatX AL = test_gradient(dim);
    VecX n = VecX::Zero(dim);
    n(0) = 1.0;
    // Solve for the gradient jump a (x) n that balances the traction.
    const VecX tL = apply_hooke(left.C, AL) * n;
    MatX M(dim, dim);
    for (int k = 0; k < dim; ++k) {
      MatX probe = VecX::Unit(dim, k) * n.transpose();
      M.col(k) = apply_hooke(right.C, probe) * n;
    }
    const VecX a = M.fullPivLu().solve(VecX(tL - apply_hooke(right.C, AL) * n));
    const MatX AR = AL + a * n.transpose();
    const double x_int = 0.5;
    const VecX b = test_offset(dim);
    auto displacement = [&](const VecX& x) {
      if (x(0) <= x_int) return VecX(AL * x + b);
      VecX xi = x;
      xi(0) = x_int;
      return VecX(AL * xi + b + AR * (x - xi));
    };
    auto gradient = [&](const VecX& x) { return x(0) <= x_int ? AL : AR; };

    BoundarySpec bc(g);
    bc.set_all(BcKind::Dirichlet);
    AbcWeight abc;
    auto ops = discretize(g, field, bc, abc);

    VecX u(g.num_cells() * dim);
    for (int c = 0; c < g.num_cells(); ++c) {
      VecX x(dim);
      for (int i = 0; i < dim; ++i) x(i) = g.cells[c].center[i];
      u.segment(c * dim, dim) = displacement(x);
    }
    VecX bv(bc.num_boundary_faces() * dim);
    for (int s = 0; s < bc.num_boundary_faces(); ++s) {
      VecX x(dim);
      for (int i = 0; i < dim; ++i) x(i) = g.faces[bc.face_of_slot(s)].center[i];
      bv.segment(s * dim, dim) = displacement(x);
    }

    const VecX T = face_tractions(ops, u, bv);
    double err = 0.0, scale = 0.0;
    for (int f = 0; f < g.num_faces(); ++f) {
      VecX x(dim), nf(dim);
      for (int i = 0; i < dim; ++i) {
        x(i) = g.faces[f].center[i];
        nf(i) = g.faces[f].normal[i];
      }
      const VecX exact =
          g.faces[f].measure *
          (apply_hooke(field.tensor(g.faces[f].cells[0]), gradient(x)) * nf);
      err = std::max(err, (T.segment(f * dim, dim) - exact).cwiseAbs().maxCoeff());
      scale = std::max(scale, exact.cwiseAbs().maxCoeff());
    }
    CHECK(err / scale < 1e-10);
  }
}

TEST_CASE("absorbing assembly equals robin assembly with weight D_dt") {
  Grid g = build_simplex_grid(unit_box(), 0.25, 2);
  auto field = StiffnessField::uniform(g, isotropic_region({0.01, 0.01}, 2));

  BoundarySpec bc_abs(g);
  bc_abs.set_side(g, 0, true, BcKind::Absorbing);
  bc_abs.set_side(g, 0, false, BcKind::Dirichlet);
  AbcWeight abc = compute_abc_weights(g, field, bc_abs, 0.25);

  BoundarySpec bc_rob(g);
  bc_rob.set_side(g, 0, false, BcKind::Dirichlet);
  for (int s = 0; s < bc_abs.num_boundary_faces(); ++s)
    if (bc_abs.kind(s) == BcKind::Absorbing)
      bc_rob.set_face_robin(bc_abs.face_of_slot(s), abc.robin_weight[s]);

  auto ops_abs = discretize(g, field, bc_abs, abc);
  auto ops_rob = discretize(g, field, bc_rob, AbcWeight{});

  double max_rel = 0.0;
  for (std::size_t k = 0; k < ops_abs.stress.vals.size(); ++k) {
    const double a = ops_abs.stress.vals[k], r = ops_rob.stress.vals[k];
    max_rel = std::max(max_rel, std::abs(a - r));
  }
  double scale = 0.0;
  for (double v : ops_abs.stress.vals) scale = std::max(scale, std::abs(v));
  CHECK(max_rel <= 1e-14 * scale);
  for (std::size_t k = 0; k < ops_abs.bound_stress.vals.size(); ++k)
    CHECK(std::abs(ops_abs.bound_stress.vals[k] - ops_rob.bound_stress.vals[k]) <=
          1e-14 * std::max(1.0, std::abs(ops_abs.bound_stress.vals[k])));
}

TEST_CASE("face_tractions is linear") {
  Grid g = build_cartesian_grid(unit_box(), {3, 3});
  auto field = StiffnessField::uniform(g, isotropic_region({1.0, 1.0}, 2));
  BoundarySpec bc(g);
  bc.set_all(BcKind::Dirichlet);
  auto ops = discretize(g, field, bc, AbcWeight{});

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  VecX u1(g.num_cells() * 2), u2(g.num_cells() * 2);
  VecX g1(bc.num_boundary_faces() * 2), g2(bc.num_boundary_faces() * 2);
  for (Eigen::Index i = 0; i < u1.size(); ++i) {
    u1(i) = dist(rng);
    u2(i) = dist(rng);
  }
  for (Eigen::Index i = 0; i < g1.size(); ++i) {
    g1(i) = dist(rng);
    g2(i) = dist(rng);
  }
  const VecX lhs = face_tractions(ops, u1 + u2, g1 + g2);
  const VecX rhs = face_tractions(ops, u1, g1) + face_tractions(ops, u2, g2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());
}

TEST_CASE("absorbing history right-hand side") {
  Grid g = build_cartesian_grid(unit_box(), {2, 2});
  auto field = StiffnessField::uniform(g, isotropic_region({0.01, 0.01}, 2));
  BoundarySpec bc(g);
  bc.set_side(g, 0, true, BcKind::Absorbing);
  AbcWeight abc = compute_abc_weights(g, field, bc, 0.5);
  const int nb = bc.num_boundary_faces();

  VecX zero = VecX::Zero(nb * 2);
  CHECK(assemble_abc_rhs(g, bc, abc, zero, zero, 0.0).norm() == 0.0);

  // Constant history: 4/3 - 1/3 = 1, so data = D_dt c.
  VecX c = VecX::Constant(nb * 2, 0.7);
  VecX data = assemble_abc_rhs(g, bc, abc, c, c, 0.0);
  for (int s = 0; s < nb; ++s) {
    if (bc.kind(s) != BcKind::Absorbing) {
      CHECK(data.segment(s * 2, 2).norm() == 0.0);
      continue;
    }
    const VecX expect = abc.robin_weight[s] * c.segment(s * 2, 2);
    CHECK((data.segment(s * 2, 2) - expect).norm() < 1e-14);
  }

  // u_hist1 = 3w, u_hist2 = 0 gives 4 D_dt w.
  VecX w = VecX::Constant(nb * 2, 0.2);
  VecX data2 = assemble_abc_rhs(g, bc, abc, VecX(3.0 * w), zero, 0.0);
  for (int s = 0; s < nb; ++s) {
    if (bc.kind(s) != BcKind::Absorbing) continue;
    const VecX expect = 4.0 * (abc.robin_weight[s] * w.segment(s * 2, 2));
    CHECK((data2.segment(s * 2, 2) - expect).norm() < 1e-13);
  }

  CHECK_THROWS_AS(assemble_abc_rhs(g, bc, abc, VecX::Zero(2), zero, 0.0), DiscretizationError);
}

TEST_CASE("dirichlet trace returns the data exactly") {
  Grid g = build_simplex_grid(unit_box(), 0.5, 2);
  auto field = StiffnessField::uniform(g, isotropic_region({1.0, 1.0}, 2));
  BoundarySpec bc(g);
  bc.set_all(BcKind::Dirichlet);
  auto ops = discretize(g, field, bc, AbcWeight{});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  VecX u(g.num_cells() * 2), bv(bc.num_boundary_faces() * 2);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = dist(rng);
  for (Eigen::Index i = 0; i < bv.size(); ++i) bv(i) = dist(rng);
  const VecX tr = boundary_displacement_trace(ops, u, bv);
  CHECK((tr - bv).cwiseAbs().maxCoeff() < 1e-11);

  CHECK(boundary_displacement_trace(ops, VecX::Zero(u.size()), VecX::Zero(bv.size())).norm() ==
        0.0);
}
