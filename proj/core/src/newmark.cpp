#include "mpsawave/newmark.hpp"

namespace mpsaw {

namespace {

void check_sizes(const StepContext& ctx, const VecX& u0, const VecX& v0, const VecX& a0) {
  const Eigen::Index n = static_cast<Eigen::Index>(ctx.grid.num_cells()) * ctx.grid.dim;
  if (u0.size() != n || v0.size() != n || a0.size() != n)
    throw std::invalid_argument("initial fields are not sized to the grid");
  ctx.params.validate();
}

}  // namespace

WaveState initialize(const StepContext& ctx, const VecX& u0, const VecX& v0, const VecX& a0,
                     double t0) {
  check_sizes(ctx, u0, v0, a0);
  const int d = ctx.grid.dim;
  const int nb = ctx.bc.num_boundary_faces();

  // Seed the absorbing data with the adjacent-cell displacement so the trace
  // of the initial state is well defined without history.
  VecX seed = VecX::Zero(static_cast<Eigen::Index>(nb) * d);
  for (int s = 0; s < nb; ++s) {
    const int cell = ctx.grid.faces[ctx.bc.face_of_slot(s)].cells[0];
    for (int c = 0; c < d; ++c) seed(s * d + c) = u0(cell * d + c);
  }
  const VecX bv = assemble_boundary_values(ctx.grid, ctx.bc, ctx.abc, seed, seed, t0);
  VecX trace = boundary_displacement_trace(ctx.ops, u0, bv);

  WaveState st;
  st.t = t0;
  st.step = 0;
  st.u = u0;
  st.v = v0;
  st.a = a0;
  st.bnd_u1 = trace;
  st.bnd_u2 = std::move(trace);
  st.bnd_values = assemble_boundary_values(ctx.grid, ctx.bc, ctx.abc, st.bnd_u1, st.bnd_u2, t0);
  return st;
}

WaveState initialize_analytic(const StepContext& ctx, const VecX& u0, const VecX& v0,
                              const VecX& a0,
                              const std::function<Vec3(const Vec3&, double)>& u_exact,
                              double t0) {
  check_sizes(ctx, u0, v0, a0);
  const int d = ctx.grid.dim;
  const int nb = ctx.bc.num_boundary_faces();
  WaveState st;
  st.t = t0;
  st.step = 0;
  st.u = u0;
  st.v = v0;
  st.a = a0;
  st.bnd_u1 = VecX::Zero(static_cast<Eigen::Index>(nb) * d);
  st.bnd_u2 = VecX::Zero(static_cast<Eigen::Index>(nb) * d);
  for (int s = 0; s < nb; ++s) {
    const Vec3& x = ctx.grid.faces[ctx.bc.face_of_slot(s)].center;
    const Vec3 g1 = u_exact(x, t0);
    const Vec3 g2 = u_exact(x, t0 - ctx.params.dt);
    for (int c = 0; c < d; ++c) {
      st.bnd_u1(s * d + c) = g1(c);
      st.bnd_u2(s * d + c) = g2(c);
    }
  }
  st.bnd_values = assemble_boundary_values(ctx.grid, ctx.bc, ctx.abc, st.bnd_u1, st.bnd_u2, t0);
  return st;
}

WaveState step(const WaveState& state, const StepContext& ctx) {
  ctx.params.validate();
  const int d = ctx.grid.dim;
  const double dt = ctx.params.dt;
  const double beta = ctx.params.beta;
  const double tn = state.t + dt;

  const VecX bv =
      assemble_boundary_values(ctx.grid, ctx.bc, ctx.abc, state.bnd_u1, state.bnd_u2, tn);

  // Newmark predictor: u* = u + dt v + (1-2b) dt^2/2 a.
  VecX rhs = state.u + dt * state.v + (1.0 - 2.0 * beta) * 0.5 * dt * dt * state.a;
  rhs = ctx.system.mass_diagonal().cwiseProduct(rhs) / (beta * dt * dt);

  if (ctx.source) {
    for (int c = 0; c < ctx.grid.num_cells(); ++c) {
      const Vec3 q = ctx.source(tn, ctx.grid.cells[c].center);
      for (int i = 0; i < d; ++i) rhs(c * d + i) += ctx.grid.cells[c].volume * q(i);
    }
  }

  rhs += cell_divergence(ctx.grid, ctx.ops.bound_stress_cons.apply(bv));

  WaveState next;
  next.t = tn;
  next.step = state.step + 1;
  next.u = ctx.system.solve(rhs);
  auto [vn, an] = update_kinematics(state.u, state.v, state.a, next.u, ctx.params);
  next.v = std::move(vn);
  next.a = std::move(an);
  next.bnd_u2 = state.bnd_u1;
  next.bnd_u1 = boundary_displacement_trace(ctx.ops, next.u, bv);
  next.bnd_values = bv;
  return next;
}

std::pair<VecX, VecX> update_kinematics(const VecX& u_prev, const VecX& v_prev, const VecX& a_prev,
                                        const VecX& u_new, const NewmarkParams& p) {
  p.validate();
  const double dt = p.dt;
  const VecX a_new = (u_new - u_prev - dt * v_prev - (1.0 - 2.0 * p.beta) * 0.5 * dt * dt * a_prev) /
                     (p.beta * dt * dt);
  const VecX v_new = (1.0 - p.gamma / p.beta) * v_prev +
                     dt * (1.0 - p.gamma - p.gamma * (1.0 - 2.0 * p.beta) / (2.0 * p.beta)) * a_prev +
                     (p.gamma / (p.beta * dt)) * (u_new - u_prev);
  return {v_new, a_new};
}

}  // namespace mpsaw
