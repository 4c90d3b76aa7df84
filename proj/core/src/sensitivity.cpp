#include "fracbilin/sensitivity.hpp"

#include "fracbilin/errors.hpp"

namespace fracbilin {

namespace {

// source rows dt * (a_k .* b_k) restricted to the control nodes, row 0 zero
Field bilinear_source(const Field& a, const Field& b, const Grid& g, const TimeGrid& tg) {
    Field src = zero_field(tg, g);
    for (int k = 1; k <= tg.n_steps; ++k)
        for (int i = 0; i < g.n; ++i)
            if (g.omega_mask[i]) src(k, i) = tg.dt * a(k, i) * b(k, i);
    return src;
}

} // namespace

Field solve_linearized(const StepEngine& eng, const Field& y, const DirectionField& w) {
    const Grid& g = eng.disc->grid;
    const TimeGrid& tg = eng.disc->tg;
    require_shape(y, tg, g, "state");
    require_shape(w, tg, g, "direction");
    const Field src = bilinear_source(w, y, g, tg);
    return run_forward(eng, Eigen::VectorXd::Zero(g.n), src);
}

Field solve_linearized(const ProblemSpec& spec, const Discretization& disc,
                       const ControlField& v, const Field& y, const DirectionField& w) {
    const StepEngine eng = make_engine(spec, disc, v, 0.0);
    return solve_linearized(eng, y, w);
}

Field solve_second(const StepEngine& eng, const DirectionField& w, const Field& rho_w,
                   const DirectionField& h, const Field& rho_h) {
    const Grid& g = eng.disc->grid;
    const TimeGrid& tg = eng.disc->tg;
    require_shape(w, tg, g, "direction");
    require_shape(h, tg, g, "direction");
    require_shape(rho_w, tg, g, "first variation");
    require_shape(rho_h, tg, g, "first variation");
    const Field src = bilinear_source(h, rho_w, g, tg) + bilinear_source(w, rho_h, g, tg);
    return run_forward(eng, Eigen::VectorXd::Zero(g.n), src);
}

Field solve_second(const ProblemSpec& spec, const Discretization& disc, const ControlField& v,
                   const Field& y, const DirectionField& w, const DirectionField& h) {
    const StepEngine eng = make_engine(spec, disc, v, 0.0);
    const Field rho_w = solve_linearized(eng, y, w);
    const Field rho_h = solve_linearized(eng, y, h);
    return solve_second(eng, w, rho_w, h, rho_h);
}

DirectionField gradient(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, const Field& y, const AdjointField& q) {
    const Grid& g = disc.grid;
    const TimeGrid& tg = disc.tg;
    require_shape(v, tg, g, "control");
    require_shape(y, tg, g, "state");
    require_shape(q, tg, g, "costate");
    DirectionField grad = zero_field(tg, g);
    for (int k = 1; k <= tg.n_steps; ++k)
        for (int i = 0; i < g.n; ++i)
            if (g.omega_mask[i]) grad(k, i) = spec.alpha * v(k, i) + y(k, i) * q(k - 1, i);
    return grad;
}

DirectionField gradient_at(const ProblemSpec& spec, const Discretization& disc,
                           const ControlField& v) {
    const StepEngine eng = make_engine(spec, disc, v, 0.0);
    const Field y = run_forward_with_data(eng);
    const AdjointField q = solve_adjoint_discrete(eng, y);
    return gradient(spec, disc, v, y, q);
}

double control_inner(const Field& a, const Field& b, const Grid& grid, const TimeGrid& tg) {
    double acc = 0.0;
    for (int k = 1; k <= tg.n_steps; ++k)
        for (int i = 0; i < grid.n; ++i)
            if (grid.omega_mask[i]) acc += a(k, i) * b(k, i);
    return acc * grid.h * tg.dt;
}

double hessian_bilinear(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, const Field& y, const AdjointField& q,
                        const DirectionField& w, const Field& rho_w, const DirectionField& h,
                        const Field& rho_h) {
    const Grid& g = disc.grid;
    const TimeGrid& tg = disc.tg;
    require_shape(v, tg, g, "control");
    require_shape(y, tg, g, "state");
    require_shape(q, tg, g, "costate");
    const int K = tg.n_steps;
    double cross = 0.0;
    double reg = 0.0;
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i < g.n; ++i)
            if (g.omega_mask[i]) {
                cross += (w(k, i) * rho_h(k, i) + h(k, i) * rho_w(k, i)) * q(k - 1, i);
                reg += w(k, i) * h(k, i);
            }
    const double terminal = g.h * rho_w.row(K).dot(rho_h.row(K));
    return g.h * tg.dt * cross + terminal + spec.alpha * g.h * tg.dt * reg;
}

double hessian_quadratic(const ProblemSpec& spec, const Discretization& disc,
                         const ControlField& v, const Field& y, const AdjointField& q,
                         const DirectionField& w, const Field& rho_w) {
    return hessian_bilinear(spec, disc, v, y, q, w, rho_w, w, rho_w);
}

double hessian_quadratic(const ProblemSpec& spec, const Discretization& disc,
                         const ControlField& v, const Field& y, const AdjointField& q,
                         const DirectionField& w) {
    const StepEngine eng = make_engine(spec, disc, v, 0.0);
    const Field rho = solve_linearized(eng, y, w);
    return hessian_quadratic(spec, disc, v, y, q, w, rho);
}

double hessian_quadratic_q_variant(const ProblemSpec& spec, const Discretization& disc,
                                   const ControlField& v, const Field& y, const AdjointField& q,
                                   const DirectionField& w, const Field& rho_w) {
    (void)v;
    (void)y;
    const Grid& g = disc.grid;
    const TimeGrid& tg = disc.tg;
    double cross = 0.0;
    double reg = 0.0;
    for (int k = 1; k <= tg.n_steps; ++k)
        for (int i = 0; i < g.n; ++i)
            if (g.omega_mask[i]) {
                cross += w(k, i) * rho_w(k, i) * q(k - 1, i);
                reg += w(k, i) * w(k, i);
            }
    double bulk = 0.0;
    for (int k = 1; k <= tg.n_steps; ++k) bulk += rho_w.row(k).squaredNorm();
    return 2.0 * g.h * tg.dt * cross + g.h * tg.dt * bulk + spec.alpha * g.h * tg.dt * reg;
}

DirectionField random_direction(const ProblemSpec& spec, const Grid& grid, const TimeGrid& tg,
                                Rng& rng) {
    (void)spec;
    DirectionField d = zero_field(tg, grid);
    for (int k = 1; k <= tg.n_steps; ++k)
        for (int i = 0; i < grid.n; ++i)
            if (grid.omega_mask[i]) d(k, i) = rng.uniform(-1.0, 1.0);
    return d;
}

} // namespace fracbilin
