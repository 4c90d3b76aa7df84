#include "fracbilin/adjoint.hpp"

#include "fracbilin/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace fracbilin {

namespace {

// run_transpose returns lambda_k in row k; multiplier storage shifts that
// down one row so the terminal row is zero.
AdjointField shift_to_multiplier_rows(const Field& lam, const TimeGrid& tg, const Grid& g) {
    AdjointField q = zero_field(tg, g);
    for (int k = 1; k <= tg.n_steps; ++k) q.row(k - 1) = lam.row(k);
    return q;
}

} // namespace

AdjointField solve_adjoint_discrete(const StepEngine& eng, const Field& y) {
    const Grid& g = eng.disc->grid;
    const TimeGrid& tg = eng.disc->tg;
    require_shape(y, tg, g, "state");
    const Eigen::VectorXd yd = sample_space(eng.spec->yd, g, tg.T);
    Field w = zero_field(tg, g);
    w.row(tg.n_steps) = y.row(tg.n_steps) - yd.transpose();
    return shift_to_multiplier_rows(run_transpose(eng, w), tg, g);
}

AdjointField solve_adjoint_discrete(const ProblemSpec& spec, const Discretization& disc,
                                    const ControlField& v, const Field& y) {
    const StepEngine eng = make_engine(spec, disc, v, 0.0);
    return solve_adjoint_discrete(eng, y);
}

AdjointField adjoint_linear_solve(const StepEngine& eng, const Field& w) {
    return shift_to_multiplier_rows(run_transpose(eng, w), eng.disc->tg, eng.disc->grid);
}

AdjointField solve_adjoint_continuous(const ProblemSpec& spec, const Discretization& disc,
                                      const ControlField& v, const Field& y) {
    const Grid& g = disc.grid;
    const TimeGrid& tg = disc.tg;
    require_shape(v, tg, g, "control");
    require_shape(y, tg, g, "state");
    const int K = tg.n_steps;
    const double dt = tg.dt;

    Eigen::MatrixXd base = disc.A.a * dt;
    base.diagonal().array() += 1.0;
    const Eigen::VectorXd yd = sample_space(spec.yd, g, tg.T);

    AdjointField q = zero_field(tg, g);
    for (int k = K - 1; k >= 0; --k) {
        Eigen::MatrixXd Bk = base;
        for (int i = 0; i < g.n; ++i)
            if (g.omega_mask[i]) Bk(i, i) -= dt * v(k, i);

        // future memory: trapezoid over [t_k, T] with the unknown endpoint
        // dropped; the terminal node carries half weight (and a zero row)
        Eigen::VectorXd futmem = Eigen::VectorXd::Zero(g.n);
        for (int j = k + 1; j <= K; ++j) {
            const double wgt = (j == K) ? 0.5 * dt : dt;
            for (int i = 0; i < g.n; ++i)
                futmem[i] += wgt * spec.kappa(tg.t[j], tg.t[k], g.x[i]) * q(j, i);
        }

        Eigen::VectorXd rhs = (k == K - 1) ? (y.row(K).transpose() - yd).eval()
                                           : q.row(k + 1).transpose().eval();
        rhs -= dt * futmem;

        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bk);
        const Eigen::VectorXd qk = lu.solve(rhs);
        double denom = rhs.norm();
        if (denom == 0.0) denom = 1.0;
        const double rel = (Bk * qk - rhs).norm() / denom;
        if (!(rel <= 1e-12) || !qk.allFinite()) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "backward step %d: relative residual %.3e", k, rel);
            throw SingularSystem(buf);
        }
        q.row(k) = qk.transpose();
    }
    return q;
}

CheckEntry adjoint_estimate_check(const ProblemSpec& spec, const Discretization& disc,
                                  const ControlField& v, const AdjointField& q) {
    const Grid& g = disc.grid;
    const TimeGrid& tg = disc.tg;
    require_shape(v, tg, g, "control");
    require_shape(q, tg, g, "costate");

    const double qs = sup_abs(q);
    double energy = 0.0;
    for (int k = 0; k < tg.n_steps; ++k) {
        const Eigen::VectorXd qk = q.row(k).transpose();
        const double vn = h0s_norm(qk, disc.A);
        energy += tg.dt * vn * vn;
    }

    const double y0s = sup_abs_space(spec.y0, g);
    const double fs = sup_abs_spacetime(spec.f, g, tg);
    const double yds = sup_abs_space(spec.yd, g);
    const double denom = y0s * y0s + fs * fs + yds * yds;

    CheckEntry e;
    e.name = "adjoint_energy_ratio";
    e.anchor = "qo";
    e.lhs = qs * qs + energy;
    e.rhs = denom;
    e.pass = std::isfinite(e.lhs) && denom > 0.0;
    e.margin = denom > 0.0 ? e.lhs / denom : std::numeric_limits<double>::infinity();
    return e;
}

} // namespace fracbilin
