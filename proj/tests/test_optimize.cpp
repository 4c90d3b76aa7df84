#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <fracbilin/errors.hpp>
#include <fracbilin/optimize.hpp>

#include <cmath>

using namespace fracbilin;

TEST_CASE("pointwise projection reproduces the closed-form trichotomy") {
    // alpha = 1, box [0, 1]
    CHECK(project_box(0.3, 1.0, 0.0, 1.0, -0.5) == 0.5);  // interior: -yq/alpha
    CHECK(project_box(0.3, 1.0, 0.0, 1.0, -3.0) == 1.0);  // clipped above
    CHECK(project_box(0.3, 1.0, 0.0, 1.0, 2.0) == 0.0);   // clipped below
    // alpha scales the target
    CHECK(project_box(0.0, 2.0, 0.0, 1.0, -0.5) == 0.25);
    // asymmetric box
    CHECK(project_box(0.0, 1.0, -0.2, 0.4, 1.0) == -0.2);
}

TEST_CASE("optimality residual vanishes exactly at the projected target") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {16, 8});
    Rng rng(41);
    ControlField v = random_control(c.spec, d.grid, d.tg, rng);
    Field y = solve_forward(c.spec, d, v);
    AdjointField q = solve_adjoint_discrete(c.spec, d, v, y);
    // manufacture the fixed point of the stationarity map
    ControlField u = zero_field(d.tg, d.grid);
    for (int k = 1; k <= 8; ++k)
        for (int i = 0; i < 16; ++i)
            if (d.grid.omega_mask[i])
                u(k, i) = project_box(0.0, c.spec.alpha, c.spec.m, c.spec.M,
                                      y(k, i) * q(k - 1, i));
    CHECK(optimality_residual(u, y, q, c.spec, d) == 0.0);

    // a single-node perturbation of size delta contributes delta sqrt(h dt)
    const double delta = 0.125;
    int inode = 0;
    while (!d.grid.omega_mask[inode]) ++inode;
    ControlField u2 = u;
    u2(3, inode) = std::min(c.spec.M, u(3, inode) + delta);
    const double moved = u2(3, inode) - u(3, inode);
    CHECK(optimality_residual(u2, y, q, c.spec, d) ==
          doctest::Approx(std::abs(moved) * std::sqrt(d.grid.h * d.tg.dt)).epsilon(1e-12));
}

TEST_CASE("projected gradient converges on the default case") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, c.disc);
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, c.opt, u0);
    CHECK(r.converged);
    CHECK(r.iterations <= c.opt.max_iters);
    CHECK(r.residual_history.back() <= c.opt.tol);
    // cost history is monotone nonincreasing (Armijo accepts descent only)
    for (size_t i = 0; i + 1 < r.J_history.size(); ++i)
        CHECK(r.J_history[i + 1] <= r.J_history[i] + 1e-15);
    // iterate stays admissible
    for (int k = 0; k <= d.tg.n_steps; ++k)
        for (int i = 0; i < d.grid.n; ++i) {
            if (!d.grid.omega_mask[i]) {
                CHECK(r.u_opt(k, i) == 0.0);
            } else {
                CHECK(r.u_opt(k, i) >= c.spec.m);
                CHECK(r.u_opt(k, i) <= c.spec.M);
            }
        }
    // returned state and costate belong to the returned control
    Field y = solve_forward(c.spec, d, r.u_opt);
    CHECK((y - r.y_opt).cwiseAbs().maxCoeff() == 0.0);
    AdjointField q = solve_adjoint_discrete(c.spec, d, r.u_opt, y);
    CHECK((q - r.q_opt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("restarting from the minimizer terminates without an iteration") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {32, 16});
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult first = solve_pgd(c.spec, d, c.opt, u0);
    REQUIRE(first.converged);
    OptResult again = solve_pgd(c.spec, d, c.opt, first.u_opt);
    CHECK(again.converged);
    CHECK(again.iterations == 0);
    CHECK((again.u_opt - first.u_opt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical configurations yield bitwise identical minimizers") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {32, 16});
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult a = solve_pgd(c.spec, d, c.opt, u0);
    OptResult b = solve_pgd(c.spec, d, c.opt, u0);
    CHECK((a.u_opt - b.u_opt).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.J_history == b.J_history);
    CHECK(a.residual_history == b.residual_history);
}

TEST_CASE("variational inequality holds at the minimizer against random draws") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {32, 16});
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, c.opt, u0);
    REQUIRE(r.converged);
    Rng rng(77);
    const double worst =
        variational_inequality_min(c.spec, d, r.u_opt, r.y_opt, r.q_opt, 100, rng);
    CHECK(worst >= -1e-8);
}

TEST_CASE("multi-start experiment contracts at large alpha") {
    auto c = support::default_case();
    ProblemSpec sp = c.spec;
    sp.alpha = 10.0;
    Discretization d = make_discretization(sp, {32, 16});
    UniquenessReport rep = uniqueness_experiment(sp, d, c.opt, 3);
    CHECK(rep.n_starts == 3);
    CHECK(rep.asserted);
    CHECK(rep.passed);
    CHECK(rep.max_distance <= 1e-6);
    REQUIRE(rep.pairwise.size() == 3);
    for (double p : rep.pairwise) CHECK(p <= rep.max_distance);
    CHECK(rep.alpha == 10.0);
    CHECK(rep.sigma == std::max(std::abs(sp.m), std::abs(sp.M)));
    CHECK(rep.c_emp > 0.0);
}

TEST_CASE("unreachable tolerance inside the start budget raises NotConverged") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {16, 8});
    OptimizerConfig cfg = c.opt;
    cfg.max_iters = 1;
    cfg.tol = 1e-15;
    CHECK_THROWS_AS(uniqueness_experiment(c.spec, d, cfg, 2), NotConverged);
}

TEST_CASE("active set: threshold sweep and precondition") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {16, 8});
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, c.opt, u0);
    REQUIRE(r.converged);

    ActiveSet tiny = active_set(r.u_opt, r.y_opt, r.q_opt, c.spec, d, 1e-8);
    ActiveSet huge = active_set(r.u_opt, r.y_opt, r.q_opt, c.spec, d, 1e12);
    int n_tiny = 0, n_huge = 0;
    for (int k = 0; k < tiny.mask.rows(); ++k)
        for (int i = 0; i < tiny.mask.cols(); ++i) {
            n_tiny += tiny.mask(k, i);
            n_huge += huge.mask(k, i);
            // active nodes sit at a bound
            if (tiny.mask(k, i)) {
                const bool at_bound = r.u_opt(k, i) == c.spec.m || r.u_opt(k, i) == c.spec.M;
                CHECK(at_bound);
            }
        }
    CHECK(n_huge == 0);
    CHECK(n_tiny >= n_huge);
    // level 0 never activates
    for (int i = 0; i < tiny.mask.cols(); ++i) CHECK(tiny.mask(0, i) == 0);
    CHECK_THROWS_AS(active_set(r.u_opt, r.y_opt, r.q_opt, c.spec, d, -1.0), DomainError);
}

TEST_CASE("cone samples respect the active-set sign structure") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {16, 8});
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, c.opt, u0);
    REQUIRE(r.converged);
    const double tau = 1e-8;
    ActiveSet as = active_set(r.u_opt, r.y_opt, r.q_opt, c.spec, d, tau);
    Rng rng(55);
    for (int t = 0; t < 20; ++t) {
        ConeSample cs = cone_sample(r.u_opt, r.y_opt, r.q_opt, c.spec, d, tau, rng);
        for (int k = 1; k <= d.tg.n_steps; ++k)
            for (int i = 0; i < d.grid.n; ++i) {
                if (!d.grid.omega_mask[i]) {
                    CHECK(cs.v(k, i) == 0.0);
                    continue;
                }
                if (as.mask(k, i)) CHECK(cs.v(k, i) == 0.0);
                if (std::abs(r.u_opt(k, i) - c.spec.m) <= 1e-12) CHECK(cs.v(k, i) >= 0.0);
                if (std::abs(r.u_opt(k, i) - c.spec.M) <= 1e-12) CHECK(cs.v(k, i) <= 0.0);
            }
    }
    // same seed, same draw
    Rng r1(9), r2(9);
    ConeSample a = cone_sample(r.u_opt, r.y_opt, r.q_opt, c.spec, d, tau, r1);
    ConeSample b = cone_sample(r.u_opt, r.y_opt, r.q_opt, c.spec, d, tau, r2);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second-order report on the default minimizer") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, c.disc);
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, c.opt, u0);
    REQUIRE(r.converged);
    SoscReport rep = sosc_check(r.u_opt, r.y_opt, r.q_opt, c.spec, d, 1e-8, 25, 1234);
    CHECK(rep.n_samples == 25);
    CHECK_FALSE(rep.cone_trivial);
    CHECK(rep.necessary_ok);
    CHECK(rep.min_normalized >= -1e-10);
    CHECK(rep.beta_positive);
    CHECK(rep.beta_fit > 0.0);
    CHECK(rep.n_control_nodes > 0);
    // determinism under the explicit seed
    SoscReport rep2 = sosc_check(r.u_opt, r.y_opt, r.q_opt, c.spec, d, 1e-8, 25, 1234);
    CHECK(rep.min_quadratic == rep2.min_quadratic);
    CHECK(rep.beta_fit == rep2.beta_fit);
}

TEST_CASE("line search stall surfaces as its own error") {
    // With a sufficient-decrease factor beyond 1 (representable only by
    // constructing the struct directly; the config reader rejects it) no
    // genuine step can satisfy Armijo, and a steep gradient keeps the
    // trial iterates distinguishable all the way down to the step floor.
    auto c = support::default_case();
    ProblemSpec sp = c.spec;
    sp.alpha = 5.0;
    Discretization d = make_discretization(sp, {16, 8});
    OptimizerConfig cfg = c.opt;
    cfg.armijo_c = 2.0;
    cfg.tol = 1e-300;
    ControlField u0 = project_control(Field::Constant(9, 16, sp.M), sp, d.grid);
    CHECK_THROWS_AS(solve_pgd(sp, d, cfg, u0), LineSearchStall);
}

TEST_CASE("impossible tolerance exhausts the budget without converging") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {16, 8});
    OptimizerConfig cfg = c.opt;
    cfg.tol = 1e-300;
    cfg.max_iters = 5;
    ControlField u0 = project_control(zero_field(d.tg, d.grid), c.spec, d.grid);
    OptResult r = solve_pgd(c.spec, d, cfg, u0);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 5);
}
