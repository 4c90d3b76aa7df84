#pragma once

// Shared fixtures and independent reference computations for the test
// suites.  Everything here is deliberately written against the public
// headers only, and the reference integrators use different numerics than
// the library (Gauss-Legendre principal-value quadrature, dense matrix
// exponentials) so that agreement is evidence rather than tautology.

#include <fracbilin/adjoint.hpp>
#include <fracbilin/diagnostics.hpp>
#include <fracbilin/forward.hpp>
#include <fracbilin/fracop.hpp>
#include <fracbilin/optimize.hpp>
#include <fracbilin/problem.hpp>
#include <fracbilin/sensitivity.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace support {

using namespace fracbilin;

// Mirrors cases/default.toml.
inline CaseConfig default_case() {
    CaseConfig c;
    c.spec.domain_lo = -1.0;
    c.spec.domain_hi = 1.0;
    c.spec.omega_lo = -0.5;
    c.spec.omega_hi = 0.5;
    c.spec.T = 1.0;
    c.spec.s = 0.5;
    c.spec.alpha = 1.0;
    c.spec.m = 0.0;
    c.spec.M = 1.0;
    c.spec.y0.space.kind = SpaceFunc::Kind::Gaussian;
    c.spec.y0.space.amp = 1.0;
    c.spec.y0.space.center = 0.0;
    c.spec.y0.space.width = 0.4;
    c.spec.yd.space.kind = SpaceFunc::Kind::Gaussian;
    c.spec.yd.space.amp = 0.8;
    c.spec.yd.space.center = 0.2;
    c.spec.yd.space.width = 0.4;
    c.spec.f.space.kind = SpaceFunc::Kind::Constant;
    c.spec.f.space.value = 0.1;
    c.spec.kappa.kind = KernelSpec::Kind::Constant;
    c.spec.kappa.value = 0.5;
    c.spec.kappa.sup_bound = 0.5;
    c.disc.n_interior = 64;
    c.disc.n_steps = 64;
    c.opt.tol = 1e-8;
    c.opt.max_iters = 500;
    c.opt.step0 = 1.0;
    c.opt.seed = 20240817;
    return c;
}

inline std::string default_case_text() {
    return canonical_serialize(default_case());
}

// ---------------------------------------------------------------------------
// 64-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on the
// three-term recurrence.  Cached after the first call.

struct GaussLegendre {
    std::vector<double> x, w;
};

inline const GaussLegendre& gl64() {
    static GaussLegendre rule = [] {
        constexpr int n = 64;
        GaussLegendre r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < n; ++i) {
            // Chebyshev-like initial guess, then Newton on P_n.
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            r.x[i] = t;
            r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return r;
    }();
    return rule;
}

inline double gl_integrate(const std::function<double(double)>& f, double a, double b) {
    const auto& r = gl64();
    const double mid = 0.5 * (a + b), hal = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mid + hal * r.x[i]);
    return hal * acc;
}

// ---------------------------------------------------------------------------
// Principal-value evaluation of the singular integral operator at one
// point, for u supported on (lo, hi) with known second derivative.  The
// integral is split at |x - y| = delta: the inner part is desingularized
// through the second difference (2u(x) - u(x+z) - u(x-z))/z^2 and a
// power-law substitution, the middle part uses geometric panels refining
// toward the split, and the exterior tail is exact for u = 0 outside.
// Accurate to ~1e-10 for smooth u and s <= 0.5; degrades for larger s.

struct PvOperator {
    std::function<double(double)> u;   // extended by zero outside (lo, hi)
    std::function<double(double)> u2;  // second derivative inside
    double s = 0.5;
    double lo = -1.0, hi = 1.0;

    double normalizer() const { return compute_cns(1, s); }

    double operator()(double xq, double delta) const {
        const double p = 2.0 - 2.0 * s;
        auto psi = [&](double z) {
            if (z < 1e-8) return -u2(xq);
            return (2.0 * u(xq) - u(xq + z) - u(xq - z)) / (z * z);
        };
        const double inner =
            (1.0 / p) * gl_integrate([&](double w) { return psi(std::pow(w, 1.0 / p)); }, 0.0,
                                     std::pow(delta, p));

        auto integrand = [&](double y) {
            return (u(xq) - u(y)) / std::pow(std::abs(xq - y), 1.0 + 2.0 * s);
        };
        double middle = 0.0;
        for (int side = 0; side < 2; ++side) {
            double a = side == 0 ? lo : xq + delta;
            double b = side == 0 ? xq - delta : hi;
            if (b <= a) continue;
            // geometric panels, halving toward the singular end
            std::vector<double> edges;
            double len = b - a;
            if (side == 0) {
                edges.push_back(b);
                while (len > 1e-12 && edges.size() < 60) {
                    double step = std::max(len / 2, 1e-12);
                    edges.push_back(edges.back() - step);
                    len -= step;
                }
                edges.back() = a;
                std::reverse(edges.begin(), edges.end());
            } else {
                edges.push_back(a);
                while (len > 1e-12 && edges.size() < 60) {
                    double step = std::max(len / 2, 1e-12);
                    edges.push_back(edges.back() + step);
                    len -= step;
                }
                edges.back() = b;
            }
            for (size_t i = 0; i + 1 < edges.size(); ++i)
                middle += gl_integrate(integrand, edges[i], edges[i + 1]);
        }
        const double tail = u(xq) *
                            (std::pow(hi - xq, -2.0 * s) + std::pow(xq - lo, -2.0 * s)) /
                            (2.0 * s);
        return normalizer() * (inner + middle + tail);
    }
};

// ---------------------------------------------------------------------------
// Dense matrix-exponential reference for the semi-discrete system
// y' = -A y (no memory, no control, no source):  y(t) = expm(-tA) y0.

inline Eigen::VectorXd expm_reference(const StiffnessMatrix& a, double t,
                                      const Eigen::VectorXd& y0) {
    Eigen::MatrixXd m = (-t * a.a).eval();
    return m.exp() * y0;
}

// ---------------------------------------------------------------------------
// Central finite differences of the reduced cost along a direction.

inline double fd_directional(const ProblemSpec& spec, const Discretization& disc,
                             const ControlField& v, const DirectionField& w, double eps) {
    ControlField vp = v + eps * w;
    ControlField vm = v - eps * w;
    return (objective(spec, disc, vp) - objective(spec, disc, vm)) / (2.0 * eps);
}

inline double fd_second(const ProblemSpec& spec, const Discretization& disc,
                        const ControlField& v, const DirectionField& w, double eps) {
    ControlField vp = v + eps * w;
    ControlField vm = v - eps * w;
    const double j0 = objective(spec, disc, v);
    return (objective(spec, disc, vp) - 2.0 * j0 + objective(spec, disc, vm)) / (eps * eps);
}

// ---------------------------------------------------------------------------
// Seeded nonnegative problem instances for the positivity and energy
// sweeps: y0 >= 0 and f >= 0 by construction, kernel constant in [0, 1],
// admissible box [0, M] with dt * M < 1.

inline ProblemSpec random_nonneg_spec(Rng& rng) {
    ProblemSpec sp;
    sp.T = 1.0;
    sp.s = 0.25 + 0.5 * rng.uniform();
    sp.alpha = 1.0;
    sp.m = 0.0;
    sp.M = 0.5 + 0.4 * rng.uniform();  // dt * M < 1 for every desk-scale dt
    sp.y0.space.kind = SpaceFunc::Kind::Gaussian;
    sp.y0.space.amp = 0.2 + rng.uniform();
    sp.y0.space.center = -0.4 + 0.8 * rng.uniform();
    sp.y0.space.width = 0.2 + 0.4 * rng.uniform();
    sp.f.space.kind = SpaceFunc::Kind::Gaussian;
    sp.f.space.amp = 0.5 * rng.uniform();
    sp.f.space.center = -0.4 + 0.8 * rng.uniform();
    sp.f.space.width = 0.3 + 0.3 * rng.uniform();
    sp.yd.space.kind = SpaceFunc::Kind::Constant;
    sp.yd.space.value = rng.uniform();
    sp.kappa.kind = KernelSpec::Kind::Constant;
    sp.kappa.value = rng.uniform();
    sp.kappa.sup_bound = sp.kappa.value;
    return sp;
}

} // namespace support
