#include "fracbilin/fracop.hpp"

#include "fracbilin/errors.hpp"
#include "fracbilin/special.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace fracbilin {

double compute_cns(int n_dim, double s) {
    if (n_dim < 1) throw DomainError("compute_cns: n_dim must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("compute_cns: s must lie in (0,1)");
    const double num = std::pow(2.0, 2.0 * s) * gamma_fn((n_dim + 2.0 * s) / 2.0);
    const double den = std::pow(std::numbers::pi, n_dim / 2.0) * std::abs(gamma_fn(-s));
    return num / den;
}

std::vector<double> fracdiff_weights(double s, int kmax) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("fracdiff_weights: s must lie in (0,1)");
    if (kmax < 0) throw DomainError("fracdiff_weights: kmax must be >= 0");
    std::vector<double> w(kmax + 1);
    const double g1 = gamma_fn(s + 1.0);
    w[0] = gamma_fn(2.0 * s + 1.0) / (g1 * g1);
    for (int k = 0; k < kmax; ++k) w[k + 1] = w[k] * (k - s) / (k + 1 + s);
    return w;
}

StiffnessMatrix assemble(const Grid& grid, double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("assemble: s must lie in (0,1)");
    const int n = grid.n;
    const std::vector<double> w = fracdiff_weights(s, n - 1);
    // sign pattern: positive central weight, nonpositive tail
    if (!(w[0] > 0.0)) throw DomainError("assemble: central weight not positive");
    for (int k = 1; k < n; ++k)
        if (w[k] > 0.0) throw DomainError("assemble: off-center weight positive at k=" + std::to_string(k));

    StiffnessMatrix A;
    A.s = s;
    A.h = grid.h;
    A.n = n;
    const double scale = std::pow(grid.h, -2.0 * s);
    A.a.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A.a(i, j) = scale * w[std::abs(i - j)];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.a, Eigen::EigenvaluesOnly);
    A.lambda_min = es.eigenvalues()(0);
    if (!(A.lambda_min >= 1e-12))
        throw DomainError("assemble: operator not positive definite (lambda_min = " +
                          std::to_string(A.lambda_min) + ")");
    return A;
}

Eigen::VectorXd apply(const StiffnessMatrix& a, const Eigen::VectorXd& u) {
    if (u.size() != a.n) throw DimensionMismatch("apply: vector length != n_interior");
    return a.a * u;
}

double bilinear_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w, const StiffnessMatrix& a) {
    if (u.size() != a.n || w.size() != a.n)
        throw DimensionMismatch("bilinear_form: vector length != n_interior");
    return u.dot(a.a * w) * a.h;
}

double h0s_norm(const Eigen::VectorXd& u, const StiffnessMatrix& a) {
    const double q = bilinear_form(u, u, a);
    return std::sqrt(std::max(0.0, q));
}

void dump_matrix_csv(std::ostream& os, const StiffnessMatrix& a) {
    char buf[40];
    for (int i = 0; i < a.n; ++i) {
        for (int j = 0; j < a.n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a.a(i, j));
            os << (j ? "," : "") << buf;
        }
        os << "\n";
    }
}

Discretization make_discretization(const ProblemSpec& spec, const DiscParams& p) {
    Discretization d;
    d.grid = make_grid(spec, p.n_interior);
    d.tg = make_time_grid(spec, p.n_steps);
    d.A = assemble(d.grid, spec.s);
    return d;
}

} // namespace fracbilin
