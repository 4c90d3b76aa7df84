#pragma once

#include "fracbilin/grid.hpp"
#include "fracbilin/problem.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace fracbilin {

/// Normalization constant C_{N,s} of the singular-integral fractional
/// Laplacian: 2^{2s} Gamma((N+2s)/2) / (pi^{N/2} |Gamma(-s)|).
double compute_cns(int n_dim, double s);

/// Centered-difference weights w_0..w_kmax for order 2s.
/// w_k = (-1)^k Gamma(2s+1) / (Gamma(s-k+1) Gamma(s+k+1)), evaluated by the
/// stable ratio recurrence w_{k+1} = w_k (k-s)/(k+1+s).
std::vector<double> fracdiff_weights(double s, int kmax);

// Dense symmetric discretization of the restricted fractional Laplacian on
// the interior nodes: a(i,j) = h^{-2s} w_{|i-j|}; exterior values are zero.
struct StiffnessMatrix {
    Eigen::MatrixXd a;
    double s = 0.0;
    double h = 0.0;
    int n = 0;
    double lambda_min = 0.0; // smallest eigenvalue, computed at assembly
};

/// Assemble for the given grid.  Verifies the M-matrix sign pattern and
/// positive definiteness (smallest eigenvalue >= 1e-12) before returning.
StiffnessMatrix assemble(const Grid& grid, double s);

Eigen::VectorXd apply(const StiffnessMatrix& a, const Eigen::VectorXd& u);

/// u^T a w * h, the discrete counterpart of the energy inner product.
double bilinear_form(const Eigen::VectorXd& u, const Eigen::VectorXd& w, const StiffnessMatrix& a);

double h0s_norm(const Eigen::VectorXd& u, const StiffnessMatrix& a);

/// Row-major CSV dump, 17 significant digits, for cross-implementation diffs.
void dump_matrix_csv(std::ostream& os, const StiffnessMatrix& a);

// Everything a solve needs: grids plus the assembled operator.
struct Discretization {
    Grid grid;
    TimeGrid tg;
    StiffnessMatrix A;
};

Discretization make_discretization(const ProblemSpec& spec, const DiscParams& p);

} // namespace fracbilin
