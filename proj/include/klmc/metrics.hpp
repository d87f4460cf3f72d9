// Wasserstein-2 distances and moment diagnostics. w2_gaussian is the
// closed-form (Bures) distance between Gaussian summaries; w2_empirical is
// the exact assignment-based distance between equal-size point sets.
#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "klmc/sampler.hpp"

namespace klmc {

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// sqrt(||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_b^{1/2} S_a S_b^{1/2})^{1/2})).
// Covariances must be symmetric (tol 1e-12 relative) and PSD up to an
// eigenvalue clamp at -1e-10 relative; worse violations are usage errors.
double w2_gaussian(const GaussianSummary& a, const GaussianSummary& b);

// Exact empirical W2 between n-point sets in R^k (rows of a/b, flat layout):
// sqrt((1/n) min over permutations of sum ||a_i - b_{pi(i)}||^2), solved as an
// exact assignment problem. n <= 4096.
double w2_empirical(std::span<const double> a, std::span<const double> b, int n, int k);

// Exact linear assignment on a dense n x n cost matrix (row-major); returns
// the optimal total cost and fills col_of_row. O(n^3) shortest augmenting
// paths with dual potentials.
double solve_assignment(std::span<const double> cost, int n, std::vector<int>& col_of_row);

enum class MomentSel { x, v, xv };

// Sample mean and unbiased covariance of the selected coordinates. M >= 2.
GaussianSummary empirical_moments(const EnsembleState& st, MomentSel which);

// Mean over chains of ||v||^2.
double kinetic_energy(const EnsembleState& st);

// Exact stationary x-marginal summary N(x*, H^{-1}) for targets that carry a
// stationary covariance (quadratic targets).
GaussianSummary target_x_summary(const TargetModel& target);

}  // namespace klmc
