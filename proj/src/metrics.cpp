#include "klmc/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace klmc {

namespace {

constexpr int kMaxAssignmentSize = 4096;

void check_summary(const GaussianSummary& g, const char* who) {
  if (g.cov.rows() != g.cov.cols() || g.cov.rows() != g.mean.size())
    throw std::invalid_argument(std::string(who) + ": inconsistent summary dimensions");
  double scale = std::max(1.0, g.cov.cwiseAbs().maxCoeff());
  double asym = (g.cov - g.cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument(std::string(who) + ": covariance not symmetric");
}

// Symmetric PSD square root with the documented clamp: eigenvalues in
// [-1e-10 * lambda_max, 0) are treated as roundoff and clamped to zero,
// anything more negative is rejected.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sym, const char* who) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sym + sym.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10 * top)
      throw std::invalid_argument(std::string(who) + ": covariance is indefinite");
    if (ev[i] < 0.0) ev[i] = 0.0;
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double w2_gaussian(const GaussianSummary& a, const GaussianSummary& b) {
  check_summary(a, "w2_gaussian");
  check_summary(b, "w2_gaussian");
  if (a.mean.size() != b.mean.size())
    throw std::invalid_argument("w2_gaussian: dimension mismatch");

  Eigen::MatrixXd rb = psd_sqrt(b.cov, "w2_gaussian");
  Eigen::MatrixXd cross = rb * a.cov * rb;
  Eigen::MatrixXd cross_root = psd_sqrt(cross, "w2_gaussian");

  double mean_term = (a.mean - b.mean).squaredNorm();
  double trace_term = a.cov.trace() + b.cov.trace() - 2.0 * cross_root.trace();
  return std::sqrt(std::max(0.0, mean_term + trace_term));
}

double solve_assignment(std::span<const double> cost, int n, std::vector<int>& col_of_row) {
  // Jonker-Volgenant: column reduction, reduction transfer, two augmenting
  // row-reduction passes, then shortest augmenting paths for the leftover
  // free rows. Exact on real-valued costs.
  const double big = std::numeric_limits<double>::infinity();
  auto at = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + j]; };

  std::vector<int> rowsol(n, -1), colsol(n, -1), free_rows(n), collist(n), pred(n);
  std::vector<int> matches(n, 0);
  std::vector<double> v(n, 0.0), d(n);
  int numfree = 0;

  // Column reduction, scanning columns back to front.
  for (int j = n - 1; j >= 0; --j) {
    double min_c = at(0, j);
    int imin = 0;
    for (int i = 1; i < n; ++i)
      if (at(i, j) < min_c) {
        min_c = at(i, j);
        imin = i;
      }
    v[j] = min_c;
    if (++matches[imin] == 1) {
      rowsol[imin] = j;
      colsol[j] = imin;
    } else {
      colsol[j] = -1;
    }
  }

  // Reduction transfer from single-assigned rows.
  for (int i = 0; i < n; ++i) {
    if (matches[i] == 0) {
      free_rows[numfree++] = i;
    } else if (matches[i] == 1) {
      int j1 = rowsol[i];
      double min_r = big;
      for (int j = 0; j < n; ++j)
        if (j != j1) min_r = std::min(min_r, at(i, j) - v[j]);
      if (min_r < big) v[j1] -= min_r;
    }
  }

  // Two passes of augmenting row reduction.
  for (int loop = 0; loop < 2; ++loop) {
    int k = 0;
    int prvnumfree = numfree;
    numfree = 0;
    while (k < prvnumfree) {
      int i = free_rows[k++];
      double umin = at(i, 0) - v[0], usubmin = big;
      int j1 = 0, j2 = -1;
      for (int j = 1; j < n; ++j) {
        double h = at(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      int i0 = colsol[j1];
      if (umin < usubmin) {
        v[j1] -= usubmin - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[j1];
      }
      rowsol[i] = j1;
      colsol[j1] = i;
      if (i0 >= 0) {
        if (umin < usubmin)
          free_rows[--k] = i0;
        else
          free_rows[numfree++] = i0;
      }
    }
  }

  // Shortest augmenting path for each remaining free row.
  for (int f = 0; f < numfree; ++f) {
    int freerow = free_rows[f];
    for (int j = 0; j < n; ++j) {
      d[j] = at(freerow, j) - v[j];
      pred[j] = freerow;
      collist[j] = j;
    }
    int low = 0, up = 0, last = -1, endofpath = -1;
    double min_d = 0.0;
    bool found = false;
    do {
      if (up == low) {
        last = low - 1;
        min_d = d[collist[up++]];
        for (int k = up; k < n; ++k) {
          int j = collist[k];
          double h = d[j];
          if (h <= min_d) {
            if (h < min_d) {
              up = low;
              min_d = h;
            }
            collist[k] = collist[up];
            collist[up++] = j;
          }
        }
        for (int k = low; k < up; ++k)
          if (colsol[collist[k]] < 0) {
            endofpath = collist[k];
            found = true;
            break;
          }
      }
      if (!found) {
        int j1 = collist[low++];
        int i = colsol[j1];
        double h = at(i, j1) - v[j1] - min_d;
        for (int k = up; k < n; ++k) {
          int j = collist[k];
          double v2 = at(i, j) - v[j] - h;
          if (v2 < d[j]) {
            pred[j] = i;
            if (v2 == min_d) {
              if (colsol[j] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[k] = collist[up];
              collist[up++] = j;
            }
            d[j] = v2;
          }
        }
      }
    } while (!found);

    for (int k = 0; k <= last; ++k) {
      int j1 = collist[k];
      v[j1] += d[j1] - min_d;
    }
    int i;
    do {
      i = pred[endofpath];
      colsol[endofpath] = i;
      int j1 = endofpath;
      endofpath = rowsol[i];
      rowsol[i] = j1;
    } while (i != freerow);
  }

  col_of_row = rowsol;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += at(i, rowsol[i]);
  return total;
}

double w2_empirical(std::span<const double> a, std::span<const double> b, int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("w2_empirical: need n, k >= 1");
  if (a.size() != static_cast<std::size_t>(n) * k || b.size() != a.size())
    throw std::invalid_argument("w2_empirical: point sets must both be n x k");
  if (n > kMaxAssignmentSize)
    throw std::invalid_argument(
        "w2_empirical: n > 4096; use the Gaussian moment-matched surrogate instead");

  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double* ai = a.data() + static_cast<std::size_t>(i) * k;
    for (int j = 0; j < n; ++j) {
      const double* bj = b.data() + static_cast<std::size_t>(j) * k;
      double s = 0.0;
      for (int t = 0; t < k; ++t) {
        double d = ai[t] - bj[t];
        s += d * d;
      }
      cost[static_cast<std::size_t>(i) * n + j] = s;
    }
  }
  std::vector<int> perm;
  double total = solve_assignment(cost, n, perm);
  return std::sqrt(std::max(0.0, total / n));
}

GaussianSummary empirical_moments(const EnsembleState& st, MomentSel which) {
  if (st.chains < 2) throw std::invalid_argument("empirical_moments: need M >= 2");
  int d = st.dim;
  int k = which == MomentSel::xv ? 2 * d : d;
  auto coord = [&](int c, int j) -> double {
    if (which == MomentSel::x) return st.chain_x(c)[j];
    if (which == MomentSel::v) return st.chain_v(c)[j];
    return j < d ? st.chain_x(c)[j] : st.chain_v(c)[j - d];
  };

  GaussianSummary g;
  g.mean = Eigen::VectorXd::Zero(k);
  g.cov = Eigen::MatrixXd::Zero(k, k);
  for (int c = 0; c < st.chains; ++c)
    for (int j = 0; j < k; ++j) g.mean[j] += coord(c, j);
  g.mean /= st.chains;
  Eigen::VectorXd row(k);
  for (int c = 0; c < st.chains; ++c) {
    for (int j = 0; j < k; ++j) row[j] = coord(c, j) - g.mean[j];
    g.cov.noalias() += row * row.transpose();
  }
  g.cov /= (st.chains - 1);
  return g;
}

double kinetic_energy(const EnsembleState& st) {
  double s = 0.0;
  for (int c = 0; c < st.chains; ++c) {
    auto vs = st.chain_v(c);
    for (double vi : vs) s += vi * vi;
  }
  return s / st.chains;
}

GaussianSummary target_x_summary(const TargetModel& target) {
  if (!target.stationary_covariance.has_value())
    throw std::invalid_argument("target_x_summary: target has no closed-form moments");
  int d = target.dim;
  GaussianSummary g;
  g.mean = Eigen::VectorXd::Zero(d);
  if (target.minimizer.has_value())
    for (int i = 0; i < d; ++i) g.mean[i] = (*target.minimizer)[i];
  g.cov.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g.cov(i, j) = (*target.stationary_covariance)[static_cast<std::size_t>(i) * d + j];
  return g;
}

}  // namespace klmc
