#include "klmc/gaussian_chain.hpp"

#include <cmath>

namespace klmc {

CoordGauss kernel_coord_step(const CoordGauss& g, const KernelCoefficients& k,
                             double lambda, double center) {
  // Linear map (x', v') = A (x, v) + const + eta, eta ~ N(0, Q), with the
  // gradient lambda (x - c) frozen at the step start.
  double a11 = 1.0 - k.b_x * lambda, a12 = k.a_xv;
  double a21 = -k.b_v * lambda, a22 = k.a_vv;
  double cx = k.b_x * lambda * center, cv = k.b_v * lambda * center;

  CoordGauss out;
  out.mean_x = a11 * g.mean_x + a12 * g.mean_v + cx;
  out.mean_v = a21 * g.mean_x + a22 * g.mean_v + cv;
  out.cov_xx = a11 * (a11 * g.cov_xx + a12 * g.cov_xv) +
               a12 * (a11 * g.cov_xv + a12 * g.cov_vv) + k.s_xx;
  out.cov_xv = a21 * (a11 * g.cov_xx + a12 * g.cov_xv) +
               a22 * (a11 * g.cov_xv + a12 * g.cov_vv) + k.s_xv;
  out.cov_vv = a21 * (a21 * g.cov_xx + a22 * g.cov_xv) +
               a22 * (a21 * g.cov_xv + a22 * g.cov_vv) + k.s_vv;
  return out;
}

UlaCoord ula_coord_step(const UlaCoord& g, double delta, double lambda, double center) {
  double a = 1.0 - delta * lambda;
  return {a * g.mean + delta * lambda * center, a * a * g.var + 2.0 * delta};
}

double w2x_coord_sq(const CoordGauss& g, double lambda, double center) {
  double dm = g.mean_x - center;
  double ds = std::sqrt(std::max(g.cov_xx, 0.0)) - std::sqrt(1.0 / lambda);
  return dm * dm + ds * ds;
}

double w2x_coord_sq(const UlaCoord& g, double lambda, double center) {
  double dm = g.mean - center;
  double ds = std::sqrt(std::max(g.var, 0.0)) - std::sqrt(1.0 / lambda);
  return dm * dm + ds * ds;
}

double w2_joint_coord_sq(const CoordGauss& g, double lambda, double L, double center) {
  // Bures distance between 2x2 Gaussians; the reference is diag(1/lambda, 1/L).
  double dm = (g.mean_x - center) * (g.mean_x - center) + g.mean_v * g.mean_v;
  double b11 = 1.0 / lambda, b22 = 1.0 / L;
  // C = B^{1/2} S B^{1/2}; trace of its square root via eigenvalues.
  double r1 = std::sqrt(b11), r2 = std::sqrt(b22);
  double c11 = r1 * g.cov_xx * r1, c12 = r1 * g.cov_xv * r2, c22 = r2 * g.cov_vv * r2;
  double tr = c11 + c22;
  double det = std::max(c11 * c22 - c12 * c12, 0.0);
  double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  double l1 = std::max(0.5 * (tr + disc), 0.0), l2 = std::max(0.5 * (tr - disc), 0.0);
  double cross = std::sqrt(l1) + std::sqrt(l2);
  return dm + (g.cov_xx + g.cov_vv) + (b11 + b22) - 2.0 * cross;
}

double ula_stationary_var(double delta, double lambda) {
  double a = 1.0 - delta * lambda;
  return 2.0 * delta / (1.0 - a * a);
}

std::uint64_t kernel_chain_crossing(double lambda, double L, double delta,
                                    const std::vector<double>& offsets, double eps,
                                    std::uint64_t cap) {
  KernelCoefficients k = kernel_coefficients(delta, L);
  // Coordinates with equal initial offsets evolve identically; collapse them.
  std::vector<std::pair<double, int>> classes;
  for (double off : offsets) {
    bool found = false;
    for (auto& [o, cnt] : classes)
      if (o == off) {
        ++cnt;
        found = true;
        break;
      }
    if (!found) classes.emplace_back(off, 1);
  }
  std::vector<CoordGauss> gs(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) gs[i].mean_x = classes[i].first;

  double eps2 = eps * eps;
  for (std::uint64_t it = 1; it <= cap; ++it) {
    double w2 = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      gs[i] = kernel_coord_step(gs[i], k, lambda, 0.0);
      w2 += classes[i].second * w2x_coord_sq(gs[i], lambda, 0.0);
    }
    if (w2 <= eps2) return it;
  }
  return 0;
}

std::uint64_t ula_chain_crossing(double lambda, double delta,
                                 const std::vector<double>& offsets, double eps,
                                 std::uint64_t cap) {
  std::vector<std::pair<double, int>> classes;
  for (double off : offsets) {
    bool found = false;
    for (auto& [o, cnt] : classes)
      if (o == off) {
        ++cnt;
        found = true;
        break;
      }
    if (!found) classes.emplace_back(off, 1);
  }
  std::vector<UlaCoord> gs(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) gs[i].mean = classes[i].first;

  double eps2 = eps * eps;
  for (std::uint64_t it = 1; it <= cap; ++it) {
    double w2 = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      gs[i] = ula_coord_step(gs[i], delta, lambda, 0.0);
      w2 += classes[i].second * w2x_coord_sq(gs[i], lambda, 0.0);
    }
    if (w2 <= eps2) return it;
  }
  return 0;
}

}  // namespace klmc
