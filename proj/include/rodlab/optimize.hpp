#ifndef RODLAB_OPTIMIZE_HPP
#define RODLAB_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace rodlab::detail {

/// Derivative-free Nelder-Mead in n dimensions.  The objective may return
/// +infinity to encode constraints.  Deterministic for fixed inputs.
inline double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double>& x, double scale, int max_iter,
                          double ftol) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> simplex(n + 1, x);
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale;
  for (std::size_t i = 0; i <= n; ++i) val[i] = f(simplex[i]);

  auto order = [&]() {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      v2[i] = val[idx[i]];
    }
    simplex.swap(s2);
    val.swap(v2);
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (std::isfinite(val[0]) && std::isfinite(val[n]) &&
        val[n] - val[0] <= ftol * (std::fabs(val[0]) + ftol))
      break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;
    auto mix = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d)
        p[d] = centroid[d] + t * (simplex[n][d] - centroid[d]);
      return p;
    };
    std::vector<double> xr = mix(-1.0);
    double vr = f(xr);
    if (vr < val[0]) {
      std::vector<double> xe = mix(-2.0);
      double ve = f(xe);
      if (ve < vr) {
        simplex[n] = xe;
        val[n] = ve;
      } else {
        simplex[n] = xr;
        val[n] = vr;
      }
    } else if (vr < val[n - 1]) {
      simplex[n] = xr;
      val[n] = vr;
    } else {
      std::vector<double> xc = mix(vr < val[n] ? -0.5 : 0.5);
      double vc = f(xc);
      if (vc < std::min(vr, val[n])) {
        simplex[n] = xc;
        val[n] = vc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t d = 0; d < n; ++d)
            simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
          val[i] = f(simplex[i]);
        }
      }
    }
  }
  order();
  x = simplex[0];
  return val[0];
}

}  // namespace rodlab::detail

#endif  // RODLAB_OPTIMIZE_HPP
