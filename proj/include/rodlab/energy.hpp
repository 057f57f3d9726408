#ifndef RODLAB_ENERGY_HPP
#define RODLAB_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/optimize.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

/// 2x2 matrix stored by columns.
struct Mat2 {
  Vec2 c0, c1;
};

inline double det(const Mat2& m) { return det2(m.c0, m.c1); }
inline double frob2(const Mat2& m) { return norm2(m.c0) + norm2(m.c1); }

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Stored bulk energy density W(F) with p-growth; +infinity encodes the
/// orientation constraint.
class EnergyDensity {
public:
  virtual ~EnergyDensity() = default;
  virtual double operator()(const Mat2& F) const = 0;
  virtual double growth_p() const = 0;
  virtual std::string name() const = 0;
};

/// W(F) = |F|^2 - 2 log det F - 2 on det F > 0.  Minimized exactly on
/// rotations with value 0; p = 2.
class NeoHookean2D final : public EnergyDensity {
public:
  double operator()(const Mat2& F) const override {
    double d = det(F);
    if (!(d > 0.0)) return kInf;
    return frob2(F) - 2.0 * std::log(d) - 2.0;
  }
  double growth_p() const override { return 2.0; }
  std::string name() const override { return "neohookean"; }

  /// min over second columns: |a|^2 - 2 log |a| - 1, attained at perp(a)/|a|.
  static double reduced_exact(Vec2 a) {
    double n = norm(a);
    if (!(n > 0.0)) return kInf;
    return n * n - 2.0 * std::log(n) - 1.0;
  }
  static Vec2 reduced_minimizer(Vec2 a) { return perp(a) / norm(a); }
  /// Convex envelope of the reduced density: 0 inside the unit disk.
  static double envelope_exact(Vec2 a) {
    double n = norm(a);
    return n <= 1.0 ? 0.0 : reduced_exact(a);
  }
};

/// Reduced (membrane) density f(a) = min over xi of W(a | xi), or any
/// directly supplied scalar density on R^2.
struct ReducedDensity {
  std::function<double(Vec2)> f;
  double p = 2.0;
  std::string name;
  double operator()(Vec2 a) const { return f(a); }
};

namespace detail {

/// Multi-start simplex minimization of xi -> W(a | xi).  The determinant
/// guard keeps the search inside the orientation-preserving sheet.
inline double reduced_eval(const EnergyDensity& W, Vec2 a, Vec2* argmin) {
  double a2 = norm2(a);
  if (!(a2 > 0.0)) return kInf;
  const double guard = 1e-8 * a2;
  auto obj = [&](const std::vector<double>& x) {
    Vec2 xi{x[0], x[1]};
    Mat2 F{a, xi};
    if (det(F) < guard) return kInf;
    return W(F);
  };
  Vec2 xi0 = perp(a) / a2;
  std::vector<Vec2> starts;
  for (int k = 0; k < 8; ++k) {
    double th = 2.0 * M_PI * k / 8.0;
    double c = std::cos(th), s = std::sin(th);
    starts.push_back({c * xi0.x - s * xi0.y, s * xi0.x + c * xi0.y});
  }
  for (double sc : {0.25, 0.5, 2.0, 4.0}) starts.push_back(sc * xi0);
  Vec2 unit = perp(a) / std::sqrt(a2);
  for (double sc : {1.0, 0.5, 2.0, 8.0}) starts.push_back(sc * unit);

  double best = kInf;
  Vec2 best_xi = xi0;
  for (const Vec2& s0 : starts) {
    std::vector<double> x{s0.x, s0.y};
    double scale = 0.25 * (norm(s0) + 1e-3);
    double v = nelder_mead(obj, x, scale, 400, 1e-10);
    if (v < best) {
      best = v;
      best_xi = {x[0], x[1]};
    }
  }
  if (argmin) *argmin = best_xi;
  return best;
}

}  // namespace detail

/// Reduction over the second gradient column.  The returned density refers
/// to W, which must outlive it.
inline ReducedDensity reduced_density(const EnergyDensity& W) {
  ReducedDensity r;
  r.p = W.growth_p();
  r.name = W.name() + "_reduced";
  r.f = [&W](Vec2 a) { return detail::reduced_eval(W, a, nullptr); };
  return r;
}

/// Closed-form reduction for the built-in Neo-Hookean density; equals the
/// numeric reduction but is cheap enough for dense table construction.
inline ReducedDensity neo_hookean_reduced() {
  ReducedDensity r;
  r.p = 2.0;
  r.name = "neohookean_reduced";
  r.f = [](Vec2 a) { return NeoHookean2D::reduced_exact(a); };
  return r;
}

inline Vec2 reduced_minimizer(const EnergyDensity& W, Vec2 a) {
  Vec2 xi;
  double v = detail::reduced_eval(W, a, &xi);
  if (!std::isfinite(v))
    throw precondition_error("reduced density undefined at a = 0");
  return xi;
}

struct LaminateAtom {
  double t = 1.0;
  Vec2 a;
};

/// Convex combination of at most three gradients realizing an envelope
/// value: sum t_i a_i = node, sum t_i f(a_i) = stored value.
struct Laminate {
  std::vector<LaminateAtom> atoms;
};

/// Node-sampled convex envelope of a reduced density over [-R, R]^2 with
/// per-node laminates and a certified gap versus the sampled graph.
class ConvexEnvelopeTable {
public:
  double R = 0.0;
  std::size_t n = 0;
  double h = 0.0;
  double gamma_target = 0.0;
  double gamma_certified = 0.0;
  double cap = 0.0;
  std::vector<double> values;        ///< n*n, row-major (j*n + i)
  std::vector<double> f_values;      ///< capped node samples of f
  std::vector<std::uint8_t> capped;  ///< f exceeded cap (or was not finite)
  std::vector<Laminate> laminates;

  Vec2 node(std::size_t i, std::size_t j) const {
    return {-R + h * static_cast<double>(i), -R + h * static_cast<double>(j)};
  }
  std::size_t idx(std::size_t i, std::size_t j) const { return j * n + i; }

  /// Piecewise-linear interpolation on the two-triangle cell split.
  double value_at(Vec2 a) const {
    if (a.x < -R || a.x > R || a.y < -R || a.y > R)
      throw precondition_error("envelope table does not cover requested gradient");
    double fx = (a.x + R) / h, fy = (a.y + R) / h;
    std::size_t i = std::min(static_cast<std::size_t>(std::max(fx, 0.0)), n - 2);
    std::size_t j = std::min(static_cast<std::size_t>(std::max(fy, 0.0)), n - 2);
    double u = fx - static_cast<double>(i), v = fy - static_cast<double>(j);
    double v00 = values[idx(i, j)], v10 = values[idx(i + 1, j)];
    double v01 = values[idx(i, j + 1)], v11 = values[idx(i + 1, j + 1)];
    if (u >= v)  // lower triangle (00, 10, 11)
      return v00 + u * (v10 - v00) + v * (v11 - v10);
    return v00 + v * (v01 - v00) + u * (v11 - v01);
  }

  const Laminate& laminate_at_node(std::size_t i, std::size_t j) const {
    return laminates[idx(i, j)];
  }
};

namespace detail {

struct WeightedAtom {
  std::size_t idx;
  double w;
};

/// Reduces a convex combination over grid atoms to at most three atoms
/// without increasing its value; enumeration order is lexicographic in the
/// atom indices, which fixes ties deterministically.
inline bool reduce_combination(const std::vector<WeightedAtom>& merged,
                               Vec2 x0,
                               const std::vector<double>& f_vals,
                               const ConvexEnvelopeTable& tab,
                               std::vector<WeightedAtom>& out) {
  std::vector<std::size_t> ids;
  for (const auto& wa : merged)
    if (wa.w > 1e-14) ids.push_back(wa.idx);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::size_t m = ids.size();
  auto pos = [&](std::size_t id) {
    return tab.node(id % tab.n, id / tab.n);
  };
  double best = kInf;
  out.clear();
  const double tol = 1e-9 * (1.0 + tab.R);

  for (std::size_t i = 0; i < m; ++i) {
    Vec2 A = pos(ids[i]);
    if (dist(A, x0) <= tol && f_vals[ids[i]] < best) {
      best = f_vals[ids[i]];
      out = {{ids[i], 1.0}};
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      Vec2 A = pos(ids[i]), B = pos(ids[j]);
      Vec2 d = B - A;
      double l2 = norm2(d);
      if (l2 <= 0.0) continue;
      double t = dot(x0 - A, d) / l2;
      if (t < -1e-12 || t > 1.0 + 1e-12) continue;
      if (dist(A + t * d, x0) > tol) continue;
      double tc = std::clamp(t, 0.0, 1.0);
      double val = (1.0 - tc) * f_vals[ids[i]] + tc * f_vals[ids[j]];
      if (val < best - 1e-15) {
        best = val;
        out = {{ids[i], 1.0 - tc}, {ids[j], tc}};
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        Vec2 A = pos(ids[i]), B = pos(ids[j]), C = pos(ids[k]);
        double dd = det2(A - C, B - C);
        if (std::fabs(dd) < 1e-14 * (1.0 + tab.R) * (1.0 + tab.R)) continue;
        double w1 = det2(x0 - C, B - C) / dd;
        double w2 = det2(A - C, x0 - C) / dd;
        double w3 = 1.0 - w1 - w2;
        if (w1 < -1e-10 || w2 < -1e-10 || w3 < -1e-10) continue;
        w1 = std::max(w1, 0.0);
        w2 = std::max(w2, 0.0);
        w3 = std::max(w3, 0.0);
        double s = w1 + w2 + w3;
        w1 /= s;
        w2 /= s;
        w3 /= s;
        double val =
            w1 * f_vals[ids[i]] + w2 * f_vals[ids[j]] + w3 * f_vals[ids[k]];
        if (val < best - 1e-15) {
          best = val;
          out = {{ids[i], w1}, {ids[j], w2}, {ids[k], w3}};
        }
      }
    }
  }
  return !out.empty();
}

/// Lower convex hull of (k, val[k]) for a line of lattice nodes; returns the
/// hull vertex positions (indices into the line).
inline void lower_hull_line(const std::vector<double>& val,
                            std::vector<std::size_t>& hull) {
  hull.clear();
  const std::size_t m = val.size();
  for (std::size_t k = 0; k < m; ++k) {
    double vk = val[k];
    while (hull.size() >= 2) {
      std::size_t b = hull[hull.size() - 1], a = hull[hull.size() - 2];
      // pop b if it lies on or above the chord a -> k
      double lhs = (val[b] - val[a]) * static_cast<double>(k - a);
      double rhs = (vk - val[a]) * static_cast<double>(b - a);
      if (lhs >= rhs) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
}

/// One-dimensional discrete Legendre transform: for sorted queries sigma,
/// returns max_k (sigma * u[k] - phi[k]).  Linear time via the lower hull.
inline void legendre_1d(const std::vector<double>& u,
                        const std::vector<double>& phi,
                        const std::vector<double>& sigma,
                        std::vector<double>& out) {
  const std::size_t m = u.size();
  std::vector<std::size_t> hull;
  hull.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    while (hull.size() >= 2) {
      std::size_t b = hull[hull.size() - 1], a = hull[hull.size() - 2];
      double lhs = (phi[b] - phi[a]) * (u[k] - u[a]);
      double rhs = (phi[k] - phi[a]) * (u[b] - u[a]);
      if (lhs >= rhs) hull.pop_back();
      else break;
    }
    hull.push_back(k);
  }
  out.resize(sigma.size());
  std::size_t j = 0;
  for (std::size_t q = 0; q < sigma.size(); ++q) {
    double s = sigma[q];
    while (j + 1 < hull.size() &&
           s * u[hull[j + 1]] - phi[hull[j + 1]] >=
               s * u[hull[j]] - phi[hull[j]])
      ++j;
    out[q] = s * u[hull[j]] - phi[hull[j]];
  }
}

}  // namespace detail

/// Computes the node-sampled convex envelope by iterated directional
/// convexification over a fixed coprime direction set, tracking laminates,
/// then certifies the gap against the sampled graph with supporting planes
/// (a finite-slope biconjugate).  Refines the slope set until the certified
/// gap reaches `gamma` or the budget is exhausted.
inline ConvexEnvelopeTable convexify(const ReducedDensity& f, double R,
                                     std::size_t n, double gamma,
                                     double cap = 1e6) {
  if (!(R > 0.0) || n < 3 || !(gamma > 0.0))
    throw precondition_error("convexify needs R > 0, n >= 3, gamma > 0");
  ConvexEnvelopeTable tab;
  tab.R = R;
  tab.n = n;
  tab.h = 2.0 * R / static_cast<double>(n - 1);
  tab.gamma_target = gamma;
  tab.cap = cap;
  const std::size_t nn = n * n;
  tab.values.resize(nn);
  tab.f_values.resize(nn);
  tab.capped.assign(nn, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double val = f(tab.node(i, j));
      std::size_t k = tab.idx(i, j);
      if (!std::isfinite(val) || val > cap) {
        tab.capped[k] = 1;
        val = cap;
      }
      tab.values[k] = tab.f_values[k] = val;
    }
  }
  std::vector<std::vector<detail::WeightedAtom>> lam(nn);
  for (std::size_t k = 0; k < nn; ++k) lam[k] = {{k, 1.0}};

  std::vector<std::pair<int, int>> dirs;
  for (int p = 0; p <= 4; ++p) {
    for (int q = -4; q <= 4; ++q) {
      if (p == 0 && q <= 0) continue;
      if (p > 0 && std::gcd(p, std::abs(q)) != 1) continue;
      dirs.emplace_back(p, q);
    }
  }

  std::vector<std::size_t> line;
  std::vector<double> line_vals;
  std::vector<std::size_t> hull;
  const int ni = static_cast<int>(n);
  for (int round = 0; round < 80; ++round) {
    std::size_t improved = 0;
    for (auto [p, q] : dirs) {
      for (int j0 = 0; j0 < ni; ++j0) {
        for (int i0 = 0; i0 < ni; ++i0) {
          int ip = i0 - p, jp = j0 - q;
          if (ip >= 0 && ip < ni && jp >= 0 && jp < ni) continue;  // not a line start
          line.clear();
          line_vals.clear();
          for (int i = i0, j = j0; i >= 0 && i < ni && j >= 0 && j < ni;
               i += p, j += q) {
            line.push_back(tab.idx(static_cast<std::size_t>(i),
                                   static_cast<std::size_t>(j)));
            line_vals.push_back(tab.values[line.back()]);
          }
          if (line.size() < 3) continue;
          detail::lower_hull_line(line_vals, hull);
          if (hull.size() == line.size()) continue;
          std::size_t hpos = 0;
          for (std::size_t k = 0; k < line.size(); ++k) {
            if (hull[hpos] == k) continue;
            while (hull[hpos + 1] < k) ++hpos;
            std::size_t a = hull[hpos], b = hull[hpos + 1];
            double lambda = static_cast<double>(b - k) / static_cast<double>(b - a);
            double nv = lambda * line_vals[a] + (1.0 - lambda) * line_vals[b];
            std::size_t node_id = line[k];
            if (nv >= tab.values[node_id] -
                          1e-14 * (1.0 + std::fabs(tab.values[node_id])))
              continue;
            std::vector<detail::WeightedAtom> merged;
            for (const auto& wa : lam[line[a]])
              merged.push_back({wa.idx, lambda * wa.w});
            for (const auto& wa : lam[line[b]])
              merged.push_back({wa.idx, (1.0 - lambda) * wa.w});
            Vec2 x0 = tab.node(node_id % n, node_id / n);
            std::vector<detail::WeightedAtom> red;
            if (!detail::reduce_combination(merged, x0, tab.f_values, tab, red))
              continue;
            double red_val = 0.0;
            for (const auto& wa : red) red_val += wa.w * tab.f_values[wa.idx];
            if (red_val >= tab.values[node_id] -
                               1e-14 * (1.0 + std::fabs(tab.values[node_id])))
              continue;
            tab.values[node_id] = red_val;
            lam[node_id] = std::move(red);
            ++improved;
          }
        }
      }
    }
    if (improved == 0) break;
  }

  tab.laminates.resize(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    Laminate& L = tab.laminates[k];
    for (const auto& wa : lam[k]) {
      if (wa.w <= 1e-14) continue;
      L.atoms.push_back({wa.w, tab.node(wa.idx % n, wa.idx / n)});
    }
  }

  // Certification: supporting planes from a finite slope grid lower-bound
  // the sampled hull; the certified gap is max over uncapped nodes of
  // (value - bound).  The slope grid refines until gamma is met.
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = ys[i] = -R + tab.h * i;
  double max_slope = 1.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      max_slope = std::max(max_slope,
                           std::fabs(tab.values[tab.idx(i + 1, j)] -
                                     tab.values[tab.idx(i, j)]) / tab.h);
      max_slope = std::max(max_slope,
                           std::fabs(tab.values[tab.idx(j, i + 1)] -
                                     tab.values[tab.idx(j, i)]) / tab.h);
    }
  double S = 1.2 * max_slope + 1.0;

  double best_gap = kInf;
  for (std::size_t ns = 129; ns <= 1025; ns = 2 * (ns - 1) + 1) {
    std::vector<double> sg(ns);
    for (std::size_t k = 0; k < ns; ++k)
      sg[k] = -S + 2.0 * S * static_cast<double>(k) / static_cast<double>(ns - 1);
    // inner transform per column: g[i][ks] = max_j (sg*ys - f)
    std::vector<std::vector<double>> g(n);
    std::vector<double> phi(n), tmp;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) phi[j] = tab.f_values[tab.idx(i, j)];
      detail::legendre_1d(ys, phi, sg, g[i]);
    }
    // fstar[kx][ky] = max_i (sg[kx]*xs[i] + g[i][ky])
    std::vector<std::vector<double>> fstar(ns, std::vector<double>(ns));
    std::vector<double> col(n);
    for (std::size_t ky = 0; ky < ns; ++ky) {
      for (std::size_t i = 0; i < n; ++i) col[i] = -g[i][ky];
      detail::legendre_1d(xs, col, sg, tmp);
      for (std::size_t kx = 0; kx < ns; ++kx) fstar[kx][ky] = tmp[kx];
    }
    // bound[i][j] = max_s (s . node - fstar) via the same factorization
    std::vector<std::vector<double>> gh(ns);
    std::vector<double> phs(ns);
    for (std::size_t kx = 0; kx < ns; ++kx)
      detail::legendre_1d(sg, fstar[kx], ys, gh[kx]);
    double gap = 0.0;
    std::vector<double> colv(ns);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t kx = 0; kx < ns; ++kx) colv[kx] = -gh[kx][j];
      detail::legendre_1d(sg, colv, xs, tmp);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = tab.idx(i, j);
        if (tab.capped[k]) continue;
        bool lam_ok = true;
        for (const auto& wa : lam[k]) lam_ok = lam_ok && !tab.capped[wa.idx];
        if (!lam_ok) continue;
        gap = std::max(gap, tab.values[k] - tmp[i]);
      }
    }
    best_gap = std::min(best_gap, gap);
    if (best_gap <= gamma) break;
    if (ns == 1025) break;
  }
  tab.gamma_certified = best_gap;
  if (!(best_gap <= gamma))
    throw construction_error("convexify could not certify requested gap");
  return tab;
}

/// Relaxed rod energy of a polyline: exact sum of segment durations times
/// the density at the segment slope.
inline double rod_energy(const PolylineCurve& y,
                         const std::function<double(Vec2)>& density) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.num_segments(); ++i) {
    double hgt = y.breakpoints()[i + 1] - y.breakpoints()[i];
    s += hgt * density(y.slope(i));
  }
  return s;
}

inline double rod_energy(const PolylineCurve& y, const ConvexEnvelopeTable& tab) {
  return rod_energy(y, [&tab](Vec2 a) { return tab.value_at(a); });
}

/// Piecewise-affine field on a structured grid over (0,1) x (-1/2, 1/2);
/// each cell is split into two triangles (00,10,11) and (00,11,01).
struct BulkField {
  std::vector<double> xs;  ///< column coordinates, ascending, [0, 1]
  std::vector<double> ys;  ///< row coordinates, ascending, [-1/2, 1/2]
  std::vector<Vec2> u;     ///< vertex images, row-major (row j: j*xs.size())
  double h = 0.1;          ///< physical thickness entering the scaled gradient

  std::size_t ncols() const { return xs.size(); }
  const Vec2& at(std::size_t i, std::size_t j) const { return u[j * xs.size() + i]; }
  Vec2& at(std::size_t i, std::size_t j) { return u[j * xs.size() + i]; }
};

struct BulkEnergyResult {
  double value = 0.0;
  double det_min = kInf;  ///< min over triangles of det of the scaled gradient
  bool oriented = true;
};

/// Integral of W over the scaled gradient (d1 | d2 / h); +infinity when any
/// triangle reverses orientation.
inline BulkEnergyResult bulk_energy(const BulkField& fld,
                                    const EnergyDensity& W) {
  if (fld.xs.size() < 2 || fld.ys.size() < 2 ||
      fld.u.size() != fld.xs.size() * fld.ys.size())
    throw precondition_error("bulk field needs a full vertex grid");
  BulkEnergyResult res;
  for (std::size_t j = 0; j + 1 < fld.ys.size(); ++j) {
    double dy = fld.ys[j + 1] - fld.ys[j];
    for (std::size_t i = 0; i + 1 < fld.xs.size(); ++i) {
      double dx = fld.xs[i + 1] - fld.xs[i];
      double area = 0.5 * dx * dy;
      const Vec2 &u00 = fld.at(i, j), &u10 = fld.at(i + 1, j);
      const Vec2 &u01 = fld.at(i, j + 1), &u11 = fld.at(i + 1, j + 1);
      // lower triangle: edges along x then y
      Mat2 g1{(u10 - u00) / dx, (u11 - u10) / dy};
      // upper triangle
      Mat2 g2{(u11 - u01) / dx, (u01 - u00) / dy};
      for (const Mat2& g : {g1, g2}) {
        Mat2 gh{g.c0, g.c1 / fld.h};
        double d = det(gh);
        res.det_min = std::min(res.det_min, d);
        double w = W(gh);
        if (!(d > 0.0) || !std::isfinite(w)) {
          res.oriented = false;
          res.value = kInf;
        }
        if (res.oriented) res.value += area * w;
      }
    }
  }
  return res;
}

/// Polishes a two-atom laminate for f at barycenter xi, starting from a
/// table laminate; returns achieved atoms/weights (value = sum t f(a)).
inline Laminate refine_laminate(const ReducedDensity& f, Vec2 xi,
                                const Laminate& hint, int extra_iters = 2000) {
  Laminate best = hint;
  auto value_of = [&](const Laminate& L) {
    double v = 0.0;
    for (const auto& at : L.atoms) v += at.t * f(at.a);
    return v;
  };
  if (hint.atoms.size() < 2) return best;
  // parametrize: a1 free, weight t in (0,1); a2 = (xi - t a1) / (1 - t)
  auto obj = [&](const std::vector<double>& x) {
    double t = x[2];
    if (t < 1e-6 || t > 1.0 - 1e-6) return kInf;
    Vec2 a1{x[0], x[1]};
    Vec2 a2 = (xi - t * a1) / (1.0 - t);
    double f1 = f(a1), f2 = f(a2);
    if (!std::isfinite(f1) || !std::isfinite(f2)) return kInf;
    return t * f1 + (1.0 - t) * f2;
  };
  std::vector<double> x{hint.atoms[0].a.x, hint.atoms[0].a.y, hint.atoms[0].t};
  double v = detail::nelder_mead(obj, x, 0.05, extra_iters, 1e-14);
  if (v < value_of(best)) {
    double t = x[2];
    Vec2 a1{x[0], x[1]};
    Vec2 a2 = (xi - t * a1) / (1.0 - t);
    best.atoms = {{t, a1}, {1.0 - t, a2}};
  }
  return best;
}

}  // namespace rodlab

#endif  // RODLAB_ENERGY_HPP
