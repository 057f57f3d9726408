#ifndef RODLAB_EXTRUSION_HPP
#define RODLAB_EXTRUSION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/energy.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/relaxation.hpp"
#include "rodlab/rng.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

/// Director field along a curve: either one vector per affine piece or a
/// piecewise-linear interpolant of dense samples (used for smoothed fields).
struct CosseratField {
  enum class Kind { piecewise, sampled };
  enum class Provenance { normal, minimizer, smoothed };

  Kind kind = Kind::piecewise;
  Provenance provenance = Provenance::normal;
  std::vector<double> breaks;  // piecewise: curve breakpoints; sampled: sample xs
  std::vector<Vec2> values;    // piecewise: one per piece; sampled: one per break
  double deriv_bound = 0.0;
  double det_floor_claimed = 0.0;
  double det_floor_measured = 0.0;

  std::size_t cell_of(double x) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    std::size_t i = (it == breaks.begin()) ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
    return std::min(i, breaks.size() - 2);
  }

  Vec2 eval(double x) const {
    const std::size_t i = cell_of(x);
    if (kind == Kind::piecewise) return values[i];
    const double w = breaks[i + 1] - breaks[i];
    const double s = (w > 0.0) ? std::clamp((x - breaks[i]) / w, 0.0, 1.0) : 0.0;
    return (1.0 - s) * values[i] + s * values[i + 1];
  }

  Vec2 derivative(double x) const {
    if (kind == Kind::piecewise) return Vec2{0.0, 0.0};
    const std::size_t i = cell_of(x);
    const double w = breaks[i + 1] - breaks[i];
    return (w > 0.0) ? (1.0 / w) * (values[i + 1] - values[i]) : Vec2{0.0, 0.0};
  }

  double sup_norm() const {
    double m = 0.0;
    for (const Vec2& v : values) m = std::max(m, norm(v));
    return m;
  }
};

/// Unit normal director: perp(y') / |y'| on each piece.
inline CosseratField cosserat_normal(const PolylineCurve& y) {
  CosseratField b;
  b.kind = CosseratField::Kind::piecewise;
  b.provenance = CosseratField::Provenance::normal;
  b.breaks = y.breakpoints();
  b.values.reserve(y.num_segments());
  for (std::size_t l = 0; l < y.num_segments(); ++l) {
    const Vec2 a = y.slope(l);
    const double s = norm(a);
    if (!(s > 0.0)) throw precondition_error("zero-speed piece has no normal");
    b.values.push_back((1.0 / s) * perp(a));
  }
  return b;
}

/// Director chosen per piece as the minimizer of xi -> W(a | xi).
inline CosseratField cosserat_minimizer(const PolylineCurve& y, const EnergyDensity& W) {
  CosseratField b;
  b.kind = CosseratField::Kind::piecewise;
  b.provenance = CosseratField::Provenance::minimizer;
  b.breaks = y.breakpoints();
  b.values.reserve(y.num_segments());
  for (std::size_t l = 0; l < y.num_segments(); ++l)
    b.values.push_back(reduced_minimizer(W, y.slope(l)));
  return b;
}

namespace detail {

inline double sigma_min2x2(Vec2 col1, Vec2 col2) {
  const double q1 = norm2(col1) + norm2(col2);
  const double diff = norm2(col1) - norm2(col2);
  const double cross = dot(col1, col2);
  const double q2 = std::sqrt(diff * diff + 4.0 * cross * cross);
  return std::sqrt(std::max(0.5 * (q1 - q2), 0.0));
}

/// CDF of the quadratic bump kernel with radius r, evaluated at offset u.
inline double bump_cdf(double u, double r) {
  if (u <= -r) return 0.0;
  if (u >= r) return 1.0;
  const double s = u / r;
  return 0.5 + 0.75 * s - 0.25 * s * s * s;
}

/// Piecewise-constant field on [0,1]: value step_vals[m] on
/// [step_pos[m], step_pos[m+1]), extended by its end values outside [0,1].
struct StepField {
  std::vector<double> pos;   // size M+1, pos.front()=0, pos.back()=1
  std::vector<Vec2> vals;    // size M
};

inline Vec2 mollify_step(const StepField& s, double x, double r) {
  Vec2 acc{0.0, 0.0};
  // left extension
  double f0 = bump_cdf(s.pos.front() - x, r);
  acc = acc + f0 * s.vals.front();
  for (std::size_t m = 0; m < s.vals.size(); ++m) {
    const double fa = bump_cdf(s.pos[m] - x, r);
    const double fb = bump_cdf(s.pos[m + 1] - x, r);
    acc = acc + (fb - fa) * s.vals[m];
  }
  const double f1 = bump_cdf(s.pos.back() - x, r);
  acc = acc + (1.0 - f1) * s.vals.back();
  return acc;
}

/// Min over the sample grid of det(y'(x), b(x)), taking both one-sided slopes
/// at curve breakpoints.  For a sampled field that is linear between grid
/// points within a single piece, this minimum certifies the whole interval.
inline double det_floor_on_grid(const PolylineCurve& y, const CosseratField& b,
                                const std::vector<double>& grid) {
  double floor_det = kInf;
  for (double x : grid) {
    const Vec2 bx = b.eval(x);
    const std::size_t nseg = y.num_segments();
    const auto& bp = y.breakpoints();
    for (std::size_t l = 0; l < nseg; ++l) {
      if (x >= bp[l] - 1e-15 && x <= bp[l + 1] + 1e-15)
        floor_det = std::min(floor_det, det2(y.slope(l), bx));
    }
  }
  return floor_det;
}

inline std::vector<double> merged_grid(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> g;
  g.reserve(a.size() + b.size());
  g.insert(g.end(), a.begin(), a.end());
  g.insert(g.end(), b.begin(), b.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  while (!g.empty() && g.front() < 0.0) g.erase(g.begin());
  while (!g.empty() && g.back() > 1.0) g.pop_back();
  return g;
}

}  // namespace detail

/// Replace the jump of a piecewise director at each corner by a short
/// transition whose value keeps both adjacent determinants positive, then
/// mollify.  Transition vector per corner:
///   a_next - a_prev  if det(a_prev, a_next) > 0,
///   a_prev - a_next  if det(a_prev, a_next) < 0,
///   the incoming director if the slopes are positively aligned.
/// The determinant floor min(eps_tilde, delta) is verified exactly on the
/// delivered piecewise-linear field.
inline CosseratField smooth_cosserat(const PolylineCurve& y, const CosseratField& b,
                                     std::size_t i, double delta) {
  if (b.kind != CosseratField::Kind::piecewise ||
      b.values.size() != y.num_segments())
    throw precondition_error("smoothing expects a per-piece director field");
  if (!(delta > 0.0)) throw precondition_error("delta must be positive");
  if (i < 1) throw precondition_error("smoothing index must be at least 1");
  const std::size_t L = y.num_segments();
  const auto& ybp = y.breakpoints();
  double min_gap = kInf;
  for (std::size_t l = 0; l < L; ++l) min_gap = std::min(min_gap, ybp[l + 1] - ybp[l]);
  const double w = 1.0 / static_cast<double>(i);
  // The corner windows live in parameter space, so the admissibility bound
  // compares against breakpoint gaps, not arc lengths.
  if (!(w < 0.5 * min_gap))
    throw precondition_error("smoothing window must be below half the shortest piece");
  for (std::size_t l = 0; l < L; ++l) {
    if (!(det2(y.slope(l), b.values[l]) >= 2.0 * delta))
      throw precondition_error("director determinant must be at least 2*delta on every piece");
  }

  // Transition vectors and the corner determinant floor.
  double eps_tilde = kInf;
  std::vector<Vec2> zeta(L >= 1 ? L - 1 : 0);
  for (std::size_t l = 0; l + 1 < L; ++l) {
    const Vec2 ap = y.slope(l), an = y.slope(l + 1);
    const double d = det2(ap, an);
    Vec2 z;
    if (d > 0.0) {
      z = an - ap;
    } else if (d < 0.0) {
      z = ap - an;
    } else {
      if (!(dot(ap, an) > 0.0))
        throw precondition_error(
            "opposite-aligned corner admits no orientation-preserving director");
      z = b.values[l];
    }
    z = (1.0 / norm(z)) * z;  // magnitude is free; unit length tames |b'|
    zeta[l] = z;
    eps_tilde = std::min(eps_tilde, std::min(det2(ap, z), det2(an, z)));
  }
  if (!(eps_tilde > 0.0) && L > 1)
    throw construction_error("corner transition determinant vanished");

  // Step field: piece directors with 2/i-wide corner windows holding zeta.
  detail::StepField s;
  s.pos.push_back(0.0);
  for (std::size_t l = 0; l < L; ++l) {
    if (l > 0) {
      s.vals.push_back(zeta[l - 1]);
      s.pos.push_back(y.breakpoints()[l] + w);
    }
    s.vals.push_back(b.values[l]);
    s.pos.push_back((l + 1 < L) ? y.breakpoints()[l + 1] - w : 1.0);
  }

  // Sample grid: uniform base, clusters around each step jump, breakpoints.
  const double r = 0.99 * 0.25 * w;
  std::vector<double> grid;
  const std::size_t nb = std::max<std::size_t>(65, 4 * L + 1);
  for (std::size_t q = 0; q < nb; ++q)
    grid.push_back(static_cast<double>(q) / static_cast<double>(nb - 1));
  for (std::size_t m = 1; m + 1 < s.pos.size(); ++m) {
    for (int q = -6; q <= 6; ++q)
      grid.push_back(s.pos[m] + 0.2 * r * static_cast<double>(q));
  }
  grid = detail::merged_grid(grid, y.breakpoints());

  CosseratField out;
  out.kind = CosseratField::Kind::sampled;
  out.provenance = CosseratField::Provenance::smoothed;
  out.breaks = grid;
  out.values.reserve(grid.size());
  for (double x : grid) out.values.push_back(detail::mollify_step(s, x, r));
  for (std::size_t q = 0; q + 1 < grid.size(); ++q) {
    const double dx = grid[q + 1] - grid[q];
    if (dx > 0.0)
      out.deriv_bound =
          std::max(out.deriv_bound, norm(out.values[q + 1] - out.values[q]) / dx);
  }
  out.det_floor_claimed = std::min(eps_tilde, delta);
  out.det_floor_measured = detail::det_floor_on_grid(y, out, grid);
  if (!(out.det_floor_measured >= out.det_floor_claimed * (1.0 - 1e-9)))
    throw construction_error("smoothed director lost the determinant floor");
  return out;
}

/// Certificate attached to a strip map.
struct StripCertificate {
  double delta = 0.0;
  double det_floor = 0.0;   // measured min det of the strip gradient
  double alpha = kInf;      // image clearance between far non-affine subsegments
  double gamma = 0.0;       // clearance grid step; sampled far pairs use 4*gamma
  double gamma_lip = 0.0;   // window where the Lipschitz bound is certified
  double lip = 0.0;         // certified local lower Lipschitz constant
  double h0 = kInf, h1 = kInf, h3 = kInf;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool injective_protocol = false;
  double min_far_gap = kInf;    // measured min image distance, far pairs
  double min_near_ratio = kInf; // measured min |dy|/|dx|, affine-span pairs
  bool boundary_crossing = false;
};

/// Extruded strip x -> y(x1) + x2 * b(x1) on (0,1) x [-h/2, h/2].
struct StripMap {
  StripMap(PolylineCurve curve, CosseratField field, double thickness)
      : y(std::move(curve)), b(std::move(field)), h(thickness) {}
  PolylineCurve y;
  CosseratField b;
  double h = 0.0;
  StripCertificate cert;

  Vec2 eval(double x1, double x2) const { return y.eval(x1) + x2 * b.eval(x1); }
};

namespace detail {

/// Verification grid for a strip: director breaks merged with curve breaks.
inline std::vector<double> strip_grid(const StripMap& sm) {
  if (sm.b.kind == CosseratField::Kind::sampled)
    return merged_grid(sm.b.breaks, sm.y.breakpoints());
  return sm.y.breakpoints();
}

/// Partition of [0,1] into maximal spans on which the strip map is affine:
/// constant curve slope and constant director.  On such a span the map
/// (x1, x2) -> y(x1) + x2 b is a fixed affine map with determinant at least
/// delta, so its injectivity needs no clearance between far parameters; the
/// lower Lipschitz bound covers every pair inside the span.
struct AffineRuns {
  std::vector<double> pos;  // cell boundaries
  std::vector<long> run;    // run id per cell, -1 for non-affine cells

  std::size_t cell(double x) const {
    auto it = std::upper_bound(pos.begin(), pos.end(), x);
    std::size_t q = (it == pos.begin()) ? 0 : static_cast<std::size_t>(it - pos.begin()) - 1;
    if (pos.size() >= 2 && q > pos.size() - 2) q = pos.size() - 2;
    return q;
  }

  bool span_affine(double lo, double hi) const {
    const std::size_t a = cell(lo), c = cell(hi);
    if (run[a] < 0 || run[c] < 0) return false;
    return run[a] == run[c];
  }
};

inline AffineRuns affine_runs(const PolylineCurve& y, const CosseratField& b) {
  AffineRuns ar;
  if (b.kind == CosseratField::Kind::sampled)
    ar.pos = merged_grid(b.breaks, y.breakpoints());
  else
    ar.pos = y.breakpoints();
  const std::size_t nc = ar.pos.size() - 1;
  ar.run.assign(nc, -1);
  std::vector<char> aff(nc, 1);
  if (b.kind == CosseratField::Kind::sampled) {
    for (std::size_t q = 0; q < nc; ++q) {
      const double xm = 0.5 * (ar.pos[q] + ar.pos[q + 1]);
      const std::size_t c = b.cell_of(xm);
      const std::size_t cn = std::min(c + 1, b.values.size() - 1);
      if (!(b.values[c] == b.values[cn])) aff[q] = 0;
    }
  }
  auto slope_at = [&](std::size_t q) {
    return y.slope(y.segment_index(0.5 * (ar.pos[q] + ar.pos[q + 1])));
  };
  long id = 0;
  for (std::size_t q = 0; q < nc; ++q) {
    if (!aff[q]) {
      ++id;
      continue;
    }
    if (q > 0) {
      bool merge = aff[q - 1];
      if (merge) {
        const Vec2 s0 = slope_at(q - 1), s1 = slope_at(q);
        if (!(norm(s1 - s0) <= 1e-12 * (1.0 + norm(s0)))) merge = false;
      }
      if (merge && b.kind == CosseratField::Kind::piecewise) {
        const std::size_t l0 = y.segment_index(0.5 * (ar.pos[q - 1] + ar.pos[q]));
        const std::size_t l1 = y.segment_index(0.5 * (ar.pos[q] + ar.pos[q + 1]));
        if (!(b.values[l0] == b.values[l1])) merge = false;
      }
      if (!merge) ++id;
    }
    ar.run[q] = id;
  }
  return ar;
}

/// Sweep for proper crossings between strip boundary segments whose parameter
/// gap is at least 2*gamma.  Boundary polylines are exact for a sampled
/// (piecewise-linear) director on the merged grid.
inline bool boundary_crossing_scan(const std::vector<double>& grid,
                                   const std::vector<Vec2>& upper,
                                   const std::vector<Vec2>& lower,
                                   double gamma) {
  struct Seg {
    double xmin, xmax, ymin, ymax;
    double t0, t1;
    Vec2 p, q;
  };
  std::vector<Seg> segs;
  const auto add = [&](const std::vector<Vec2>& poly) {
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      Seg s;
      s.p = poly[j];
      s.q = poly[j + 1];
      s.t0 = grid[j];
      s.t1 = grid[j + 1];
      s.xmin = std::min(s.p.x, s.q.x);
      s.xmax = std::max(s.p.x, s.q.x);
      s.ymin = std::min(s.p.y, s.q.y);
      s.ymax = std::max(s.p.y, s.q.y);
      segs.push_back(s);
    }
  };
  add(upper);
  add(lower);
  std::vector<std::size_t> order(segs.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b2) {
    return segs[a].xmin < segs[b2].xmin;
  });
  std::vector<std::size_t> active;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const Seg& s = segs[order[oi]];
    std::size_t keep = 0;
    for (std::size_t aj : active) {
      if (segs[aj].xmax >= s.xmin) active[keep++] = aj;
    }
    active.resize(keep);
    for (std::size_t aj : active) {
      const Seg& o = segs[aj];
      if (o.ymax < s.ymin || s.ymax < o.ymin) continue;
      const double gap = std::max(o.t0, s.t0) - std::min(o.t1, s.t1);
      if (gap < 2.0 * gamma * (1.0 - 1e-12)) continue;
      const double o1 = det2(s.q - s.p, o.p - s.p);
      const double o2 = det2(s.q - s.p, o.q - s.p);
      const double o3 = det2(o.q - o.p, s.p - o.p);
      const double o4 = det2(o.q - o.p, s.q - o.p);
      if (((o1 > 0.0) != (o2 > 0.0)) && ((o3 > 0.0) != (o4 > 0.0)) &&
          o1 != 0.0 && o2 != 0.0 && o3 != 0.0 && o4 != 0.0)
        return true;
    }
    active.push_back(order[oi]);
  }
  return false;
}

}  // namespace detail

/// Sampled verification of a strip map against the analytic margins stored in
/// its certificate: determinant floor delta/2, near-pair lower Lipschitz
/// bound, far-pair clearance, and a crossing scan of the strip boundary.
inline StripCertificate verify_strip(const StripMap& sm, std::size_t n_pairs = 10000,
                                     std::uint64_t seed = 1) {
  StripCertificate cert = sm.cert;
  cert.samples = n_pairs;
  cert.seed = seed;
  cert.min_far_gap = kInf;
  cert.min_near_ratio = kInf;
  const std::vector<double> grid = detail::strip_grid(sm);
  const double half = 0.5 * sm.h;
  const double supb = sm.b.sup_norm();

  // Determinant scan: det(y' + x2 b' | b) is bilinear in (x1, x2) on each
  // grid cell, so the four cell corners certify the cell.
  double dmin = kInf;
  for (std::size_t q = 0; q + 1 < grid.size(); ++q) {
    const double xm = 0.5 * (grid[q] + grid[q + 1]);
    const Vec2 a = sm.y.slope(sm.y.segment_index(xm));
    const Vec2 bd = sm.b.derivative(xm);
    for (double x : {grid[q], grid[q + 1]}) {
      const Vec2 bx = sm.b.eval(x);
      for (double x2 : {-half, half})
        dmin = std::min(dmin, det2(a + x2 * bd, bx));
    }
  }
  cert.det_floor = dmin;
  bool pass = dmin >= 0.5 * cert.delta * (1.0 - 1e-9);

  // Random pair sampling.  Pairs inside one affine span carry the lower
  // Lipschitz bound at every parameter distance.  Other pairs 4*gamma apart
  // land in clearance-grid subsegments separated by at least 2*gamma, so the
  // alpha margin applies; a non-positive margin means the certificate makes
  // no claim and the protocol must refuse.  Remaining pairs get positivity
  // plus the structured corner pairs below.
  Rng rng(seed);
  const detail::AffineRuns runs = detail::affine_runs(sm.y, sm.b);
  const double far_bound = (cert.alpha < kInf) ? cert.alpha - sm.h * supb : kInf;
  if (cert.alpha < kInf && !(far_bound > 0.0)) pass = false;
  for (std::size_t q = 0; q < n_pairs; ++q) {
    const double x1 = rng.uniform(), x2 = rng.uniform();
    const double t1 = rng.uniform(-half, half), t2 = rng.uniform(-half, half);
    const Vec2 d = sm.eval(x1, t1) - sm.eval(x2, t2);
    const double img = norm(d);
    const double param = std::sqrt((x1 - x2) * (x1 - x2) + (t1 - t2) * (t1 - t2));
    if (!(param > 0.0)) continue;
    if (runs.span_affine(std::min(x1, x2), std::max(x1, x2))) {
      const double ratio = img / param;
      cert.min_near_ratio = std::min(cert.min_near_ratio, ratio);
      if (ratio < cert.lip * (1.0 - 1e-6)) pass = false;
    } else if (std::fabs(x1 - x2) >= 4.0 * cert.gamma) {
      cert.min_far_gap = std::min(cert.min_far_gap, img);
      if (far_bound < kInf && img < far_bound * (1.0 - 1e-9)) pass = false;
    } else if (!(img > 0.0)) {
      pass = false;
    }
  }

  // Structured corner pairs across breakpoints.
  const auto& ybp = sm.y.breakpoints();
  for (std::size_t l = 1; l + 1 < ybp.size(); ++l) {
    for (double s : {0.125 * cert.gamma, 0.5 * cert.gamma}) {
      const double xa = std::max(0.0, ybp[l] - s), xb = std::min(1.0, ybp[l] + s);
      const Vec2 d1 = sm.eval(xa, half) - sm.eval(xb, -half);
      const Vec2 d2 = sm.eval(xa, -half) - sm.eval(xb, half);
      if (!(norm(d1) > 0.0) || !(norm(d2) > 0.0)) pass = false;
    }
  }

  // Boundary crossing scan between parameter-far portions.
  std::vector<Vec2> upper, lower;
  upper.reserve(grid.size());
  lower.reserve(grid.size());
  for (double x : grid) {
    const Vec2 c = sm.y.eval(x), bx = sm.b.eval(x);
    upper.push_back(c + half * bx);
    lower.push_back(c - half * bx);
  }
  cert.boundary_crossing =
      detail::boundary_crossing_scan(grid, upper, lower, cert.gamma);
  if (cert.boundary_crossing) pass = false;

  cert.injective_protocol = pass;
  return cert;
}

/// Largest certified strip thickness for an injective curve with a continuous
/// director field:
///   stage 1: h0 keeps det(y' + x2 b' | b) >= delta/2 across the width;
///   stage 2: (h1, gamma) give a local lower Lipschitz bound on near pairs;
///   stage 3: alpha = min image distance between parameter-far pieces caps
///            h3 < alpha / (4 sup|b|).
inline StripMap tubular_thickness(const PolylineCurve& y, const CosseratField& b,
                                  double delta, double h_cap = 1.0,
                                  std::uint64_t seed = 1) {
  if (!(delta > 0.0)) throw precondition_error("delta must be positive");
  if (!(h_cap > 0.0)) throw precondition_error("thickness cap must be positive");
  if (detail::curve_is_closed(y))
    throw precondition_error("closed curves admit no tubular strip");
  if (!self_intersections(y).injective)
    throw precondition_error("tubular thickness requires an injective curve");
  if (b.kind == CosseratField::Kind::piecewise) {
    for (std::size_t l = 0; l + 1 < y.num_segments(); ++l) {
      if (!(b.values[l] == b.values[l + 1]))
        throw precondition_error(
            "piecewise director jumps at a corner; smooth it first");
    }
  }

  StripMap sm(y, b, 0.0);
  const std::vector<double> grid = detail::strip_grid(sm);
  const double D = detail::det_floor_on_grid(y, b, grid);
  if (!(D >= delta))
    throw precondition_error("director determinant below delta");

  double min_len = kInf;
  for (std::size_t l = 0; l < y.num_segments(); ++l)
    min_len = std::min(min_len, y.segment_length(l));
  const double Bp = b.deriv_bound;
  const double supb = b.sup_norm();

  // Stage 1.
  double M1 = 0.0;
  if (b.kind == CosseratField::Kind::sampled) {
    for (std::size_t q = 0; q + 1 < b.breaks.size(); ++q) {
      const double dx = b.breaks[q + 1] - b.breaks[q];
      if (!(dx > 0.0)) continue;
      const Vec2 bd = (1.0 / dx) * (b.values[q + 1] - b.values[q]);
      M1 = std::max(M1, std::fabs(det2(bd, b.values[q])));
      M1 = std::max(M1, std::fabs(det2(bd, b.values[q + 1])));
    }
  }
  const double h0 = (M1 > 0.0) ? 2.0 * (D - 0.5 * delta) / M1 : kInf;

  // Stage 2.
  double L0 = kInf;
  for (double x : grid) {
    const auto& bp = y.breakpoints();
    for (std::size_t l = 0; l < y.num_segments(); ++l) {
      if (x >= bp[l] - 1e-15 && x <= bp[l + 1] + 1e-15)
        L0 = std::min(L0, detail::sigma_min2x2(y.slope(l), b.eval(x)));
    }
  }
  const double lip = std::min(0.25 * delta, 0.5 * L0);
  const double pmax = L0 - lip;
  // Far threshold kept coarse so the clearance grid stays tractable when the
  // director varies fast; the Lipschitz window is diagnostic (the certified
  // claim covers director-constant spans, where the strip map is affine).
  double gamma = std::min(0.25, std::max(0.25 * min_len, 1.0 / 3000.0));
  const double gamma_lip =
      (Bp > 0.0) ? std::min(gamma, pmax / (4.0 * Bp)) : gamma;
  const double h1 = (Bp > 0.0) ? pmax / Bp : kInf;

  // Stage 3: clearance between parameter-far subsegments.  Pairs inside one
  // affine span are exempt: there the map is a single injective affine map,
  // so far parameters need no image clearance (a lone straight piece keeps
  // alpha infinite and is capped by stage 1 alone).
  std::vector<double> cuts;
  for (double g = gamma; g < 1.0; g += gamma) cuts.push_back(g);
  const std::vector<double> sub = detail::merged_grid(y.breakpoints(), cuts);
  const detail::AffineRuns runs = detail::affine_runs(y, b);
  double alpha = kInf;
  for (std::size_t a = 0; a + 1 < sub.size(); ++a) {
    for (std::size_t c = a + 1; c + 1 < sub.size(); ++c) {
      if (!(sub[c] - sub[a + 1] >= 2.0 * gamma * (1.0 - 1e-12))) continue;
      if (runs.span_affine(sub[a], sub[c + 1])) continue;
      alpha = std::min(alpha,
                       detail::segment_distance(y.eval(sub[a]), y.eval(sub[a + 1]),
                                                y.eval(sub[c]), y.eval(sub[c + 1])));
    }
  }
  if (alpha == 0.0)
    throw construction_error("image clearance between far pieces vanished");
  const double h3 = (alpha < kInf && supb > 0.0) ? 0.999 * alpha / (4.0 * supb) : kInf;

  double h = std::min(std::min(h_cap, h0), h3);
  if (!(h > 0.0)) throw construction_error("no positive strip thickness certified");

  sm.h = h;
  sm.cert.delta = delta;
  sm.cert.alpha = alpha;
  sm.cert.gamma = gamma;
  sm.cert.gamma_lip = gamma_lip;
  sm.cert.lip = lip;
  sm.cert.h0 = h0;
  sm.cert.h1 = h1;
  sm.cert.h3 = h3;
  sm.cert = verify_strip(sm, 10000, seed);
  if (!sm.cert.injective_protocol)
    throw construction_error("strip verification failed at the certified thickness");
  return sm;
}

/// One-dimensional non-interpenetration check: parametric length against the
/// measure of the image.  Folds count their run twice on the left but once on
/// the right; genuine crossings do not inflate the left side.
struct CnReport {
  double lhs = 0.0;  // integral of |y'|
  double rhs = 0.0;  // H^1 measure of the image
  double tol = 0.0;
  bool satisfied = false;
};

inline CnReport ciarlet_necas_1d_check(const PolylineCurve& y) {
  CnReport rep;
  rep.lhs = y.length();
  rep.rhs = image_length(y);
  rep.tol = 1e-9 * (1.0 + rep.rhs);
  rep.satisfied = rep.lhs <= rep.rhs + rep.tol;
  return rep;
}

}  // namespace rodlab

#endif  // RODLAB_EXTRUSION_HPP
