#ifndef RODLAB_RELAXATION_HPP
#define RODLAB_RELAXATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/energy.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

namespace detail {

/// Drop zero-weight atoms, reject invalid ones, normalize weights to sum 1.
inline std::vector<LaminateAtom> checked_atoms(const Laminate& lam) {
  std::vector<LaminateAtom> atoms;
  double total = 0.0;
  for (const auto& at : lam.atoms) {
    if (!(at.t >= 0.0)) throw precondition_error("laminate weight must be nonnegative");
    if (at.t == 0.0) continue;
    if (!(norm2(at.a) > 0.0))
      throw precondition_error("laminate atom with zero gradient is invalid");
    if (!std::isfinite(at.a.x) || !std::isfinite(at.a.y) || !std::isfinite(at.t))
      throw precondition_error("laminate atom must be finite");
    atoms.push_back(at);
  }
  if (atoms.empty()) throw precondition_error("laminate has no positive-weight atoms");
  for (const auto& at : atoms) total += at.t;
  if (std::fabs(total - 1.0) > 1e-9)
    throw precondition_error("laminate weights must sum to one");
  for (auto& at : atoms) at.t /= total;
  return atoms;
}

/// Modification applied to the first leg of a laminate block when the plain
/// zigzag fails to be injective.
///   kind 0: none
///   kind 1: split the first leg into two halves with slopes a1 +- amp*e_comp
///           (endpoint preserved)
///   kind 2: tilt the whole first leg to a1 + sign*amp*e_comp (endpoint moves)
struct LegMod {
  int kind = 0;
  int comp = 0;
  double amp = 0.0;
  int sign = 1;
};

/// Repair ladder for a block whose first leg has slope a1.  Tried in order;
/// the first entry is always the unmodified block.  Shift-inducing tilts are
/// appended only when allow_shift is set.
inline std::vector<LegMod> mod_ladder(Vec2 a1, bool allow_shift) {
  std::vector<LegMod> mods;
  mods.push_back(LegMod{});
  const int jp = (std::fabs(a1.x) > 0.0) ? 0 : 1;  // first nonzero component
  const double comp_amp[2] = {0.5 * std::fabs(a1.x), 0.5 * std::fabs(a1.y)};
  const double big = 0.5 * norm(a1);
  for (int pass = 0; pass < 2; ++pass) {
    for (int jj = 0; jj < 2; ++jj) {
      const int j = (jj == 0) ? jp : 1 - jp;
      const double amp = (pass == 0) ? comp_amp[j] : big;
      if (!(amp > 0.0)) continue;
      mods.push_back(LegMod{1, j, amp, +1});
      mods.push_back(LegMod{1, j, amp, -1});
    }
  }
  if (allow_shift) {
    for (int jj = 0; jj < 2; ++jj) {
      const int j = (jj == 0) ? jp : 1 - jp;
      for (int pass = 0; pass < 2; ++pass) {
        const double amp = (pass == 0) ? comp_amp[j] : big;
        if (!(amp > 0.0)) continue;
        mods.push_back(LegMod{2, j, amp, +1});
        mods.push_back(LegMod{2, j, amp, -1});
      }
    }
  }
  return mods;
}

/// One period of a laminate path on [0,1]: breakpoints and vertices, starting
/// at the origin.  end == last vertex (the effective per-period displacement).
struct BlockPlan {
  std::vector<double> bp;
  std::vector<Vec2> vx;
  Vec2 end;
};

inline BlockPlan build_block(const std::vector<LaminateAtom>& atoms, const LegMod& mod) {
  BlockPlan blk;
  blk.bp.push_back(0.0);
  blk.vx.push_back(Vec2{0.0, 0.0});
  double c = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double t = atoms[i].t;
    const Vec2 a = atoms[i].a;
    const Vec2 e = (mod.comp == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    if (i == 0 && mod.kind == 1) {
      const Vec2 d = (mod.sign > 0) ? mod.amp * e : -mod.amp * e;
      blk.bp.push_back(c + 0.5 * t);
      blk.vx.push_back(blk.vx.back() + 0.5 * t * (a + d));
      blk.bp.push_back(c + t);
      blk.vx.push_back(blk.vx.back() + 0.5 * t * (a - d));
    } else if (i == 0 && mod.kind == 2) {
      const Vec2 d = (mod.sign > 0) ? mod.amp * e : -mod.amp * e;
      blk.bp.push_back(c + t);
      blk.vx.push_back(blk.vx.back() + t * (a + d));
    } else {
      blk.bp.push_back(c + t);
      blk.vx.push_back(blk.vx.back() + t * a);
    }
    c += t;
  }
  blk.bp.back() = 1.0;
  blk.end = blk.vx.back();
  return blk;
}

/// Periodize a unit block into n cells over [0,1]:
/// cell i reproduces the block at scale 1/n, translated to chain continuously.
inline PolylineCurve periodize_block(const BlockPlan& blk, std::size_t n) {
  std::vector<double> bp{0.0};
  std::vector<Vec2> vx{Vec2{0.0, 0.0}};
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 cur = vx.back();
    for (std::size_t j = 1; j < blk.bp.size(); ++j) {
      const double t = (static_cast<double>(i) + blk.bp[j]) / dn;
      cur = cur + (1.0 / dn) * (blk.vx[j] - blk.vx[j - 1]);
      if (t > bp.back()) {
        bp.push_back(t);
        vx.push_back(cur);
      } else {
        vx.back() = cur;
      }
    }
  }
  bp.back() = 1.0;
  return PolylineCurve(bp, vx);
}

/// Max distance from the periodized block's vertices to the chord [0, end].
inline double block_deviation(const PolylineCurve& c) {
  const Vec2 e = c.vertices().back();
  const double e2 = norm2(e);
  double dev = 0.0;
  for (std::size_t i = 0; i < c.vertices().size(); ++i) {
    const Vec2 v = c.vertices()[i];
    double d;
    if (e2 == 0.0) {
      d = norm(v);
    } else {
      double s = dot(v, e) / e2;
      s = std::clamp(s, 0.0, 1.0);
      d = norm(v - s * e);
    }
    dev = std::max(dev, d);
  }
  return dev;
}

inline double point_segment_dist(Vec2 z, Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  const double dd = norm2(d);
  if (dd == 0.0) return norm(z - p);
  double s = dot(z - p, d) / dd;
  s = std::clamp(s, 0.0, 1.0);
  return norm(z - (p + s * d));
}

inline double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double o1 = det2(a1 - a0, b0 - a0);
  const double o2 = det2(a1 - a0, b1 - a0);
  const double o3 = det2(b1 - b0, a0 - b0);
  const double o4 = det2(b1 - b0, a1 - b0);
  if (((o1 > 0.0) != (o2 > 0.0)) && ((o3 > 0.0) != (o4 > 0.0)) && o1 != 0.0 &&
      o2 != 0.0 && o3 != 0.0 && o4 != 0.0)
    return 0.0;
  double d = point_segment_dist(a0, b0, b1);
  d = std::min(d, point_segment_dist(a1, b0, b1));
  d = std::min(d, point_segment_dist(b0, a0, a1));
  d = std::min(d, point_segment_dist(b1, a0, a1));
  return d;
}

/// Injective periodized laminate block.  Tries first-leg modifications (and,
/// when permutations are allowed, atom reorderings) until the n-cell curve
/// passes the exact self-intersection check.
inline PolylineCurve injective_block(const std::vector<LaminateAtom>& atoms,
                                     std::size_t n, bool allow_shift,
                                     bool allow_permute) {
  std::vector<std::size_t> perm(atoms.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<LaminateAtom> ordered;
    ordered.reserve(atoms.size());
    for (std::size_t idx : perm) ordered.push_back(atoms[idx]);
    for (const LegMod& mod : mod_ladder(ordered[0].a, allow_shift)) {
      const BlockPlan blk = build_block(ordered, mod);
      PolylineCurve cand = periodize_block(blk, n);
      if (self_intersections(cand).injective) return cand;
    }
    if (!allow_permute) break;
  } while (std::next_permutation(perm.begin(), perm.end()));
  throw construction_error("laminate path could not be repaired to an injective zigzag");
}

}  // namespace detail

/// Injective periodized zigzag realizing a laminate: n cells, each a scaled
/// copy of the one-period path through the laminate's gradients.  When the
/// plain path self-intersects, the first leg is modified (compensated split
/// first, then an endpoint-shifting tilt) until the exact injectivity check
/// passes.
inline PolylineCurve zigzag_laminate_curve(const Laminate& lam, std::size_t n) {
  if (n < 1) throw precondition_error("cell count must be at least 1");
  const auto atoms = detail::checked_atoms(lam);
  return detail::injective_block(atoms, n, /*allow_shift=*/true,
                                 /*allow_permute=*/false);
}

/// Piecewise-affine approximation of a curve whose energy approaches the
/// convexified energy: straight buffers of width beta at each breakpoint and
/// an n-cell laminate zigzag in each middle zone.
struct RecoveryResult {
  explicit RecoveryResult(PolylineCurve c) : curve(std::move(c)) {}
  PolylineCurve curve;
  double beta = 0.0;
  std::size_t n = 0;
  double energy_out = 0.0;       // integral of f along the emitted curve
  double envelope_energy = 0.0;  // integral of the convexified density along y
  double input_energy = 0.0;     // integral of f along y
  double term_buffer = 0.0;      // 2 * beta * input_energy
  double term_n = 0.0;           // 1 / n
  double term_k = 0.0;           // 1 / k
  double bound = 0.0;            // envelope_energy + term_buffer + term_n + term_k
};

namespace detail {

struct PieceLaminate {
  std::vector<LaminateAtom> atoms;
  double gap = 0.0;  // sum t_i f(a_i) - envelope value at the piece slope
};

/// Laminate for slope xi from the table node nearest xi, atoms shifted so the
/// weighted sum equals xi exactly; optionally polished.
inline PieceLaminate piece_laminate(const ConvexEnvelopeTable& tab,
                                    const ReducedDensity& f, Vec2 xi,
                                    bool polish) {
  PieceLaminate out;
  const double R = tab.R;
  const auto clamp_idx = [&](double v) {
    long i = std::lround((v + R) / tab.h);
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(tab.n) - 1));
  };
  Laminate lam = tab.laminate_at_node(clamp_idx(xi.x), clamp_idx(xi.y));
  Vec2 mean{0.0, 0.0};
  double tot = 0.0;
  for (const auto& at : lam.atoms) {
    mean = mean + at.t * at.a;
    tot += at.t;
  }
  if (!(tot > 0.0)) throw construction_error("table returned an empty laminate");
  mean = (1.0 / tot) * mean;
  for (auto& at : lam.atoms) {
    at.t /= tot;
    at.a = at.a + (xi - mean);
  }
  if (polish) {
    Laminate refined = refine_laminate(f, xi, lam);
    double before = 0.0, after = 0.0;
    for (const auto& at : lam.atoms) before += at.t * f.f(at.a);
    for (const auto& at : refined.atoms) after += at.t * f.f(at.a);
    if (after < before) lam = refined;
  }
  out.atoms = checked_atoms(lam);
  double e = 0.0;
  for (const auto& at : out.atoms) e += at.t * f.f(at.a);
  out.gap = e - tab.value_at(xi);
  return out;
}

}  // namespace detail

/// Build the k-th recovery curve for an injective piecewise-affine y: keep y
/// on buffers of parameter width beta around each breakpoint, replace each
/// middle zone by an n-cell injective laminate zigzag with the piece's slope
/// as mean.  Records every term of the energy bound
///   energy_out <= envelope_energy + 2*beta*input_energy + 1/n + 1/k.
/// beta == 0 or n == 0 selects the default schedules
///   beta(k) = min_gap / k^2 (capped at min_gap / 4),  n(k) = k^2,
/// where min_gap is the smallest breakpoint gap of y.
inline RecoveryResult recovery_rod_sequence(const PolylineCurve& y,
                                            const ConvexEnvelopeTable& tab,
                                            const ReducedDensity& f,
                                            std::size_t k, double beta = 0.0,
                                            std::size_t n = 0) {
  if (k < 1) throw precondition_error("k must be at least 1");
  if (!self_intersections(y).injective)
    throw precondition_error("recovery input must be injective; injectify it first");
  const auto& ybp = y.breakpoints();
  const auto& yvx = y.vertices();
  const std::size_t L = y.num_segments();
  double min_gap = kInf;
  for (std::size_t l = 0; l < L; ++l) min_gap = std::min(min_gap, ybp[l + 1] - ybp[l]);
  const double dk = static_cast<double>(k);
  if (beta == 0.0) beta = std::min(min_gap / (dk * dk), 0.25 * min_gap);
  if (n == 0) n = k * k;
  if (!(beta > 0.0) || !(2.0 * beta < min_gap))
    throw precondition_error("buffer width must be positive and below half the shortest piece");

  const double input_energy = rod_energy(y, f.f);
  double envelope_energy = 0.0;
  std::vector<Vec2> slopes(L);
  double sum_f_slopes = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    slopes[l] = y.slope(l);
    if (!(norm2(slopes[l]) > 0.0))
      throw precondition_error("zero-speed piece has no laminate");
    envelope_energy += y.segment_length(l) * tab.value_at(slopes[l]);
    sum_f_slopes += f.f(slopes[l]);
  }

  // Shrink beta until the buffer cost the emitted curve actually pays,
  // 2*beta*sum_l f(xi_l), exceeds the budgeted 2*beta*input_energy by at most
  // 1/(2k); short pieces otherwise break the bookkeeping.
  for (int guard = 0; guard < 60; ++guard) {
    if (2.0 * beta * sum_f_slopes - 2.0 * beta * input_energy <= 0.5 / dk) break;
    beta *= 0.5;
  }

  // Laminates per piece, polished when the total gap would eat the 1/n + 1/(2k)
  // slack.
  std::vector<detail::PieceLaminate> lams(L);
  for (int round = 0; round < 2; ++round) {
    double gap_total = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      lams[l] = detail::piece_laminate(tab, f, slopes[l], /*polish=*/round > 0);
      gap_total += y.segment_length(l) * std::max(lams[l].gap, 0.0);
    }
    if (gap_total <= 1.0 / static_cast<double>(n) + 0.5 / dk) break;
    if (round == 1)
      throw construction_error("laminate gaps exceed the recovery energy budget");
  }

  for (int attempt = 0; attempt < 16; ++attempt) {
    // Blocks and their deviation from the straight middle chord.
    std::vector<PolylineCurve> blocks;
    std::vector<double> dev(L, 0.0);
    blocks.reserve(L);
    bool ok = true;
    for (std::size_t l = 0; l < L; ++l) {
      blocks.push_back(detail::injective_block(lams[l].atoms, n,
                                               /*allow_shift=*/false,
                                               /*allow_permute=*/true));
      const double S = (ybp[l + 1] - ybp[l]) - 2.0 * beta;
      dev[l] = S * detail::block_deviation(blocks[l]);
    }
    // Clearance: each middle chord must be farther from every other piece than
    // twice its own bulge, so two bulged middles can never meet.
    for (std::size_t l = 0; l < L && ok; ++l) {
      const double xl = ybp[l], xr = ybp[l + 1];
      const Vec2 p = y.eval(xl + beta), q = y.eval(xr - beta);
      double clear_l = kInf;
      for (std::size_t m = 0; m < L; ++m) {
        if (m == l) continue;
        clear_l = std::min(clear_l, detail::segment_distance(p, q, yvx[m], yvx[m + 1]));
      }
      if (L > 1 && !(dev[l] < 0.5 * clear_l)) ok = false;
    }
    if (ok) {
      // Assemble.
      std::vector<double> bp{ybp.front()};
      std::vector<Vec2> vx{yvx.front()};
      const auto push = [&](double t, Vec2 v) {
        if (t > bp.back()) {
          bp.push_back(t);
          vx.push_back(v);
        } else {
          vx.back() = v;
        }
      };
      for (std::size_t l = 0; l < L; ++l) {
        const double xl = ybp[l], xr = ybp[l + 1];
        const double S = (xr - xl) - 2.0 * beta;
        const Vec2 p = y.eval(xl + beta), q = y.eval(xr - beta);
        push(xl + beta, p);
        const auto& blk = blocks[l];
        for (std::size_t j = 1; j < blk.breakpoints().size(); ++j)
          push(xl + beta + S * blk.breakpoints()[j], p + S * blk.vertices()[j]);
        bp.back() = xr - beta;
        vx.back() = q;
        push(xr, yvx[l + 1]);
      }
      PolylineCurve out(bp, vx);
      if (self_intersections(out).injective) {
        const double energy_out = rod_energy(out, f.f);
        RecoveryResult res(std::move(out));
        res.beta = beta;
        res.n = n;
        res.energy_out = energy_out;
        res.envelope_energy = envelope_energy;
        res.input_energy = input_energy;
        res.term_buffer = 2.0 * beta * input_energy;
        res.term_n = 1.0 / static_cast<double>(n);
        res.term_k = 1.0 / dk;
        res.bound = envelope_energy + res.term_buffer + res.term_n + res.term_k;
        if (res.energy_out > res.bound + 1e-9 * (1.0 + std::fabs(res.bound)))
          throw construction_error("recovery curve exceeds its energy bound");
        return res;
      }
    }
    n *= 2;  // halves the bulge of every block
  }
  throw construction_error("recovery middle zones could not be kept collision-free");
}

/// Finite-n energies of the two-slope oscillation used to show convexity of
/// the density is forced by lower semicontinuity.
struct NecessityStep {
  std::size_t n = 0;
  double energy = 0.0;
};

struct NecessityReport {
  Vec2 a{0.0, 0.0}, b{0.0, 0.0};
  double t = 0.0;
  Vec2 xi{0.0, 0.0};  // weak limit slope t*a + (1-t)*b
  bool colinear = false;
  bool perturbed = false;
  std::vector<NecessityStep> steps;
  double limit = 0.0;   // energy at the largest n
  double target = 0.0;  // t*f(a) + (1-t)*f(b)
  double envelope = std::numeric_limits<double>::quiet_NaN();
  bool envelope_checked = false;
  bool dominates = true;  // limit >= envelope value at xi (when checked)
};

/// Oscillate between gradients a (weight t) and b (weight 1-t) on n cells and
/// record the exact energies.  Opposite co-linear pairs get the first leg
/// perturbed by e_j/n in a direction off span(a) so each y_n stays injective.
inline NecessityReport convexity_necessity_experiment(
    const ReducedDensity& f, Vec2 a, Vec2 b, double t, std::size_t n_max,
    const std::function<double(Vec2)>& envelope = {}) {
  if (!(t > 0.0) || !(t < 1.0)) throw precondition_error("weight t must lie in (0,1)");
  if (!(norm2(a) > 0.0) || !(norm2(b) > 0.0))
    throw precondition_error("gradients must be nonzero");
  if (n_max < 1) throw precondition_error("n_max must be at least 1");
  NecessityReport rep;
  rep.a = a;
  rep.b = b;
  rep.t = t;
  rep.xi = t * a + (1.0 - t) * b;
  rep.colinear = (det2(a, b) == 0.0);
  const bool opposite = rep.colinear && dot(a, b) < 0.0;
  rep.perturbed = opposite;
  const int j = (a.y == 0.0) ? 1 : 0;  // e_j off span(a)
  const Vec2 e = (j == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};

  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n < n_max; n *= 2) ns.push_back(n);
  ns.push_back(n_max);
  for (std::size_t n : ns) {
    const double dn = static_cast<double>(n);
    const Vec2 an = opposite ? a + (1.0 / dn) * e : a;
    std::vector<double> bp{0.0};
    std::vector<Vec2> vx{Vec2{0.0, 0.0}};
    for (std::size_t i = 0; i < n; ++i) {
      bp.push_back((static_cast<double>(i) + t) / dn);
      vx.push_back(vx.back() + (t / dn) * an);
      bp.push_back((static_cast<double>(i) + 1.0) / dn);
      vx.push_back(vx.back() + ((1.0 - t) / dn) * b);
    }
    bp.back() = 1.0;
    PolylineCurve yn(bp, vx);
    if (!self_intersections(yn).injective)
      throw construction_error("necessity oscillation failed its injectivity check");
    rep.steps.push_back(NecessityStep{n, rod_energy(yn, f.f)});
  }
  rep.limit = rep.steps.back().energy;
  rep.target = t * f.f(a) + (1.0 - t) * f.f(b);
  if (envelope) {
    rep.envelope = envelope(rep.xi);
    rep.envelope_checked = true;
    rep.dominates = rep.limit + 1e-9 * (1.0 + std::fabs(rep.limit)) >= rep.envelope;
  }
  return rep;
}

}  // namespace rodlab

#endif  // RODLAB_RELAXATION_HPP
