#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/exact.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

// Axis-aligned arrival grid. Line coordinates are chosen per axis so that no
// curve crossing can land on a grid corner; a single shared coordinate list
// would make that impossible for slope-one segments.
struct ArrivalGrid {
    double L = 0.0;
    std::vector<double> xs;  // vertical line abscissae, xs.front() = -L, xs.back() = L
    std::vector<double> ys;  // horizontal line ordinates
    double delta = 0.0;
    double max_gap = 0.0;
};

struct CrossingDatum {
    double t = 0.0;       // crossing parameter, strictly inside a segment
    Vec2 z;               // crossing point (on the grid line)
    RPoint z_exact;       // exact crossing point
    int axis = 0;         // 0: vertical line x = const, 1: horizontal line y = const
    std::size_t line = 0; // index into xs or ys
    std::size_t seg = 0;  // curve segment containing t
    Vec2 normal;          // unit normal of the line, oriented with <slope, n> > 0
    double v = 0.0;       // transversality constant
    double eta = 0.0;     // half-width of the parameter window
    double t_minus = std::numeric_limits<double>::quiet_NaN();
    double t_plus = std::numeric_limits<double>::quiet_NaN();
    double tilde_t_minus = std::numeric_limits<double>::quiet_NaN();
    double tilde_t_plus = std::numeric_limits<double>::quiet_NaN();
};

struct NeighborhoodRadii {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
    double nu = 0.0;
    double eps = 0.0;
    double eps_tilde = 0.0;
    double min_distinct_image = 0.0;  // over crossing images and both endpoints
    double dt_min = 0.0;              // min parameter gap, end gaps included
    std::size_t count = 0;
};

struct PairEnergy {
    double t1 = 0.0;
    double t2 = 0.0;
    bool distinct_images = true;
    double lhs = 0.0;    // energy of the output over [t1, t2]
    double rhs = 0.0;    // energy of the input over [t1, t2]
    double bound = 0.0;  // certified upper bound for lhs
};

struct InjectifyCertificate {
    double delta = 0.0;
    double p = 2.0;
    NeighborhoodRadii radii;
    double xi = 0.0;
    bool injective = false;
    double c0_error = 0.0;
    double w1p_error = 0.0;
    double energy_in = 0.0;
    double energy_out = 0.0;
    double energy_ratio = 1.0;
    double excess_constant = 0.0;  // C with E_out <= (1+delta)^(2p) E_in + C delta
    std::size_t crossings = 0;
    std::vector<PairEnergy> pairs;
};

// Parameters of the L1-mode error decomposition.
struct Step3Report {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double r = 0.0;
    double delta_max = 0.0;  // admissible fineness: delta < lambda * r / 8
    double bad_measure = 0.0;
};

namespace detail {

inline double nearest_line_dist(const std::vector<double>& lines, double x) {
    auto it = std::lower_bound(lines.begin(), lines.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != lines.end()) best = std::min(best, std::abs(*it - x));
    if (it != lines.begin()) best = std::min(best, std::abs(*(it - 1) - x));
    return best;
}

// One line per interval of length 2L/K, placed at the midpoint of the widest
// forbidden-free gap.
inline std::vector<double> choose_axis_lines(double L, std::size_t K,
                                             std::vector<double> forbidden) {
    std::sort(forbidden.begin(), forbidden.end());
    std::vector<double> lines;
    lines.reserve(K + 2);
    lines.push_back(-L);
    const double len = 2.0 * L / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double a = -L + static_cast<double>(k) * len;
        const double b = (k + 1 == K) ? L : a + len;
        std::vector<double> walls;
        walls.push_back(a);
        auto lo = std::lower_bound(forbidden.begin(), forbidden.end(), a);
        auto hi = std::upper_bound(forbidden.begin(), forbidden.end(), b);
        for (auto it = lo; it != hi; ++it) walls.push_back(*it);
        walls.push_back(b);
        double best_gap = -1.0;
        double pick = 0.5 * (a + b);
        for (std::size_t i = 0; i + 1 < walls.size(); ++i) {
            const double gap = walls[i + 1] - walls[i];
            if (gap > best_gap) {
                best_gap = gap;
                pick = 0.5 * (walls[i] + walls[i + 1]);
            }
        }
        if (best_gap <= 0.0)
            throw construction_error("no free position for a grid line; interval saturated");
        lines.push_back(pick);
    }
    lines.push_back(L);
    return lines;
}

// Exact off-axis coordinate of the crossing of segment (P,Q) with the line
// {axis coordinate = w}; the caller guarantees w lies strictly between the
// segment's axis coordinates.
inline Rat crossing_other_coord(const Vec2& P, const Vec2& Q, int axis, double w) {
    const Rat px(P.x), py(P.y), qx(Q.x), qy(Q.y), rw(w);
    if (axis == 0) return py + (rw - px) * (qy - py) / (qx - px);
    return px + (rw - py) * (qx - px) / (qy - py);
}

// True if value appears exactly in the sorted double list.
inline bool rat_in_lines(const std::vector<double>& lines, const Rat& value) {
    const double approx = to_double(value);
    auto it = std::lower_bound(lines.begin(), lines.end(), approx);
    for (int off = -1; off <= 1; ++off) {
        auto jt = it;
        if (off < 0) {
            if (jt == lines.begin()) continue;
            --jt;
        } else if (off > 0) {
            if (jt == lines.end()) continue;
            ++jt;
        }
        if (jt != lines.end() && Rat(*jt) == value) return true;
    }
    return false;
}

struct GridFault {
    int axis = 0;        // axis of the line whose crossing misbehaves
    double value = 0.0;  // coordinate of the offending line
    std::string what;
};

// Checks every crossing for corner hits; vertex and parallel-segment hits are
// prevented by the forbidden sets but asserted here too.
inline std::optional<GridFault> verify_grid(const PolylineCurve& c, const ArrivalGrid& g) {
    const auto& vx = c.vertices();
    for (std::size_t i = 0; i + 1 < vx.size(); ++i) {
        const Vec2 P = vx[i], Q = vx[i + 1];
        if (P.x == Q.x && P.y == Q.y) continue;
        if (P.x != Q.x) {
            const double lo = std::min(P.x, Q.x), hi = std::max(P.x, Q.x);
            auto it = std::upper_bound(g.xs.begin(), g.xs.end(), lo);
            for (; it != g.xs.end() && *it < hi; ++it) {
                const Rat h = crossing_other_coord(P, Q, 0, *it);
                if (rat_in_lines(g.ys, h))
                    return GridFault{0, *it, "crossing lands on a grid corner"};
            }
        } else if (std::binary_search(g.xs.begin(), g.xs.end(), P.x)) {
            return GridFault{0, P.x, "vertical line contains a vertical segment"};
        }
        if (P.y != Q.y) {
            const double lo = std::min(P.y, Q.y), hi = std::max(P.y, Q.y);
            auto it = std::upper_bound(g.ys.begin(), g.ys.end(), lo);
            for (; it != g.ys.end() && *it < hi; ++it) {
                const Rat a = crossing_other_coord(P, Q, 1, *it);
                if (rat_in_lines(g.xs, a))
                    return GridFault{1, *it, "crossing lands on a grid corner"};
            }
        } else if (std::binary_search(g.ys.begin(), g.ys.end(), P.y)) {
            return GridFault{1, P.y, "horizontal line contains a horizontal segment"};
        }
        for (const Vec2& V : {P, Q}) {
            if (std::binary_search(g.xs.begin(), g.xs.end(), V.x))
                return GridFault{0, V.x, "vertical line passes through a vertex"};
            if (std::binary_search(g.ys.begin(), g.ys.end(), V.y))
                return GridFault{1, V.y, "horizontal line passes through a vertex"};
        }
    }
    return std::nullopt;
}

}  // namespace detail

inline ArrivalGrid build_good_arrival_grid(const PolylineCurve& curve, double delta) {
    if (!(delta > 0.0)) throw precondition_error("delta must be positive");
    const auto& vx = curve.vertices();
    double m = 0.0;
    bool nonconstant = false;
    for (const Vec2& v : vx) {
        m = std::max({m, std::abs(v.x), std::abs(v.y)});
        if (v.x != vx.front().x || v.y != vx.front().y) nonconstant = true;
    }
    if (!nonconstant) throw precondition_error("constant curve has no arrival grid");

    const double L = m + 0.6 * delta;
    const std::size_t K = static_cast<std::size_t>(std::ceil(4.0 * L / delta));

    std::vector<double> forb_x, forb_y;
    for (const Vec2& v : vx) {
        forb_x.push_back(v.x);
        forb_y.push_back(v.y);
    }

    ArrivalGrid grid;
    grid.L = L;
    grid.delta = delta;
    std::vector<double> extra_x, extra_y;
    for (int attempt = 0; attempt < 40; ++attempt) {
        std::vector<double> fx = forb_x;
        fx.insert(fx.end(), extra_x.begin(), extra_x.end());
        grid.xs = detail::choose_axis_lines(L, K, fx);

        // Forbid the ordinates where segments meet the chosen vertical lines so
        // that no horizontal line can complete a corner crossing.
        std::vector<double> fy = forb_y;
        fy.insert(fy.end(), extra_y.begin(), extra_y.end());
        for (std::size_t i = 0; i + 1 < vx.size(); ++i) {
            const Vec2 P = vx[i], Q = vx[i + 1];
            if (P.x == Q.x) continue;
            const double lo = std::min(P.x, Q.x), hi = std::max(P.x, Q.x);
            auto it = std::upper_bound(grid.xs.begin(), grid.xs.end(), lo);
            for (; it != grid.xs.end() && *it < hi; ++it)
                fy.push_back(P.y + (*it - P.x) * (Q.y - P.y) / (Q.x - P.x));
        }
        grid.ys = detail::choose_axis_lines(L, K, fy);

        const auto fault = detail::verify_grid(curve, grid);
        if (!fault) {
            grid.max_gap = 0.0;
            for (std::size_t i = 0; i + 1 < grid.xs.size(); ++i)
                grid.max_gap = std::max(grid.max_gap, grid.xs[i + 1] - grid.xs[i]);
            for (std::size_t i = 0; i + 1 < grid.ys.size(); ++i)
                grid.max_gap = std::max(grid.max_gap, grid.ys[i + 1] - grid.ys[i]);
            if (!(grid.max_gap < delta))
                throw construction_error("grid gap bound violated");
            return grid;
        }
        if (fault->axis == 0)
            extra_x.push_back(fault->value);
        else
            extra_y.push_back(fault->value);
    }
    throw construction_error("arrival grid verification kept failing after retries");
}

inline std::vector<CrossingDatum> crossing_set(const PolylineCurve& curve,
                                               const ArrivalGrid& grid) {
    const auto& vx = curve.vertices();
    const auto& bp = curve.breakpoints();
    std::vector<CrossingDatum> out;
    for (std::size_t i = 0; i + 1 < vx.size(); ++i) {
        const Vec2 P = vx[i], Q = vx[i + 1];
        const double h = bp[i + 1] - bp[i];
        if (P.x == Q.x && P.y == Q.y) continue;
        const Vec2 slope = curve.slope(i);
        for (int axis = 0; axis < 2; ++axis) {
            const auto& lines = (axis == 0) ? grid.xs : grid.ys;
            const double pa = (axis == 0) ? P.x : P.y;
            const double qa = (axis == 0) ? Q.x : Q.y;
            if (pa == qa) continue;
            const double lo = std::min(pa, qa), hi = std::max(pa, qa);
            auto it = std::upper_bound(lines.begin(), lines.end(), lo);
            for (; it != lines.end() && *it < hi; ++it) {
                const double w = *it;
                CrossingDatum cd;
                cd.axis = axis;
                cd.line = static_cast<std::size_t>(it - lines.begin());
                cd.seg = i;
                const Rat tr = Rat(bp[i]) + Rat(h) * (Rat(w) - Rat(pa)) / (Rat(qa) - Rat(pa));
                cd.t = to_double(tr);
                const Rat other = detail::crossing_other_coord(P, Q, axis, w);
                if (axis == 0) {
                    cd.z_exact = RPoint{Rat(w), other};
                    cd.z = Vec2{w, to_double(other)};
                    cd.normal = (qa > pa) ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0};
                    cd.v = 0.9 * std::abs(slope.x);
                } else {
                    cd.z_exact = RPoint{other, Rat(w)};
                    cd.z = Vec2{to_double(other), w};
                    cd.normal = (qa > pa) ? Vec2{0.0, 1.0} : Vec2{0.0, -1.0};
                    cd.v = 0.9 * std::abs(slope.y);
                }
                if (!(cd.v > 0.0)) throw construction_error("tangential grid crossing");
                cd.eta = 0.999 * std::min(cd.t - bp[i], bp[i + 1] - cd.t);
                if (!(cd.eta > 0.0)) throw construction_error("crossing at a segment breakpoint");
                out.push_back(cd);
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CrossingDatum& a, const CrossingDatum& b) { return a.t < b.t; });
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (!(out[i].t < out[i + 1].t))
            throw construction_error("coincident crossing parameters");
    // Shrink windows until pairwise disjoint.
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i > 0) out[i].eta = std::min(out[i].eta, 0.45 * (out[i].t - out[i - 1].t));
        if (i + 1 < out.size()) out[i].eta = std::min(out[i].eta, 0.45 * (out[i + 1].t - out[i].t));
        if (!(out[i].eta > 0.0)) throw construction_error("empty crossing window");
    }
    return out;
}

namespace detail {

// Groups crossing indices by exact image point.
inline std::vector<std::vector<std::size_t>> group_by_image(
    const std::vector<CrossingDatum>& cs) {
    std::vector<std::size_t> order(cs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cs[a].z.x != cs[b].z.x) return cs[a].z.x < cs[b].z.x;
        return cs[a].z.y < cs[b].z.y;
    });
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < order.size(); ++k) {
        bool merged = false;
        if (!groups.empty()) {
            const CrossingDatum& prev = cs[groups.back().front()];
            const CrossingDatum& cur = cs[order[k]];
            if (prev.z.x == cur.z.x && prev.z.y == cur.z.y && prev.z_exact == cur.z_exact) {
                groups.back().push_back(order[k]);
                merged = true;
            }
        }
        if (!merged) groups.push_back({order[k]});
    }
    return groups;
}

// Closest distance among pairwise distinct points (x-sorted sweep).
inline double closest_distinct_pair(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[j].x - pts[i].x;
            if (dx * dx >= best) break;
            best = std::min(best, norm2(pts[j] - pts[i]));
        }
    }
    return std::sqrt(best);
}

// Distance from z to the segment PQ restricted to parameters [u0,u1] in [0,1].
inline double point_subsegment_dist(const Vec2& z, const Vec2& P, const Vec2& Q,
                                    double u0, double u1) {
    const Vec2 d = Q - P;
    const double dd = norm2(d);
    double u = 0.0;
    if (dd > 0.0) u = dot(z - P, d) / dd;
    u = std::clamp(u, u0, u1);
    return dist(z, P + d * u);
}

// Fills the ball entry/exit parameters of the curve for the given eps.
inline void fill_ball_params(const PolylineCurve& curve, std::vector<CrossingDatum>& cs,
                             double eps) {
    for (CrossingDatum& c : cs) {
        const double speed = norm(curve.slope(c.seg));
        const double dt = eps / speed;
        if (!(dt < c.eta))
            throw construction_error("ball exit parameter escapes the crossing window");
        c.t_minus = c.t - dt;
        c.t_plus = c.t + dt;
    }
}

}  // namespace detail

// Computes the radius chain. The nu cap depends on the exponent p through the
// parameter-gap inequality, hence the extra argument (p = 1 gives the widest
// admissible value used by the other caps).
inline NeighborhoodRadii neighborhood_radii(const PolylineCurve& curve,
                                            const ArrivalGrid& grid,
                                            const std::vector<CrossingDatum>& crossings,
                                            double p = 1.0) {
    if (crossings.empty()) throw precondition_error("no crossings; radii undefined");
    if (!(p >= 1.0)) throw precondition_error("p must be at least 1");
    NeighborhoodRadii r;
    r.count = crossings.size();
    const double inf = std::numeric_limits<double>::infinity();

    // eps1: the nearest grid corner to a crossing lies on the crossing's own
    // line, so the distance is the off-axis gap to the other line family.
    r.eps1 = inf;
    for (const CrossingDatum& c : crossings) {
        const double d = (c.axis == 0) ? detail::nearest_line_dist(grid.ys, c.z.y)
                                       : detail::nearest_line_dist(grid.xs, c.z.x);
        r.eps1 = std::min(r.eps1, d);
    }

    // Minimum distance among distinct images, curve endpoints included.
    const auto groups = detail::group_by_image(crossings);
    std::vector<Vec2> reps;
    reps.reserve(groups.size() + 2);
    for (const auto& g : groups) reps.push_back(crossings[g.front()].z);
    const Vec2 e0 = curve.vertices().front();
    const Vec2 e1 = curve.vertices().back();
    reps.push_back(e0);
    if (e1.x != e0.x || e1.y != e0.y) reps.push_back(e1);
    r.min_distinct_image = (reps.size() >= 2) ? detail::closest_distinct_pair(reps) : inf;
    if (!(r.min_distinct_image > 1e-13 * (1.0 + grid.L)))
        throw construction_error("distinct crossing images are numerically coincident");
    r.eps2 = std::min(r.eps1, r.min_distinct_image);

    // eps3: inside B(z, eps3) the curve may only show the windows of crossings
    // with image z; m_pure is the distance from z to the rest of the curve.
    const auto& bp = curve.breakpoints();
    const auto& vx = curve.vertices();
    std::vector<std::size_t> group_of(crossings.size(), 0);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (std::size_t idx : groups[gi]) group_of[idx] = gi;
    std::vector<std::vector<std::size_t>> seg_crossings(curve.num_segments());
    for (std::size_t i = 0; i < crossings.size(); ++i)
        seg_crossings[crossings[i].seg].push_back(i);
    double min_eta_v = inf;
    for (const CrossingDatum& c : crossings) min_eta_v = std::min(min_eta_v, c.eta * c.v);
    double m_pure = inf;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Vec2 z = crossings[groups[gi].front()].z;
        for (std::size_t s = 0; s < curve.num_segments(); ++s) {
            const double a = bp[s], b = bp[s + 1];
            if (!(b > a)) continue;
            std::vector<std::pair<double, double>> keep{{a, b}};
            for (std::size_t idx : seg_crossings[s]) {
                if (group_of[idx] != gi) continue;
                const CrossingDatum& c = crossings[idx];
                const std::pair<double, double> w{c.t - c.eta, c.t + c.eta};
                std::vector<std::pair<double, double>> next;
                for (auto iv : keep) {
                    if (w.second <= iv.first || w.first >= iv.second) {
                        next.push_back(iv);
                        continue;
                    }
                    if (w.first > iv.first) next.push_back({iv.first, w.first});
                    if (w.second < iv.second) next.push_back({w.second, iv.second});
                }
                keep = std::move(next);
            }
            for (auto iv : keep) {
                const double u0 = (iv.first - a) / (b - a);
                const double u1 = (iv.second - a) / (b - a);
                m_pure = std::min(m_pure,
                                  detail::point_subsegment_dist(z, vx[s], vx[s + 1], u0, u1));
            }
        }
    }
    if (!(m_pure > 0.0)) throw construction_error("ball purity radius collapsed");
    r.eps3 = 0.5 * std::min({r.eps2, min_eta_v, m_pure});

    // Parameter gaps, end gaps included.
    r.dt_min = crossings.front().t;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i)
        r.dt_min = std::min(r.dt_min, crossings[i + 1].t - crossings[i].t);
    r.dt_min = std::min(r.dt_min, 1.0 - crossings.back().t);
    if (!(r.dt_min > 0.0)) throw construction_error("crossing parameter gap collapsed");

    // nu: 4 nu < delta * min distinct distance, and dt^(1-p) nu^p #F <= delta.
    const double nf = static_cast<double>(r.count);
    const double cap_a = 0.5 * 0.25 * grid.delta * r.min_distinct_image;
    const double cap_b =
        0.5 * std::pow(grid.delta / nf, 1.0 / p) * std::pow(r.dt_min, (p - 1.0) / p);
    r.nu = std::min(cap_a, cap_b);

    r.eps = 0.5 * std::min({r.eps3, r.nu, grid.delta / nf});

    // eps_tilde: half the clearance between the grid and the image of the
    // complement of the ball windows; extremes occur at window boundaries and
    // segment ends because the line distance is monotone between crossings.
    auto cs_local = crossings;
    detail::fill_ball_params(curve, cs_local, r.eps);
    std::vector<std::vector<std::pair<double, double>>> holes(curve.num_segments());
    for (const CrossingDatum& c : cs_local) holes[c.seg].push_back({c.t_minus, c.t_plus});
    double clearance = inf;
    for (std::size_t s = 0; s < curve.num_segments(); ++s) {
        double a = bp[s];
        const double b = bp[s + 1];
        if (!(b > a)) continue;
        auto& hs = holes[s];
        std::sort(hs.begin(), hs.end());
        std::vector<std::pair<double, double>> pieces;
        for (auto h : hs) {
            if (h.first > a) pieces.push_back({a, h.first});
            a = std::max(a, h.second);
        }
        if (b > a) pieces.push_back({a, b});
        for (auto piece : pieces) {
            for (double tt : {piece.first, piece.second}) {
                const Vec2 q = curve.eval(tt);
                clearance = std::min(clearance, detail::nearest_line_dist(grid.xs, q.x));
                clearance = std::min(clearance, detail::nearest_line_dist(grid.ys, q.y));
            }
        }
    }
    if (!(clearance > 0.0))
        throw construction_error("curve touches the grid outside the ball windows");
    double tilde = 0.5 * clearance;
    // Keep the witness band narrow enough that it cannot slip across the line
    // just outside the torn window.
    for (const CrossingDatum& c : crossings) {
        const double speed = norm(curve.slope(c.seg));
        tilde = std::min(tilde, 0.5 * r.eps * c.v / (c.v + speed));
    }
    r.eps_tilde = tilde;

    // Ball sanity: pairwise disjoint and corner-free.
    if (!(2.0 * r.eps < r.min_distinct_image) || !(r.eps < r.eps1))
        throw construction_error("ball disjointness check failed");
    return r;
}

namespace detail {

struct TornPoint {
    double t = 0.0;
    Vec2 x;  // torn crossing point, exactly on its grid line
    RPoint x_exact;
    int axis = 0;
    std::size_t line = 0;
};

// Boundary hits of the witness on B(z, eps) within [lo, hi].
inline std::pair<double, double> witness_ball_hits(const PolylineCurve& w, const Vec2& z,
                                                   double eps, double lo, double hi) {
    const auto& bp = w.breakpoints();
    std::vector<double> cuts{lo};
    for (double b : bp)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    double first = std::numeric_limits<double>::quiet_NaN();
    double last = first;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        const Vec2 P = w.eval(a);
        const Vec2 Q = w.eval(b);
        const Vec2 d = (Q - P) / (b - a);
        const double A = norm2(d);
        if (A <= 0.0) continue;
        const double B = 2.0 * dot(P - z, d);
        const double C = norm2(P - z) - eps * eps;
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        for (double u : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
            if (u < 0.0 || u > b - a) continue;
            const double s = a + u;
            if (std::isnan(first) || s < first) first = s;
            if (std::isnan(last) || s > last) last = s;
        }
    }
    if (std::isnan(first))
        throw construction_error("witness does not meet the tear ball boundary");
    return {first, last};
}

struct TearData {
    PolylineCurve phi_hat{{0.0, 1.0}, {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}}};
    std::vector<TornPoint> torn;
};

inline TearData tear_core(const PolylineCurve& curve, const PolylineCurve& witness,
                          const ArrivalGrid& grid, std::vector<CrossingDatum>& cs,
                          const NeighborhoodRadii& r) {
    const auto wr = self_intersections(witness);
    if (!wr.injective) throw precondition_error("witness curve is not injective");
    const double wc0 = c0_distance(witness, curve);
    if (!(wc0 < r.eps_tilde))
        throw precondition_error("witness too far from curve; need c0 distance below " +
                                 std::to_string(r.eps_tilde));
    fill_ball_params(curve, cs, r.eps);

    TearData td;
    td.torn.reserve(cs.size());
    for (CrossingDatum& c : cs) {
        const auto [s0, s1] =
            witness_ball_hits(witness, c.z, r.eps, c.t - c.eta, c.t + c.eta);
        if (!(s0 < c.t && c.t < s1))
            throw construction_error("tear window does not straddle the crossing");
        c.tilde_t_minus = s0;
        c.tilde_t_plus = s1;
        const Vec2 Wm = witness.eval(s0);
        const Vec2 Wp = witness.eval(s1);
        const double w = (c.axis == 0) ? grid.xs[c.line] : grid.ys[c.line];
        const double ca = ((c.axis == 0) ? Wm.x : Wm.y) - w;
        const double cb = ((c.axis == 0) ? Wp.x : Wp.y) - w;
        if (!((ca < 0.0 && cb > 0.0) || (ca > 0.0 && cb < 0.0)))
            throw construction_error("tear chord fails to cross its grid line");
        const Rat u = Rat(ca) / (Rat(ca) - Rat(cb));
        TornPoint tp;
        tp.t = c.t;
        tp.axis = c.axis;
        tp.line = c.line;
        if (c.axis == 0) {
            const Rat y = Rat(Wm.y) + u * (Rat(Wp.y) - Rat(Wm.y));
            tp.x_exact = RPoint{Rat(w), y};
            tp.x = Vec2{w, to_double(y)};
        } else {
            const Rat x = Rat(Wm.x) + u * (Rat(Wp.x) - Rat(Wm.x));
            tp.x_exact = RPoint{x, Rat(w)};
            tp.x = Vec2{to_double(x), w};
        }
        if (!(dist(curve.eval(c.t), tp.x) < 2.0 * r.eps))
            throw construction_error("torn point escapes the closeness bound");
        td.torn.push_back(tp);
    }

    // Assemble phi_hat: the witness outside the torn windows, two collinear
    // chord pieces through the torn point inside each window.
    std::vector<double> nb;
    std::vector<Vec2> nv;
    const auto& wb = witness.breakpoints();
    std::size_t wi = 0;
    auto push = [&](double t, const Vec2& v) {
        if (!nb.empty() && !(t > nb.back())) return;
        nb.push_back(t);
        nv.push_back(v);
    };
    push(0.0, witness.eval(0.0));
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double s0 = cs[k].tilde_t_minus, s1 = cs[k].tilde_t_plus;
        while (wi < wb.size() && wb[wi] < s0) {
            push(wb[wi], witness.eval(wb[wi]));
            ++wi;
        }
        push(s0, witness.eval(s0));
        push(cs[k].t, td.torn[k].x);
        push(s1, witness.eval(s1));
        while (wi < wb.size() && wb[wi] <= s1) ++wi;
    }
    while (wi < wb.size() && wb[wi] < 1.0) {
        push(wb[wi], witness.eval(wb[wi]));
        ++wi;
    }
    push(1.0, witness.eval(1.0));
    td.phi_hat = PolylineCurve(nb, nv);
    return td;
}

// Cumulative p-energy over a polyline for O(log n) interval queries.
struct EnergyPrefix {
    std::vector<double> bp;
    std::vector<double> density;  // |slope|^p per segment
    std::vector<double> prefix;

    EnergyPrefix(const PolylineCurve& c, double p) {
        bp = c.breakpoints();
        density.resize(c.num_segments());
        prefix.assign(c.num_segments() + 1, 0.0);
        for (std::size_t i = 0; i < c.num_segments(); ++i) {
            density[i] = std::pow(norm(c.slope(i)), p);
            prefix[i + 1] = prefix[i] + density[i] * (bp[i + 1] - bp[i]);
        }
    }

    double cumulative(double t) const {
        if (t <= bp.front()) return 0.0;
        if (t >= bp.back()) return prefix.back();
        const auto it = std::upper_bound(bp.begin(), bp.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - bp.begin()) - 1;
        return prefix[i] + density[i] * (t - bp[i]);
    }

    double on(double a, double b) const { return std::max(0.0, cumulative(b) - cumulative(a)); }
};

}  // namespace detail

inline PolylineCurve tear_on_grid(const PolylineCurve& curve, const PolylineCurve& witness,
                                  const ArrivalGrid& grid,
                                  std::vector<CrossingDatum>& crossings,
                                  const NeighborhoodRadii& radii) {
    auto td = detail::tear_core(curve, witness, grid, crossings, radii);
    const auto rep = self_intersections(td.phi_hat);
    if (!rep.injective)
        throw construction_error("torn curve failed the exact injectivity check");
    return td.phi_hat;
}

inline std::pair<PolylineCurve, InjectifyCertificate> pl_injectify(const PolylineCurve& curve,
                                                                   const PolylineCurve& witness,
                                                                   double delta, double p) {
    if (!(p >= 1.0)) throw precondition_error("p must be at least 1");
    InjectifyCertificate cert;
    cert.delta = delta;
    cert.p = p;
    cert.energy_in = dirichlet_energy(curve, p);

    const ArrivalGrid grid = build_good_arrival_grid(curve, delta);
    std::vector<CrossingDatum> cs = crossing_set(curve, grid);
    cert.crossings = cs.size();

    if (cs.empty()) {
        // The whole image lies inside one grid cell.
        const Vec2 a = curve.vertices().front();
        const Vec2 b = curve.vertices().back();
        PolylineCurve out({0.0, 1.0}, {a, b});
        if (a.x == b.x && a.y == b.y) {
            // Closed curve confined to a cell: loop through witness samples.
            std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
            std::vector<Vec2> pts;
            for (double t : ts) pts.push_back(witness.eval(t));
            pts.front() = a;
            pts.back() = b;
            out = PolylineCurve(ts, pts);
        }
        const auto rep = self_intersections(out);
        if (!rep.injective)
            throw construction_error("cell-confined fallback is not injective; refine delta");
        cert.injective = true;
        cert.c0_error = c0_distance(out, curve);
        cert.w1p_error = sobolev_distance(out, curve, p);
        cert.energy_out = dirichlet_energy(out, p);
        cert.energy_ratio = (cert.energy_in > 0.0) ? cert.energy_out / cert.energy_in : 1.0;
        return {out, cert};
    }

    NeighborhoodRadii radii = neighborhood_radii(curve, grid, cs, p);
    auto td = detail::tear_core(curve, witness, grid, cs, radii);
    cert.radii = radii;

    const std::size_t n = cs.size();
    // The output keeps the torn witness everywhere except between consecutive
    // crossings with equal image: there the excursion is cut and replaced by a
    // chord between the two torn points (bent into a symmetric tent when the
    // exact check reports a collision on it).  Keeping the witness between
    // distinct-image crossings is what makes the W^{1,p} error collapse for
    // transversal inputs; the chord replacement is what keeps the energy of an
    // equal-image interval at the scale of the tear ball.
    std::vector<char> replaced(n, 0);  // pair (k, k+1) stored at k
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (cs[k].z_exact == cs[k + 1].z_exact) replaced[k] = 1;

    // Tent side preference per replaced pair: the side of the line where the
    // witness runs between the two windows.
    std::vector<int> base_side(n, 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (!replaced[k]) continue;
        const double smid = 0.5 * (cs[k].tilde_t_plus + cs[k + 1].tilde_t_minus);
        const Vec2 q = witness.eval(smid);
        const double w = (cs[k].axis == 0) ? grid.xs[cs[k].line] : grid.ys[cs[k].line];
        const double coord = (cs[k].axis == 0) ? q.x : q.y;
        base_side[k] = (coord >= w) ? +1 : -1;
    }

    const double xi0 = 0.5 * delta / static_cast<double>(n);
    std::vector<int> tent_state(n, 0);  // 0 chord; j > 0 tent, side flips, amp halves

    const auto& wb = witness.breakpoints();
    PolylineCurve out = td.phi_hat;
    bool ok = false;
    for (int attempt = 0; attempt < 60 && !ok; ++attempt) {
        std::vector<double> nb;
        std::vector<Vec2> nv;
        std::vector<double> pair_lo, pair_hi;  // parameter ranges of replaced chords
        std::vector<std::size_t> pair_idx;
        std::size_t wi = 0;
        auto push = [&](double t, const Vec2& v) {
            if (!nb.empty() && !(t > nb.back())) return;
            nb.push_back(t);
            nv.push_back(v);
        };
        push(0.0, witness.eval(0.0));
        for (std::size_t k = 0; k < n; ++k) {
            const double s0 = cs[k].tilde_t_minus, s1 = cs[k].tilde_t_plus;
            const bool from_replace = (k > 0 && replaced[k - 1]);
            if (from_replace) {
                while (wi < wb.size() && wb[wi] < cs[k].t) ++wi;
                const int st = tent_state[k - 1];
                if (st > 0) {
                    const Vec2 X = td.torn[k - 1].x;
                    const Vec2 Y = td.torn[k].x;
                    const Vec2 nrm =
                        (cs[k - 1].axis == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
                    const int sgn = (st % 2 == 1) ? base_side[k - 1] : -base_side[k - 1];
                    const double amp =
                        xi0 * dist(X, Y) * 0.5 / std::pow(2.0, (st - 1) / 2);
                    push(0.5 * (cs[k - 1].t + cs[k].t), (X + Y) * 0.5 + nrm * (sgn * amp));
                }
            } else {
                while (wi < wb.size() && wb[wi] < s0) {
                    push(wb[wi], witness.eval(wb[wi]));
                    ++wi;
                }
                push(s0, witness.eval(s0));
            }
            push(cs[k].t, td.torn[k].x);
            if (k + 1 < n && replaced[k]) {
                pair_lo.push_back(cs[k].t);
                pair_hi.push_back(cs[k + 1].t);
                pair_idx.push_back(k);
                while (wi < wb.size() && wb[wi] <= s1) ++wi;
                continue;
            }
            push(s1, witness.eval(s1));
            while (wi < wb.size() && wb[wi] <= s1) ++wi;
        }
        while (wi < wb.size() && wb[wi] < 1.0) {
            push(wb[wi], witness.eval(wb[wi]));
            ++wi;
        }
        push(1.0, witness.eval(1.0));
        PolylineCurve cand(nb, nv);
        const auto rep = self_intersections(cand);
        if (rep.injective) {
            out = cand;
            ok = true;
            break;
        }
        // Escalate the tents of blamed chord pairs; a violation entirely among
        // kept pieces has no repair here.
        auto blame = [&](std::size_t seg) -> long {
            const double a = nb[seg], b = nb[seg + 1];
            for (std::size_t q = 0; q < pair_idx.size(); ++q)
                if (a >= pair_lo[q] - 1e-15 && b <= pair_hi[q] + 1e-15)
                    return static_cast<long>(pair_idx[q]);
            return -1;
        };
        bool escalated = false;
        for (const auto& v : rep.violations) {
            for (std::size_t seg : {v.seg_a, v.seg_b}) {
                const long k = blame(seg);
                if (k >= 0 && tent_state[k] < 12) {
                    tent_state[k]++;
                    escalated = true;
                }
            }
        }
        if (!escalated) break;
    }
    if (!ok)
        throw construction_error("injectification exhausted its tent repair budget");
    cert.xi = xi0;

    cert.injective = true;
    cert.c0_error = c0_distance(out, curve);
    if (!(cert.c0_error < 4.0 * delta))
        throw construction_error("uniform error bound 4*delta violated");
    cert.w1p_error = sobolev_distance(out, curve, p);
    cert.energy_out = dirichlet_energy(out, p);
    cert.energy_ratio = (cert.energy_in > 0.0) ? cert.energy_out / cert.energy_in : 1.0;
    const double scale = std::pow(1.0 + delta, 2.0 * p);
    cert.excess_constant = std::max(0.0, (cert.energy_out - scale * cert.energy_in) / delta);

    // Per-pair energies, end pieces included.
    const detail::EnergyPrefix ep_out(out, p);
    const detail::EnergyPrefix ep_in(curve, p);
    cert.pairs.reserve(n + 1);
    std::vector<double> knots;
    knots.reserve(n + 2);
    knots.push_back(0.0);
    for (const auto& c : cs) knots.push_back(c.t);
    knots.push_back(1.0);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        PairEnergy pe;
        pe.t1 = knots[k];
        pe.t2 = knots[k + 1];
        pe.lhs = ep_out.on(pe.t1, pe.t2);
        pe.rhs = ep_in.on(pe.t1, pe.t2);
        bool distinct = true;
        if (k > 0 && k + 1 < knots.size() - 1)
            distinct = !(cs[k - 1].z_exact == cs[k].z_exact);
        pe.distinct_images = distinct;
        if (distinct) {
            pe.bound = scale * pe.rhs;
        } else {
            const double dt = pe.t2 - pe.t1;
            pe.bound =
                std::pow(dt, 1.0 - p) * std::pow((1.0 + xi0) * 4.0 * radii.eps, p);
        }
        cert.pairs.push_back(pe);
    }
    return {out, cert};
}

// Convenience wrapper: uses the curve itself as witness when it is already
// injective, otherwise searches for one within eps_tilde / 2.
inline std::pair<PolylineCurve, InjectifyCertificate> pl_injectify_auto(
    const PolylineCurve& curve, double delta, double p, unsigned seed = 1) {
    const ArrivalGrid grid = build_good_arrival_grid(curve, delta);
    const std::vector<CrossingDatum> cs = crossing_set(curve, grid);
    if (cs.empty()) return pl_injectify(curve, curve, delta, p);
    const auto self = self_intersections(curve);
    if (self.injective) return pl_injectify(curve, curve, delta, p);
    const NeighborhoodRadii radii = neighborhood_radii(curve, grid, cs, p);
    const auto wr = find_injective_witness(curve, 0.5 * radii.eps_tilde, seed);
    if (wr.status == WitnessStatus::interpenetration_detected)
        throw precondition_error(
            "curve has a stable transversal self-crossing; no injective witness exists "
            "within the required uniform distance");
    if (wr.status != WitnessStatus::witness_found || !wr.witness)
        throw construction_error("no injective witness found within eps_tilde/2");
    return pl_injectify(curve, *wr.witness, delta, p);
}

// Exact L1 distance between the derivatives of two polylines.
inline double l1_derivative_error(const PolylineCurve& a, const PolylineCurve& b) {
    const auto mb = detail::merged_breakpoints(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < mb.size(); ++i) {
        const double h = mb[i + 1] - mb[i];
        if (!(h > 0.0)) continue;
        const double mid = 0.5 * (mb[i] + mb[i + 1]);
        total += h * norm(a.derivative(mid) - b.derivative(mid));
    }
    return total;
}

// Dyadic search for the L1-mode parameters: on the good set speeds exceed
// lambda and the local derivative oscillation stays below lambda / 8 within
// radius r windows; the complement measure stays below beta. The measure is
// over-counted conservatively (window-clipped breakpoint strips plus slow
// segments plus both domain ends).
inline Step3Report l1_certificate(const PolylineCurve& curve, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.25))
        throw precondition_error("alpha must lie in (0, 1/4)");
    Step3Report rep;
    rep.alpha = alpha;
    const auto& bp = curve.breakpoints();
    double max_speed = 0.0;
    double min_pos_speed = std::numeric_limits<double>::infinity();
    double min_seg = std::numeric_limits<double>::infinity();
    std::vector<double> jumps;
    for (std::size_t i = 0; i < curve.num_segments(); ++i) {
        const double sp = norm(curve.slope(i));
        max_speed = std::max(max_speed, sp);
        if (sp > 0.0) min_pos_speed = std::min(min_pos_speed, sp);
        min_seg = std::min(min_seg, bp[i + 1] - bp[i]);
        if (i > 0) jumps.push_back(norm(curve.slope(i) - curve.slope(i - 1)));
    }
    if (!(max_speed > 0.0)) throw precondition_error("constant curve");
    rep.beta = 0.99 * alpha / max_speed;

    const auto bad_measure = [&](double lambda, double r) {
        double bad = 2.0 * r;  // both domain ends
        for (std::size_t i = 0; i < curve.num_segments(); ++i) {
            const double sp = norm(curve.slope(i));
            if (sp > 0.0 && sp <= lambda) bad += bp[i + 1] - bp[i];
        }
        for (double J : jumps)
            if (J > 0.0) bad += 2.0 * r * std::max(0.0, 1.0 - lambda / (4.0 * J));
        return bad;
    };

    for (double lambda = 0.5 * std::min(alpha, min_pos_speed); lambda > 1e-300;
         lambda *= 0.5) {
        for (double r = 0.5 * std::min(alpha, 0.98 * min_seg); r > 1e-300; r *= 0.5) {
            const double bad = bad_measure(lambda, r);
            if (bad < rep.beta) {
                rep.lambda = lambda;
                rep.r = r;
                rep.bad_measure = bad;
                rep.delta_max = 0.125 * lambda * r;
                return rep;
            }
        }
    }
    throw construction_error("no admissible (lambda, r) pair found");
}

}  // namespace rodlab
