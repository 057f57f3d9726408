#ifndef RODLAB_IO_HPP
#define RODLAB_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rodlab/curve.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/extrusion.hpp"
#include "rodlab/gamma.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/injectify.hpp"
#include "rodlab/relaxation.hpp"
#include "rodlab/vec2.hpp"

#define RODLAB_VERSION "0.1.0"

namespace rodlab::io {

using json = nlohmann::json;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- curve JSON ------------------------------------------------------------

inline json curve_to_json(const PolylineCurve& c) {
  json j;
  j["breakpoints"] = c.breakpoints();
  json vx = json::array();
  for (const Vec2& v : c.vertices()) vx.push_back({v.x, v.y});
  j["vertices"] = vx;
  return j;
}

inline PolylineCurve curve_from_json(const json& j) {
  if (!j.contains("breakpoints") || !j.contains("vertices"))
    throw precondition_error("curve JSON needs breakpoints and vertices");
  std::vector<double> bp;
  std::vector<Vec2> vx;
  try {
    bp = j.at("breakpoints").get<std::vector<double>>();
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2)
        throw precondition_error("vertex must be [x, y]");
      vx.push_back(Vec2{v[0].get<double>(), v[1].get<double>()});
    }
  } catch (const json::exception& e) {
    throw precondition_error(std::string("malformed curve JSON: ") + e.what());
  }
  return PolylineCurve(bp, vx);
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw precondition_error(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  return j;
}

inline PolylineCurve load_curve(const std::string& path) {
  return curve_from_json(load_json(path));
}

inline void save_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw precondition_error("cannot write " + path);
  out << text;
}

inline void save_json(const json& j, const std::string& path) {
  save_text(j.dump(2) + "\n", path);
}

inline json manifest(const std::string& command, const json& config,
                     std::uint64_t seed) {
  json m;
  m["tool"] = "rodlab";
  m["version"] = RODLAB_VERSION;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  return m;
}

// ---- reports to JSON -------------------------------------------------------

inline json vec_to_json(Vec2 v) { return json{v.x, v.y}; }

inline json certificate_to_json(const InjectifyCertificate& c) {
  json j;
  j["delta"] = c.delta;
  j["p"] = c.p;
  j["xi"] = c.xi;
  j["injective"] = c.injective;
  j["c0_error"] = c.c0_error;
  j["w1p_error"] = c.w1p_error;
  j["energy_in"] = c.energy_in;
  j["energy_out"] = c.energy_out;
  j["energy_ratio"] = c.energy_ratio;
  j["excess_constant"] = c.excess_constant;
  j["crossings"] = c.crossings;
  json radii;
  radii["eps1"] = c.radii.eps1;
  radii["eps2"] = c.radii.eps2;
  radii["eps3"] = c.radii.eps3;
  radii["nu"] = c.radii.nu;
  radii["eps"] = c.radii.eps;
  radii["eps_tilde"] = c.radii.eps_tilde;
  j["radii"] = radii;
  json pairs = json::array();
  for (const auto& pe : c.pairs) {
    pairs.push_back({{"t1", pe.t1},
                     {"t2", pe.t2},
                     {"distinct_images", pe.distinct_images},
                     {"lhs", pe.lhs},
                     {"rhs", pe.rhs},
                     {"bound", pe.bound}});
  }
  j["pairs"] = pairs;
  return j;
}

inline json strip_to_json(const StripMap& sm) {
  json j;
  j["h"] = sm.h;
  j["curve"] = curve_to_json(sm.y);
  json b;
  b["kind"] = sm.b.kind == CosseratField::Kind::piecewise ? "piecewise" : "sampled";
  switch (sm.b.provenance) {
    case CosseratField::Provenance::normal: b["provenance"] = "normal"; break;
    case CosseratField::Provenance::minimizer: b["provenance"] = "minimizer"; break;
    case CosseratField::Provenance::smoothed: b["provenance"] = "smoothed"; break;
  }
  b["breaks"] = sm.b.breaks;
  json vals = json::array();
  for (const Vec2& v : sm.b.values) vals.push_back(vec_to_json(v));
  b["values"] = vals;
  b["deriv_bound"] = sm.b.deriv_bound;
  j["director"] = b;
  json cert;
  cert["delta"] = sm.cert.delta;
  cert["det_floor"] = sm.cert.det_floor;
  cert["alpha"] = sm.cert.alpha;
  cert["gamma"] = sm.cert.gamma;
  cert["lip"] = sm.cert.lip;
  cert["h0"] = sm.cert.h0;
  cert["h1"] = sm.cert.h1;
  cert["h3"] = sm.cert.h3;
  cert["samples"] = sm.cert.samples;
  cert["seed"] = sm.cert.seed;
  cert["injective_protocol"] = sm.cert.injective_protocol;
  cert["min_far_gap"] = sm.cert.min_far_gap;
  cert["min_near_ratio"] = sm.cert.min_near_ratio;
  cert["boundary_crossing"] = sm.cert.boundary_crossing;
  j["certificate"] = cert;
  return j;
}

inline json cn_to_json(const CnReport& r) {
  return json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"tol", r.tol}, {"satisfied", r.satisfied}};
}

inline json recovery_to_json(const RecoveryResult& r) {
  json j;
  j["curve"] = curve_to_json(r.curve);
  j["beta"] = r.beta;
  j["n"] = r.n;
  j["energy_out"] = r.energy_out;
  j["envelope_energy"] = r.envelope_energy;
  j["input_energy"] = r.input_energy;
  j["term_buffer"] = r.term_buffer;
  j["term_n"] = r.term_n;
  j["term_k"] = r.term_k;
  j["bound"] = r.bound;
  return j;
}

inline json necessity_to_json(const NecessityReport& r) {
  json j;
  j["a"] = vec_to_json(r.a);
  j["b"] = vec_to_json(r.b);
  j["t"] = r.t;
  j["xi"] = vec_to_json(r.xi);
  j["colinear"] = r.colinear;
  j["perturbed"] = r.perturbed;
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back({{"n", s.n}, {"energy", s.energy}});
  j["steps"] = steps;
  j["limit"] = r.limit;
  j["target"] = r.target;
  if (r.envelope_checked) {
    j["envelope"] = r.envelope;
    j["dominates"] = r.dominates;
  }
  return j;
}

inline json gamma_report_to_json(const GammaReport& rep) {
  json j;
  switch (rep.status) {
    case TargetStatus::finite: j["status"] = "finite"; break;
    case TargetStatus::infinite: j["status"] = "infinite"; break;
    case TargetStatus::unknown: j["status"] = "unknown"; break;
  }
  if (rep.status == TargetStatus::finite) j["target"] = rep.target;
  json steps = json::array();
  for (const auto& s : rep.steps) {
    json e;
    e["ok"] = s.ok;
    e["k"] = s.req.k;
    if (!s.ok) {
      e["reason"] = s.reason;
    } else {
      e["h"] = s.h;
      e["n"] = s.n;
      e["i"] = s.i;
      e["J_h"] = s.J_h;
      e["J"] = s.J;
      e["gap"] = s.gap;
      e["det_min"] = s.det_min;
      e["proj_err"] = s.proj_err;
    }
    steps.push_back(e);
  }
  j["steps"] = steps;
  json probes = json::array();
  for (const auto& p : rep.probes) {
    probes.push_back({{"J_h", p.J_h},
                      {"proj_err", p.proj_err},
                      {"d2_norm", p.d2_norm},
                      {"d2_over_h", p.d2_over_h},
                      {"liminf_ok", p.liminf_ok}});
  }
  j["probes"] = probes;
  j["scope_note"] = rep.scope_note;
  return j;
}

// ---- CSV -------------------------------------------------------------------

inline std::string gamma_csv(const GammaReport& rep) {
  std::ostringstream os;
  os << "h,k,i,J_h,J,gap,det_min,proj_err\n";
  for (const auto& s : rep.steps) {
    if (!s.ok) {
      os << "NA," << s.req.k << ",NA,NA,NA,NA,NA,NA\n";
      continue;
    }
    os << fmt_double(s.h) << ',' << s.req.k << ',' << s.i << ','
       << fmt_double(s.J_h) << ',' << fmt_double(s.J) << ',' << fmt_double(s.gap)
       << ',' << fmt_double(s.det_min) << ',' << fmt_double(s.proj_err) << '\n';
  }
  return os.str();
}

inline std::string degree_csv(const DegreeMap& map) {
  std::ostringstream os;
  os << "x,y,degree\n";
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const Vec2 s = map.sample(ix, iy);
      os << fmt_double(s.x) << ',' << fmt_double(s.y) << ',';
      const auto& v = map.values[iy * map.nx + ix];
      if (v.has_value())
        os << *v;
      else
        os << "NA";
      os << '\n';
    }
  }
  return os.str();
}

inline std::string energies_csv(const std::vector<RecoveryResult>& seq) {
  std::ostringstream os;
  os << "k,beta,n,energy_out,envelope_energy,input_energy,bound\n";
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto& r = seq[k];
    os << (k + 1) << ',' << fmt_double(r.beta) << ',' << r.n << ','
       << fmt_double(r.energy_out) << ',' << fmt_double(r.envelope_energy) << ','
       << fmt_double(r.input_energy) << ',' << fmt_double(r.bound) << '\n';
  }
  return os.str();
}

// ---- SVG -------------------------------------------------------------------

namespace detail {

struct SvgFrame {
  double x0 = 0, y0 = 0, w = 1, h = 1;  // world box with margin
  double scale = 1;                      // world -> pixel
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return (h - (y - y0)) * scale; }  // flip y
};

inline SvgFrame make_frame(Vec2 lo, Vec2 hi, double target = 640.0) {
  SvgFrame f;
  const double mx = 0.05 * std::max(hi.x - lo.x, 1e-12);
  const double my = 0.05 * std::max(hi.y - lo.y, 1e-12);
  f.x0 = lo.x - mx;
  f.y0 = lo.y - my;
  f.w = (hi.x - lo.x) + 2.0 * mx;
  f.h = (hi.y - lo.y) + 2.0 * my;
  f.scale = target / std::max(f.w, f.h);
  return f;
}

inline std::string svg_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline void svg_polyline(std::ostringstream& os, const SvgFrame& f,
                         const std::vector<Vec2>& pts, const std::string& stroke,
                         double width, const std::string& extra = "") {
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
     << svg_number(width) << "\"" << extra << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    os << svg_number(f.px(pts[i].x)) << ',' << svg_number(f.py(pts[i].y));
  }
  os << "\"/>\n";
}

}  // namespace detail

struct RenderOptions {
  bool grid = false;
  double grid_delta = 0.0;     // spacing of the overlay grid (0 = none)
  bool mark_crossings = true;
  double stroke = 2.0;
};

inline std::string curve_svg(const std::vector<PolylineCurve>& curves,
                             const RenderOptions& opt = {}) {
  if (curves.empty()) throw precondition_error("nothing to render");
  Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const auto& c : curves) {
    Vec2 clo, chi;
    c.bounding_box(clo, chi);
    lo.x = std::min(lo.x, clo.x);
    lo.y = std::min(lo.y, clo.y);
    hi.x = std::max(hi.x, chi.x);
    hi.y = std::max(hi.y, chi.y);
  }
  const detail::SvgFrame f = detail::make_frame(lo, hi);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << detail::svg_number(f.w * f.scale) << "\" height=\""
     << detail::svg_number(f.h * f.scale) << "\" viewBox=\"0 0 "
     << detail::svg_number(f.w * f.scale) << ' ' << detail::svg_number(f.h * f.scale)
     << "\">\n";
  if (opt.grid && opt.grid_delta > 0.0) {
    const double d = opt.grid_delta;
    for (double x = std::ceil(f.x0 / d) * d; x <= f.x0 + f.w; x += d) {
      os << "<line stroke=\"#cccccc\" stroke-width=\"0.5\" x1=\""
         << detail::svg_number(f.px(x)) << "\" y1=\"0\" x2=\""
         << detail::svg_number(f.px(x)) << "\" y2=\""
         << detail::svg_number(f.h * f.scale) << "\"/>\n";
    }
    for (double y = std::ceil(f.y0 / d) * d; y <= f.y0 + f.h; y += d) {
      os << "<line stroke=\"#cccccc\" stroke-width=\"0.5\" x1=\"0\" y1=\""
         << detail::svg_number(f.py(y)) << "\" x2=\""
         << detail::svg_number(f.w * f.scale) << "\" y2=\""
         << detail::svg_number(f.py(y)) << "\"/>\n";
    }
  }
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  for (std::size_t ci = 0; ci < curves.size(); ++ci)
    detail::svg_polyline(os, f, curves[ci].vertices(), palette[ci % 5], opt.stroke);
  if (opt.mark_crossings) {
    for (const auto& c : curves) {
      const IntersectionReport rep = self_intersections(c);
      for (const Violation& v : rep.violations) {
        const Vec2 w{to_double(v.witness.x), to_double(v.witness.y)};
        os << "<circle fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" cx=\""
           << detail::svg_number(f.px(w.x)) << "\" cy=\""
           << detail::svg_number(f.py(w.y)) << "\" r=\"5\"/>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string strip_svg(const StripMap& sm) {
  const std::vector<double> grid = rodlab::detail::strip_grid(sm);
  std::vector<Vec2> upper, lower, mid;
  for (double x : grid) {
    const Vec2 c = sm.y.eval(x), b = sm.b.eval(x);
    upper.push_back(c + 0.5 * sm.h * b);
    lower.push_back(c - 0.5 * sm.h * b);
    mid.push_back(c);
  }
  Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const auto* poly : {&upper, &lower}) {
    for (const Vec2& v : *poly) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
  }
  const detail::SvgFrame f = detail::make_frame(lo, hi);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << detail::svg_number(f.w * f.scale) << "\" height=\""
     << detail::svg_number(f.h * f.scale) << "\" viewBox=\"0 0 "
     << detail::svg_number(f.w * f.scale) << ' ' << detail::svg_number(f.h * f.scale)
     << "\">\n";
  detail::svg_polyline(os, f, upper, "#2ca02c", 1.0);
  detail::svg_polyline(os, f, lower, "#2ca02c", 1.0);
  detail::svg_polyline(os, f, mid, "#1f77b4", 2.0);
  os << "</svg>\n";
  return os.str();
}

}  // namespace rodlab::io

#endif  // RODLAB_IO_HPP
