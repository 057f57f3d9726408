#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rodlab/rodlab.hpp"

namespace fs = std::filesystem;
using rodlab::io::json;

namespace {

rodlab::PolylineCurve input_curve(const std::string& curve_path,
                                  const std::string& fixture) {
  if (!fixture.empty()) return rodlab::fixtures::by_name(fixture);
  if (curve_path.empty())
    throw rodlab::precondition_error("pass --curve FILE or --fixture NAME");
  return rodlab::io::load_curve(curve_path);
}

rodlab::NeoHookean2D make_density(const std::string& name) {
  if (name == "neohookean") return rodlab::NeoHookean2D{};
  throw rodlab::precondition_error("unknown density: " + name);
}

rodlab::ConvexEnvelopeTable make_table(const rodlab::PolylineCurve& y, double R,
                                       std::size_t n, double gamma) {
  if (R <= 0.0) {
    double m = 0.0;
    for (std::size_t l = 0; l < y.num_segments(); ++l)
      m = std::max(m, rodlab::norm(y.slope(l)));
    R = std::max(2.0, 1.25 * m + 1.0);
  }
  return rodlab::convexify(rodlab::neo_hookean_reduced(), R, n, gamma);
}

int threads_from_env() {
  const char* v = std::getenv("RODLAB_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n > 0 ? n : 1;
}

json base_config(std::uint64_t seed) {
  json cfg;
  cfg["threads"] = threads_from_env();
  cfg["seed"] = seed;
  return cfg;
}

std::string violation_kind(rodlab::ViolationKind k) {
  switch (k) {
    case rodlab::ViolationKind::crossing: return "crossing";
    case rodlab::ViolationKind::touch: return "touch";
    default: return "overlap";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-affine rod laboratory"};
  app.require_subcommand(1);

  std::string curve_path, fixture, out_path, cert_path, svg_path, report_path;
  std::string density_name = "neohookean", schedule_path, format = "json";
  std::string fixture_name;
  double delta = 0.0625, pexp = 2.0, table_R = 0.0, table_gamma = 0.05;
  double band = 0.05, grid_delta = 0.0, arm_gap = 0.1;
  std::size_t kk = 4, table_n = 65, nx = 64, ny = 64;
  std::uint64_t seed = 1;

  CLI::App* c_check = app.add_subcommand("check", "injectivity and CN diagnostics");
  c_check->add_option("--curve", curve_path);
  c_check->add_option("--fixture", fixture);
  c_check->add_option("--out", out_path);
  c_check->add_option("--seed", seed);

  CLI::App* c_inj = app.add_subcommand("injectify", "injective approximation");
  c_inj->add_option("--curve", curve_path);
  c_inj->add_option("--fixture", fixture);
  c_inj->add_option("--delta", delta);
  c_inj->add_option("--p", pexp);
  c_inj->add_option("--seed", seed);
  c_inj->add_option("--out", out_path)->required();
  c_inj->add_option("--cert", cert_path);

  CLI::App* c_relax = app.add_subcommand("relax", "recovery rod sequence");
  c_relax->add_option("--curve", curve_path);
  c_relax->add_option("--fixture", fixture);
  c_relax->add_option("--density", density_name);
  c_relax->add_option("--k", kk);
  c_relax->add_option("--table-R", table_R);
  c_relax->add_option("--table-n", table_n);
  c_relax->add_option("--table-gamma", table_gamma);
  c_relax->add_option("--seed", seed);
  c_relax->add_option("--out", out_path)->required();

  CLI::App* c_ext = app.add_subcommand("extrude", "certified strip thickness");
  c_ext->add_option("--curve", curve_path);
  c_ext->add_option("--fixture", fixture);
  c_ext->add_option("--delta", delta);
  c_ext->add_option("--seed", seed);
  c_ext->add_option("--out", out_path)->required();
  c_ext->add_option("--svg", svg_path);

  CLI::App* c_cn = app.add_subcommand("check-cn", "1-D non-interpenetration check");
  c_cn->add_option("--curve", curve_path);
  c_cn->add_option("--fixture", fixture);
  c_cn->add_option("--out", out_path);
  c_cn->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  CLI::App* c_gamma = app.add_subcommand("gamma", "thin-limit experiment");
  c_gamma->add_option("--curve", curve_path);
  c_gamma->add_option("--fixture", fixture);
  c_gamma->add_option("--density", density_name);
  c_gamma->add_option("--schedule", schedule_path);
  c_gamma->add_option("--table-R", table_R);
  c_gamma->add_option("--table-n", table_n);
  c_gamma->add_option("--table-gamma", table_gamma);
  c_gamma->add_option("--seed", seed);
  c_gamma->add_option("--report", report_path)->required();
  c_gamma->add_option("--json", out_path);

  CLI::App* c_render = app.add_subcommand("render", "SVG rendering");
  c_render->add_option("--curve", curve_path);
  c_render->add_option("--fixture", fixture);
  c_render->add_option("--grid", grid_delta);
  c_render->add_option("--out", out_path)->required();

  CLI::App* c_deg = app.add_subcommand("degree", "winding degree map CSV");
  c_deg->add_option("--curve", curve_path);
  c_deg->add_option("--fixture", fixture);
  c_deg->add_option("--nx", nx);
  c_deg->add_option("--ny", ny);
  c_deg->add_option("--band", band);
  c_deg->add_option("--out", out_path)->required();

  CLI::App* c_fix = app.add_subcommand("fixture", "write a fixture curve");
  c_fix->add_option("--name", fixture_name)->required();
  c_fix->add_option("--gap", arm_gap);
  c_fix->add_option("--k", kk);
  c_fix->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_check) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      const rodlab::IntersectionReport rep = rodlab::self_intersections(y);
      json j;
      j["manifest"] = rodlab::io::manifest("check", base_config(seed), seed);
      j["injective"] = rep.injective;
      json viols = json::array();
      for (const auto& v : rep.violations) {
        viols.push_back({{"kind", violation_kind(v.kind)},
                         {"seg_a", v.seg_a},
                         {"seg_b", v.seg_b},
                         {"witness",
                          {rodlab::to_double(v.witness.x), rodlab::to_double(v.witness.y)}}});
      }
      j["violations"] = viols;
      if (!rep.injective) {
        const rodlab::WitnessResult wr = rodlab::find_injective_witness(
            y, 1e-3, static_cast<unsigned>(seed));
        switch (wr.status) {
          case rodlab::WitnessStatus::witness_found:
            j["witness_status"] = "witness_found";
            j["witness_c0_gap"] = wr.c0_gap;
            break;
          case rodlab::WitnessStatus::interpenetration_detected:
            j["witness_status"] = "interpenetration_detected";
            break;
          default:
            j["witness_status"] = "unknown";
        }
      }
      j["cn"] = rodlab::io::cn_to_json(rodlab::ciarlet_necas_1d_check(y));
      if (out_path.empty())
        std::cout << j.dump(2) << "\n";
      else
        rodlab::io::save_json(j, out_path);
      return 0;
    }

    if (*c_inj) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      auto [phi, cert] =
          rodlab::pl_injectify_auto(y, delta, pexp, static_cast<unsigned>(seed));
      json cfg = base_config(seed);
      cfg["delta"] = delta;
      cfg["p"] = pexp;
      json j = rodlab::io::curve_to_json(phi);
      j["manifest"] = rodlab::io::manifest("injectify", cfg, seed);
      j["certificate"] = rodlab::io::certificate_to_json(cert);
      rodlab::io::save_json(j, out_path);
      if (!cert_path.empty())
        rodlab::io::save_json(rodlab::io::certificate_to_json(cert), cert_path);
      return 0;
    }

    if (*c_relax) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      const rodlab::NeoHookean2D W = make_density(density_name);
      const rodlab::ReducedDensity f = rodlab::reduced_density(W);
      const rodlab::ConvexEnvelopeTable tab =
          make_table(y, table_R, table_n, table_gamma);
      fs::create_directories(out_path);
      std::vector<rodlab::RecoveryResult> seq;
      for (std::size_t k = 1; k <= kk; ++k) {
        seq.push_back(rodlab::recovery_rod_sequence(y, tab, f, k));
        json cfg = base_config(seed);
        cfg["k"] = k;
        cfg["density"] = density_name;
        json j = rodlab::io::recovery_to_json(seq.back());
        j["manifest"] = rodlab::io::manifest("relax", cfg, seed);
        rodlab::io::save_json(j, (fs::path(out_path) / ("ybar_" + std::to_string(k) + ".json")).string());
      }
      rodlab::io::save_text(rodlab::io::energies_csv(seq),
                            (fs::path(out_path) / "energies.csv").string());
      json mcfg = base_config(seed);
      mcfg["k_max"] = kk;
      mcfg["density"] = density_name;
      rodlab::io::save_json(rodlab::io::manifest("relax", mcfg, seed),
                            (fs::path(out_path) / "manifest.json").string());
      return 0;
    }

    if (*c_ext) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      rodlab::CosseratField b = rodlab::cosserat_normal(y);
      bool jumps = false;
      for (std::size_t l = 0; l + 1 < y.num_segments(); ++l)
        if (!(b.values[l] == b.values[l + 1])) jumps = true;
      if (jumps) {
        double min_gap = rodlab::kInf;
        const std::vector<double>& bp = y.breakpoints();
        for (std::size_t l = 0; l + 1 < bp.size(); ++l)
          min_gap = std::min(min_gap, bp[l + 1] - bp[l]);
        const std::size_t i =
            std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(2.5 / min_gap)));
        b = rodlab::smooth_cosserat(y, b, i, delta);
      }
      const rodlab::StripMap sm = rodlab::tubular_thickness(y, b, delta, 1.0, seed);
      json cfg = base_config(seed);
      cfg["delta"] = delta;
      json j = rodlab::io::strip_to_json(sm);
      j["manifest"] = rodlab::io::manifest("extrude", cfg, seed);
      rodlab::io::save_json(j, out_path);
      if (!svg_path.empty()) rodlab::io::save_text(rodlab::io::strip_svg(sm), svg_path);
      return 0;
    }

    if (*c_cn) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      const rodlab::CnReport rep = rodlab::ciarlet_necas_1d_check(y);
      if (format == "csv") {
        std::string csv = "lhs,rhs,satisfied\n" + rodlab::io::fmt_double(rep.lhs) +
                          "," + rodlab::io::fmt_double(rep.rhs) + "," +
                          (rep.satisfied ? "1" : "0") + "\n";
        if (out_path.empty())
          std::cout << csv;
        else
          rodlab::io::save_text(csv, out_path);
      } else {
        json j = rodlab::io::cn_to_json(rep);
        j["manifest"] = rodlab::io::manifest("check-cn", base_config(seed), seed);
        if (out_path.empty())
          std::cout << j.dump(2) << "\n";
        else
          rodlab::io::save_json(j, out_path);
      }
      return 0;
    }

    if (*c_gamma) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      const rodlab::NeoHookean2D W = make_density(density_name);
      const rodlab::ConvexEnvelopeTable tab =
          make_table(y, table_R, table_n, table_gamma);
      std::vector<rodlab::GammaStep> sched;
      if (!schedule_path.empty()) {
        const json sj = rodlab::io::load_json(schedule_path);
        if (sj.contains("steps")) {
          for (const auto& e : sj.at("steps")) {
            rodlab::GammaStep st;
            st.k = e.at("k").get<std::size_t>();
            if (e.contains("h")) st.h = e.at("h").get<double>();
            if (e.contains("i")) st.i = e.at("i").get<std::size_t>();
            sched.push_back(st);
          }
        } else if (sj.contains("ks")) {
          for (const auto& e : sj.at("ks"))
            sched.push_back({0.0, e.get<std::size_t>(), 0});
        } else {
          throw rodlab::precondition_error("schedule JSON needs steps or ks");
        }
      } else {
        for (std::size_t k : {2, 4, 8}) sched.push_back({0.0, k, 0});
      }
      const rodlab::GammaReport rep = rodlab::gamma_experiment(y, W, tab, sched, {}, seed);
      rodlab::io::save_text(rodlab::io::gamma_csv(rep), report_path);
      json cfg = base_config(seed);
      cfg["density"] = density_name;
      cfg["table_n"] = table_n;
      cfg["table_gamma"] = table_gamma;
      rodlab::io::save_json(rodlab::io::manifest("gamma", cfg, seed),
                            report_path + ".manifest.json");
      if (!out_path.empty()) {
        json j = rodlab::io::gamma_report_to_json(rep);
        j["manifest"] = rodlab::io::manifest("gamma", cfg, seed);
        rodlab::io::save_json(j, out_path);
      }
      return 0;
    }

    if (*c_render) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      rodlab::io::RenderOptions opt;
      if (grid_delta > 0.0) {
        opt.grid = true;
        opt.grid_delta = grid_delta;
      }
      rodlab::io::save_text(rodlab::io::curve_svg({y}, opt), out_path);
      return 0;
    }

    if (*c_deg) {
      const rodlab::PolylineCurve y = input_curve(curve_path, fixture);
      rodlab::Vec2 lo, hi;
      y.bounding_box(lo, hi);
      const rodlab::Vec2 margin{0.1 * (hi.x - lo.x) + 0.1, 0.1 * (hi.y - lo.y) + 0.1};
      const rodlab::DegreeMap map =
          rodlab::degree_map(y, lo - margin, hi + margin, nx, ny, band);
      rodlab::io::save_text(rodlab::io::degree_csv(map), out_path);
      return 0;
    }

    if (*c_fix) {
      rodlab::PolylineCurve y = [&]() {
        if (fixture_name == "u_shape") return rodlab::fixtures::u_shape(arm_gap);
        if (fixture_name == "simple") return rodlab::fixtures::simple_seq(kk);
        return rodlab::fixtures::by_name(fixture_name);
      }();
      json j = rodlab::io::curve_to_json(y);
      j["manifest"] = rodlab::io::manifest("fixture", base_config(seed), seed);
      rodlab::io::save_json(j, out_path);
      return 0;
    }
  } catch (const rodlab::precondition_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 1;
  } catch (const rodlab::construction_error& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
