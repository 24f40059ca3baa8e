#include "actionforge/io.hpp"

#include <iomanip>
#include <ostream>

namespace actionforge {

using nlohmann::json;

json to_json(const FourierTrajectory& u) {
  json cos_blocks = json::array();
  json sin_blocks = json::array();
  for (int k = 1; k <= u.harmonics(); ++k) {
    const Vec a = u.cos_coeff(k);
    const Vec b = u.sin_coeff(k);
    cos_blocks.push_back(std::vector<double>(a.begin(), a.end()));
    sin_blocks.push_back(std::vector<double>(b.begin(), b.end()));
  }
  const Vec m = u.mean();
  return json{{"T", u.period()},
              {"N", u.dim()},
              {"M", u.harmonics()},
              {"mean", std::vector<double>(m.begin(), m.end())},
              {"cos", cos_blocks},
              {"sin", sin_blocks}};
}

FourierTrajectory trajectory_from_json(const json& j) {
  const double T = j.at("T").get<double>();
  const int N = j.at("N").get<int>();
  const int M = j.at("M").get<int>();
  FourierTrajectory u(T, N, M);
  const auto mean = j.at("mean").get<std::vector<double>>();
  if (static_cast<int>(mean.size()) != N) throw std::invalid_argument("mean length != N");
  u.set_mean(Eigen::Map<const Vec>(mean.data(), N));
  const auto& cb = j.at("cos");
  const auto& sb = j.at("sin");
  if (static_cast<int>(cb.size()) != M || static_cast<int>(sb.size()) != M) {
    throw std::invalid_argument("cos/sin blocks must have M entries");
  }
  for (int k = 1; k <= M; ++k) {
    const auto a = cb.at(static_cast<std::size_t>(k - 1)).get<std::vector<double>>();
    const auto b = sb.at(static_cast<std::size_t>(k - 1)).get<std::vector<double>>();
    if (static_cast<int>(a.size()) != N || static_cast<int>(b.size()) != N) {
      throw std::invalid_argument("harmonic block length != N");
    }
    u.set_cos_coeff(k, Eigen::Map<const Vec>(a.data(), N));
    u.set_sin_coeff(k, Eigen::Map<const Vec>(b.data(), N));
  }
  return u;
}

json to_json(const Lattice& lattice) {
  json arr = json::array();
  for (const auto& p : lattice.periods) {
    if (p) arr.push_back(*p);
    else arr.push_back(nullptr);
  }
  return arr;
}

Lattice lattice_from_json(const json& j, int dim) {
  Lattice l;
  if (!j.is_array()) throw std::invalid_argument("lattice must be an array");
  for (const auto& e : j) {
    if (e.is_null()) l.periods.push_back(std::nullopt);
    else l.periods.push_back(e.get<double>());
  }
  if (static_cast<int>(l.periods.size()) != dim) {
    throw std::invalid_argument("lattice length != N");
  }
  l.validate();
  return l;
}

json to_json(const ActionReport& r) {
  return json{{"value", r.value},
              {"kinetic", r.kinetic},
              {"potential_integral", r.potential_integral},
              {"gradient", std::vector<double>(r.gradient.begin(), r.gradient.end())},
              {"grad_norm", r.grad_norm},
              {"nodes_K", r.nodes_K}};
}

json to_json(const HypothesisReport& r) {
  json w = nullptr;
  if (r.witness.x.size() > 0) {
    w = json{{"t", r.witness.t},
             {"x", std::vector<double>(r.witness.x.begin(), r.witness.x.end())}};
  }
  return json{{"condition", r.condition},
              {"checked", r.checked},
              {"passed", r.passed},
              {"worst_violation", r.worst_violation},
              {"witness", w},
              {"samples_used", r.samples_used},
              {"tolerance", r.tolerance},
              {"domain", r.domain_note},
              {"failure_code", r.failure_code},
              {"details", r.details}};
}

json to_json(const SolveConfig& c) {
  return json{{"max_iter", c.max_iter},
              {"grad_tol", c.grad_tol},
              {"memory", c.memory},
              {"armijo_c", c.armijo_c},
              {"backtrack", c.backtrack},
              {"max_line_search", c.max_line_search},
              {"descent_step", c.descent_step},
              {"ascent_step", c.ascent_step},
              {"divergence_norm", c.divergence_norm},
              {"seed", c.seed},
              {"M", c.harmonics_M},
              {"K", c.quadrature_K}};
}

json to_json(const SolveResult& r, bool include_trace) {
  json j{{"status", to_string(r.status)},
         {"converged", r.converged},
         {"f_value", r.f_value},
         {"grad_norm", r.grad_norm},
         {"iterations", r.iterations},
         {"nonconstant", r.nonconstant},
         {"harmonic_energy", r.harmonic_energy},
         {"lattice_warning", r.lattice_warning},
         {"message", r.message},
         {"config", to_json(r.config)},
         {"trajectory", to_json(r.trajectory)},
         {"cps_series", r.cps_series}};
  if (include_trace) {
    json trace = json::array();
    for (const auto& e : r.trace) {
      trace.push_back(json{{"iter", e.iter},
                           {"f", e.f},
                           {"grad_norm", e.grad_norm},
                           {"cps", e.cps},
                           {"tilde_h1", e.tilde_h1},
                           {"mean", std::vector<double>(e.mean.begin(), e.mean.end())}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

json to_json(const VerificationReport& r) {
  json j{{"residual_sup", r.residual_sup},
         {"residual_l2", r.residual_l2},
         {"periodicity_defect", r.periodicity_defect},
         {"nonconstancy", r.nonconstancy},
         {"dense_K", r.dense_K}};
  j["refinement_delta"] = r.refinement_delta ? json(*r.refinement_delta) : json("not run");
  j["oracle_gap"] = r.oracle_gap ? json(*r.oracle_gap) : json("not run");
  return j;
}

json to_json(const SaddleGeometryReport& r) {
  return json{{"sup_sphere", r.sup_sphere},
              {"inf_x2_samples", r.inf_x2_samples},
              {"geometry_ok", r.geometry_ok},
              {"threshold_checked", r.threshold_checked},
              {"t_below_threshold", r.t_below_threshold},
              {"t_threshold", r.t_threshold},
              {"sphere_R", r.sphere_R},
              {"samples_used", r.samples_used}};
}

json to_json(const SequenceDiagnostic& d) {
  auto check = [](const DiagnosticCheck& c) {
    return json{{"checked", c.checked}, {"passed", c.passed}, {"detail", c.detail}};
  };
  return json{{"tilde_norm_bounded", check(d.tilde_norm_bounded)},
              {"means_in_cell", check(d.means_in_cell)},
              {"cps_trend", check(d.cps_trend)},
              {"all_passed", d.all_passed()}};
}

json to_json(const PropertySuiteReport& r) {
  json failures = json::array();
  for (const auto& f : r.failure_records) {
    failures.push_back(json{{"trial", f.trial},
                            {"check", f.check},
                            {"trajectory", json::parse(f.trajectory_json)}});
  }
  return json{{"trials", r.trials},
              {"seed", r.seed},
              {"all_passed", r.all_passed},
              {"failures", r.failures},
              {"pw_min_slack_rel", r.pw_min_slack_rel},
              {"sobolev_worst_margin_rel", r.sobolev_worst_margin_rel},
              {"equality_worst_defect", r.equality_worst_defect},
              {"roundtrip_worst", r.roundtrip_worst},
              {"grad_fd_worst", r.grad_fd_worst},
              {"translation_checked", r.translation_checked},
              {"translation_worst", r.translation_worst},
              {"failure_records", failures}};
}

void write_trajectory_csv(std::ostream& out, const FourierTrajectory& u, int samples) {
  out << "t";
  for (int i = 1; i <= u.dim(); ++i) out << ",u_" << i;
  for (int i = 1; i <= u.dim(); ++i) out << ",du_" << i;
  out << "\n";
  out << std::setprecision(17);
  for (int j = 0; j <= samples; ++j) {
    const double t = u.period() * j / samples;
    const Vec x = u.evaluate(t, 0);
    const Vec v = u.evaluate(t, 1);
    out << t;
    for (int i = 0; i < u.dim(); ++i) out << "," << x[i];
    for (int i = 0; i < u.dim(); ++i) out << "," << v[i];
    out << "\n";
  }
}

void write_trace_csv(std::ostream& out, const SolveResult& r) {
  out << "iter,f,grad_norm,cps\n";
  out << std::setprecision(17);
  for (const auto& e : r.trace) {
    out << e.iter << "," << e.f << "," << e.grad_norm << "," << e.cps << "\n";
  }
}

}  // namespace actionforge
