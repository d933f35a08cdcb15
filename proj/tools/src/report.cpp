#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "salvage/error.hpp"

namespace salvage::cli {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// JSON has no infinities; encode them the way problem files do.
Json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path + ": cannot write");
  return out;
}

}  // namespace

Json to_json(const QuadratureResult& r) { return Json{{"value", real(r.value)}, {"error", real(r.abs_error_estimate)}}; }

Json to_json(const IntervalSet& s) { return s.str(); }

Json to_json(const SignPartition& part) {
  return Json{{"domain", to_json(part.domain)},
              {"x_minus", to_json(part.x_minus)},
              {"x_plus", to_json(part.x_plus)},
              {"x_plus_matched", to_json(part.x_plus_matched)},
              {"measure_minus", part.x_minus.measure()},
              {"measure_plus", part.x_plus.measure()}};
}

Json to_json(const LinkFn& link) {
  Json segs = Json::array();
  for (const auto& s : link.segments)
    segs.push_back({{"interval", s.interval.str()},
                    {"direction", to_string(s.direction)},
                    {"value_lo", real(s.value_lo)},
                    {"value_hi", real(s.value_hi)}});
  return Json{{"domain", to_json(link.domain)}, {"segments", segs}, {"image", to_json(link.image)}, {"valid", link.valid()}};
}

Json to_json(const ConditionReport& rep) {
  Json issues = Json::array();
  for (const auto& i : rep.issues) {
    Json w = Json::array();
    for (double x : i.witness) w.push_back(real(x));
    issues.push_back({{"kind", to_string(i.kind)}, {"fatal", i.fatal()}, {"message", i.message}, {"witness", w}});
  }
  return Json{{"a1_sup_residual", real(rep.a1_sup_residual)},
              {"a2_min", real(rep.a2_min)},
              {"a2_argmin", real(rep.a2_argmin)},
              {"a3_integral", real(rep.a3_integral.value)},
              {"a3_error", real(rep.a3_integral.abs_error_estimate)},
              {"a4_integral", real(rep.a4_integral.value)},
              {"a4_error", real(rep.a4_integral.abs_error_estimate)},
              {"a3_abs_jacobian", real(rep.a3_abs_jacobian.value)},
              {"a4_abs_jacobian", real(rep.a4_abs_jacobian.value)},
              {"verdicts",
               {{"a1", rep.verdicts.a1}, {"a2", rep.verdicts.a2}, {"a3", rep.verdicts.a3}, {"a4", rep.verdicts.a4}}},
              {"skipped_points", rep.skipped_points},
              {"link_valid", rep.link_valid()},
              {"issues", issues}};
}

Json to_json(const Prop1Check& p) {
  return Json{{"beta_original", real(p.beta_original.value)},
              {"beta_transformed", real(p.beta_transformed.value)},
              {"mass_original", real(p.mass_original.value)},
              {"mass_transformed", real(p.mass_transformed.value)},
              {"resid_stmt1", real(p.resid_stmt1)},
              {"resid_stmt2", real(p.resid_stmt2)}};
}

Json to_json(const AdversaryResult& r) {
  if (const auto* inf = std::get_if<Infeasible>(&r))
    return Json{{"result", "infeasible"}, {"reason", inf->reason}, {"beta_lower_bound", real(inf->beta_lower_bound)}};
  const auto& sf = std::get<SignFlip>(r);
  return Json{{"result", "sign_flip"},
              {"center", sf.bump.center},
              {"half_width", sf.bump.half_width},
              {"epsilon", sf.bump.epsilon},
              {"amplitude", sf.bump.amplitude},
              {"achieved_beta", real(sf.achieved_beta)},
              {"grid_min", real(sf.grid_min)},
              {"g_prime", sf.g_prime.str()}};
}

Json to_json(const DominanceReport& rep, bool bins_detail) {
  Json j;
  j["n"] = rep.n_requested;
  j["bin_count"] = rep.bins.count();
  j["constant_g_prime"] = rep.bins.constant;
  j["dominated"] = rep.dominated;
  j["violated_bins"] = rep.violated_bins;
  Json viol = Json::array();
  for (std::size_t k : rep.violated_bins) {
    const auto& m = rep.measures[k];
    viol.push_back({{"bin", k},
                    {"bin_lo", rep.bins.edges[k]},
                    {"bin_hi", rep.bins.edges[std::min(k + 1, rep.bins.edges.size() - 1)]},
                    {"mu_minus", m.mu_minus},
                    {"mu_plus", m.mu_plus}});
  }
  j["violations"] = viol;
  j["matched_set"] = to_json(rep.matched_set);
  j["beta_original"] = to_json(rep.beta_original);
  j["mass_original"] = to_json(rep.mass_original);
  j["beta_transformed"] = rep.beta_transformed ? to_json(*rep.beta_transformed) : Json(nullptr);
  j["mass_transformed"] = rep.mass_transformed ? to_json(*rep.mass_transformed) : Json(nullptr);
  j["preservation_residual"] = rep.preservation_residual ? real(*rep.preservation_residual) : Json(nullptr);
  j["mass_residual"] = rep.mass_residual ? real(*rep.mass_residual) : Json(nullptr);
  j["nonneg_certificate"] = rep.omega_tilde_n ? real(rep.omega_tilde_n->nonneg_certificate) : Json(nullptr);
  if (bins_detail) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < rep.measures.size(); ++k) {
      const auto& m = rep.measures[k];
      const Interval b = rep.bins.bin(k);
      rows.push_back({{"bin_lo", b.lo},
                      {"bin_hi", b.hi},
                      {"mu_minus", m.mu_minus},
                      {"mu_plus", m.mu_plus},
                      {"leb_plus", m.leb_plus},
                      {"omega_tilde_value", k < rep.bin_weight.size() && rep.bin_weight[k] ? Json(*rep.bin_weight[k])
                                                                                            : Json(nullptr)}});
    }
    j["bins"] = rows;
  }
  return j;
}

Json problem_json(const ProblemSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["declared_domain"] = spec.declared_domain.str();
  j["domain"] = spec.domain.str();
  j["truncated"] = spec.truncated;
  j["omega"] = spec.omega.str();
  j["g_prime"] = spec.g_prime.str();
  j["link"] = spec.link ? Json(spec.link->str()) : Json(nullptr);
  Json params = Json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  j["params"] = params;
  return j;
}

void write_samples_csv(const std::string& path, const ProblemSpec& spec, const PiecewiseWeight* omega_tilde,
                       std::size_t points) {
  auto out = open_csv(path);
  out << "x,omega,omega_tilde,g_prime\n";
  const Interval& d = spec.domain;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = points == 1 ? d.mid() : d.lo + (d.hi - d.lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    if (!spec.omega.contains(x)) continue;
    out << num(x) << ',' << num(spec.omega(x)) << ',';
    if (omega_tilde) out << num((*omega_tilde)(x));
    out << ',' << num(spec.g_prime(x)) << '\n';
  }
}

void write_bins_csv(const std::string& path, const DominanceReport& rep) {
  auto out = open_csv(path);
  out << "bin_lo,bin_hi,mu_minus,mu_plus,leb_plus,omega_tilde_value,violated\n";
  for (std::size_t k = 0; k < rep.measures.size(); ++k) {
    const auto& m = rep.measures[k];
    const Interval b = rep.bins.bin(k);
    const bool violated = std::binary_search(rep.violated_bins.begin(), rep.violated_bins.end(), k);
    out << num(b.lo) << ',' << num(b.hi) << ',' << num(m.mu_minus) << ',' << num(m.mu_plus) << ',' << num(m.leb_plus)
        << ',';
    if (k < rep.bin_weight.size() && rep.bin_weight[k]) out << num(*rep.bin_weight[k]);
    out << ',' << (violated ? 1 : 0) << '\n';
  }
}

}  // namespace salvage::cli
