#include "problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "salvage/error.hpp"

namespace salvage::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

double bound(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf") return -kInf;
    if (s == "inf" || s == "+inf") return kInf;
  }
  fail(path, "expected a number, \"-inf\" or \"inf\"");
}

Interval interval_field(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [lo, hi]");
  const double lo = bound(v[0], path + "[0]");
  const double hi = bound(v[1], path + "[1]");
  if (!(lo < hi)) fail(path, "empty interval");
  return Interval{lo, hi, std::isfinite(lo), std::isfinite(hi)};
}

RealFn function_field(const json& v, const std::string& path, const ParamMap& params, const Interval& domain) {
  try {
    if (v.is_string()) return parse(v.get<std::string>(), params, domain);
    if (v.is_number()) return RealFn::single(Expr::number(v.get<double>()), domain);
    if (v.is_array()) {
      std::vector<PieceText> pieces;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& piece = v[i];
        if (!piece.is_object() || !piece.contains("interval") || !piece.contains("expr"))
          fail(p, "expected {\"interval\": [lo, hi], \"expr\": \"...\"}");
        const Interval iv = interval_field(piece["interval"], p + ".interval");
        if (!piece["expr"].is_string()) fail(p + ".expr", "expected a string");
        pieces.push_back({iv.lo, iv.hi, piece["expr"].get<std::string>()});
      }
      if (pieces.empty()) fail(path, "empty piece list");
      return parse_piecewise(pieces, params);
    }
  } catch (const ParseError& e) {
    fail(path, e.what());
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  }
  fail(path, "expected an expression string or a list of pieces");
}

std::size_t positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) fail(path, "expected a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

double positive_real(const json& v, const std::string& path) {
  if (!v.is_number() || !(v.get<double>() > 0.0)) fail(path, "expected a positive number");
  return v.get<double>();
}

bool covers(const RealFn& f, const Interval& domain) {
  return IntervalSet(domain).subtract(f.domain()).measure() == 0.0;
}

}  // namespace

Interval truncation_window(const RealFn& omega, const Interval& declared) {
  if (declared.finite()) return declared;
  auto envelope = [&](double x) {
    try {
      return std::fabs(omega(x));
    } catch (const EvalError&) {
      return 0.0;
    }
  };
  auto window = [&](double r) {
    return Interval{std::isfinite(declared.lo) ? declared.lo : -r, std::isfinite(declared.hi) ? declared.hi : r,
                    declared.lo_closed || !std::isfinite(declared.lo), declared.hi_closed || !std::isfinite(declared.hi)};
  };
  double r = 10.0;
  for (; r < 1e6; r *= 2.0) {
    const Interval w = window(r);
    double peak = 0.0;
    for (double x : sample_grid(IntervalSet(w), 4096)) peak = std::max(peak, envelope(x));
    double tail = 0.0;
    if (!std::isfinite(declared.lo)) tail = std::max(tail, envelope(w.lo));
    if (!std::isfinite(declared.hi)) tail = std::max(tail, envelope(w.hi));
    if (tail <= 1e-18 * peak) break;
  }
  return window(r);
}

ProblemSpec parse_problem(const json& doc, std::string name) {
  const std::string root = "problem";
  if (!doc.is_object()) fail(root, "expected a JSON object");
  ProblemSpec spec;
  spec.name = std::move(name);

  if (doc.contains("params")) {
    const json& p = doc["params"];
    if (!p.is_object()) fail(root + ".params", "expected an object of name: number");
    for (const auto& [k, v] : p.items()) {
      if (!v.is_number()) fail(root + ".params." + k, "expected a number");
      spec.params[k] = v.get<double>();
    }
  }

  if (!doc.contains("domain")) fail(root + ".domain", "missing");
  spec.declared_domain = interval_field(doc["domain"], root + ".domain");

  if (!doc.contains("omega")) fail(root + ".omega", "missing");
  const RealFn omega_full = function_field(doc["omega"], root + ".omega", spec.params, spec.declared_domain);
  if (!covers(omega_full, spec.declared_domain)) fail(root + ".omega", "does not cover the domain");

  spec.domain = truncation_window(omega_full, spec.declared_domain);
  spec.truncated = !spec.declared_domain.finite();
  const IntervalSet X(spec.domain);
  spec.omega = omega_full.restricted_to(X);

  const bool has_gp = doc.contains("g_prime");
  const bool has_g = doc.contains("g");
  if (!has_gp && !has_g) fail(root, "one of g_prime or g is required");
  if (has_gp) {
    spec.g_prime = function_field(doc["g_prime"], root + ".g_prime", spec.params, spec.declared_domain).restricted_to(X);
    if (!covers(spec.g_prime, spec.domain)) fail(root + ".g_prime", "does not cover the domain");
  }
  if (has_g) {
    const RealFn g = function_field(doc["g"], root + ".g", spec.params, spec.declared_domain).restricted_to(X);
    if (!covers(g, spec.domain)) fail(root + ".g", "does not cover the domain");
    const RealFn derived = g.derivative();
    if (!has_gp) {
      spec.g_prime = derived;
    } else {
      double worst = 0.0;
      double where = 0.0;
      for (double x : sample_grid(X, 256)) {
        const double d = std::fabs(derived(x) - spec.g_prime(x));
        if (d > worst && d > 1e-6 * std::max(1.0, std::fabs(spec.g_prime(x)))) {
          worst = d;
          where = x;
        }
      }
      if (worst > 0.0)
        spec.warnings.push_back("g_prime differs from the derivative of g by " + std::to_string(worst) + " at x = " +
                                std::to_string(where) + "; using g_prime as given");
    }
  }

  if (doc.contains("link") && !doc["link"].is_null()) {
    spec.link = function_field(doc["link"], root + ".link", spec.params, spec.declared_domain).restricted_to(X);
  }
  if (doc.contains("link_branch") && !doc["link_branch"].is_null()) {
    const json& b = doc["link_branch"];
    if (!b.is_number_integer() || b.get<long long>() < 0) fail(root + ".link_branch", "expected a non-negative integer");
    spec.link_branch = static_cast<std::size_t>(b.get<long long>());
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    const std::string tp = root + ".tolerances";
    if (!t.is_object()) fail(tp, "expected an object");
    for (const auto& [k, v] : t.items()) {
      if (k == "quad_tol")
        spec.tol.quad_tol = positive_real(v, tp + ".quad_tol");
      else if (k == "a_tol")
        spec.tol.a_tol = positive_real(v, tp + ".a_tol");
      else if (k == "grid_points")
        spec.tol.grid_points = positive_int(v, tp + ".grid_points");
      else if (k == "bins")
        spec.tol.bins = positive_int(v, tp + ".bins");
      else if (k == "n_schedule") {
        if (!v.is_array() || v.empty()) fail(tp + ".n_schedule", "expected a non-empty list of bin counts");
        spec.tol.n_schedule.clear();
        for (std::size_t i = 0; i < v.size(); ++i)
          spec.tol.n_schedule.push_back(positive_int(v[i], tp + ".n_schedule[" + std::to_string(i) + "]"));
      } else {
        fail(tp + "." + k, "unknown tolerance");
      }
    }
  }

  for (const char* key : {"domain", "omega", "g_prime", "g", "link", "link_branch", "params"})
    if (doc.contains(key)) spec.source[key] = doc[key];
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open problem file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_problem(doc, path);
}

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"example1", "example2", "constant_effect", "gaussian"};
  return names;
}

bool is_gallery_name(const std::string& name) {
  const auto& n = gallery_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

json gallery_document(const std::string& name, double z) {
  if (name == "example1")
    return {{"domain", {0, 3}}, {"omega", "x - 1"}, {"g", "2*x - 3"}, {"link", "x + 2"}};
  if (name == "example2")
    return {{"domain", {0, 2}},
            {"omega", "x - 1"},
            {"g_prime",
             json::array({{{"interval", {0, 1}}, {"expr", "2 - x + 12*x^2 - 12*x^3"}},
                          {{"interval", {1, 2}}, {"expr", "x"}}})},
            {"link", "2 - x + 12*x^2 - 12*x^3"}};
  if (name == "constant_effect") return {{"domain", {0, 3}}, {"omega", "(x - 1)/1.5"}, {"g_prime", "2"}};
  if (name == "gaussian")
    return {{"domain", {"-inf", "inf"}},
            {"omega", "(1 + z*x)*phi(x)"},
            {"g_prime", "x^2"},
            {"link", "-x"},
            {"params", {{"z", z}}}};
  std::string known;
  for (const auto& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown gallery fixture '" + name + "' (known: " + known + ")");
}

ProblemSpec gallery_problem(const std::string& name, double z) { return parse_problem(gallery_document(name, z), name); }

}  // namespace salvage::cli
