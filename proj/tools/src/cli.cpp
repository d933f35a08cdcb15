#include "cli.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "problem.hpp"
#include "report.hpp"
#include "salvage/error.hpp"

namespace salvage::cli {

namespace {

struct Settings {
  std::string problem;
  std::optional<std::size_t> bins;
  std::vector<std::size_t> schedule;
  std::optional<double> quad_tol;
  std::optional<std::size_t> grid;
  std::string out_dir;
  double z = 2.0;
  double epsilon = 0.01;
  std::optional<std::size_t> branch;
  std::string bin_scheme = "mass";
};

struct Outcome {
  Json json;
  int code = kOk;
  std::optional<PiecewiseWeight> omega_tilde;
};

ProblemSpec resolve(const Settings& s) {
  ProblemSpec spec;
  if (std::filesystem::exists(s.problem) || !is_gallery_name(s.problem))
    spec = load_problem(s.problem);
  else
    spec = gallery_problem(s.problem, s.z);
  if (s.quad_tol) spec.tol.quad_tol = *s.quad_tol;
  if (s.grid) spec.tol.grid_points = *s.grid;
  if (s.bins) spec.tol.bins = *s.bins;
  if (!s.schedule.empty()) spec.tol.n_schedule = s.schedule;
  if (s.branch) spec.link_branch = s.branch;
  return spec;
}

QuadOptions quad_options(const ProblemSpec& spec) {
  QuadOptions q;
  q.abs_tol = spec.tol.quad_tol;
  return q;
}

std::string csv_path(const Settings& s, const std::string& file) {
  std::filesystem::create_directories(s.out_dir);
  return (std::filesystem::path(s.out_dir) / file).string();
}

SignPartition partition(const ProblemSpec& spec) {
  return partition_signs(spec.omega, IntervalSet(spec.domain), &spec.g_prime);
}

Outcome analyze(const ProblemSpec& spec, const SignPartition& part) {
  const QuadOptions q = quad_options(spec);
  Outcome o;
  o.json["partition"] = to_json(part);
  o.json["beta"] = to_json(beta(spec.omega, spec.g_prime, part.domain, q));
  o.json["mass"] = to_json(integrate(spec.omega, part.domain, q));
  o.json["negative_mass"] = to_json(integrate(spec.omega, part.x_minus, q));
  return o;
}

bool integral_ok(const QuadratureResult& r, double tol) {
  return std::fabs(r.value) <= std::max(tol, 3.0 * r.abs_error_estimate);
}

Outcome link_check(const ProblemSpec& spec, const SignPartition& part) {
  if (!spec.link) throw ConfigError("problem.link: required for link-check");
  LinkOptions opts;
  opts.grid_points = spec.tol.grid_points;
  opts.tol_a1 = opts.tol_a2 = opts.tol_integral = spec.tol.a_tol;
  opts.quad = quad_options(spec);
  opts.branch = spec.link_branch;
  const LinkFn link = make_link(*spec.link, part, opts);
  const ConditionReport rep = check_link(spec.omega, spec.g_prime, link, part, opts);

  Outcome o;
  o.json["link"] = to_json(link);
  o.json["conditions"] = to_json(rep);
  // The integral conditions count as failed only when the |Q'| form fails too.
  const bool a3 = rep.verdicts.a3 || integral_ok(rep.a3_abs_jacobian, opts.tol_integral);
  const bool a4 = rep.verdicts.a4 || integral_ok(rep.a4_abs_jacobian, opts.tol_integral);
  const bool ok = link.valid() && rep.verdicts.a1 && rep.verdicts.a2 && a3 && a4;
  o.json["conditions_hold"] = ok;
  if (link.valid()) {
    PiecewiseWeight wt = transform_weights_link(spec.omega, link, part);
    const Prop1Check p = verify_prop1(spec.omega, wt, spec.g_prime, part.domain, part, opts.quad);
    o.json["omega_tilde"] = {{"nonneg_certificate", wt.nonneg_certificate}};
    o.json["prop1"] = to_json(p);
    o.json["beta_original"] = p.beta_original.value;
    o.json["beta_transformed"] = p.beta_transformed.value;
    o.omega_tilde = std::move(wt);
  } else {
    o.json["omega_tilde"] = nullptr;
    o.json["prop1"] = nullptr;
  }
  o.code = ok ? kOk : kLinkFailed;
  return o;
}

Outcome salvage_run(const ProblemSpec& spec, const SignPartition& part, const Settings& s) {
  DominanceOptions opts;
  opts.quad = quad_options(spec);
  opts.tol = spec.tol.a_tol;
  if (s.bin_scheme == "width")
    opts.scheme = BinScheme::EqualWidth;
  else if (s.bin_scheme != "mass")
    throw ConfigError("--bin-scheme: expected 'mass' or 'width'");
  std::vector<std::size_t> schedule = spec.tol.n_schedule;
  if (s.bins && s.schedule.empty()) schedule = {*s.bins};
  auto reports = refine(spec.omega, spec.g_prime, part, schedule, opts);

  Outcome o;
  Json list = Json::array();
  bool all = true;
  for (auto& r : reports) {
    all = all && r.dominated;
    list.push_back(to_json(r));
    if (!s.out_dir.empty()) write_bins_csv(csv_path(s, "bins_n" + std::to_string(r.n_requested) + ".csv"), r);
  }
  o.json["bin_scheme"] = to_string(opts.scheme);
  o.json["dominated"] = all;
  o.json["reports"] = list;
  if (!reports.empty() && reports.back().omega_tilde_n) {
    o.json["beta_original"] = reports.back().beta_original.value;
    o.json["beta_transformed"] = reports.back().beta_transformed->value;
    o.omega_tilde = std::move(reports.back().omega_tilde_n);
  }
  o.code = all ? kOk : kDominanceViolated;
  return o;
}

Outcome adversary_run(const ProblemSpec& spec, const SignPartition& part, const Settings& s) {
  const QuadOptions q = quad_options(spec);
  const AdversaryResult r = find_sign_flip(spec.omega, part, s.epsilon, q);
  Outcome o;
  o.json = to_json(r);
  if (const auto* sf = std::get_if<SignFlip>(&r)) {
    DominanceOptions opts;
    opts.quad = q;
    opts.tol = spec.tol.a_tol;
    const SignPartition p2 = partition_signs(spec.omega, part.domain, &sf->g_prime);
    const auto reps = refine(spec.omega, sf->g_prime, p2, {spec.tol.bins}, opts);
    o.json["dominance_check"] = {{"n", spec.tol.bins},
                                 {"dominated", reps.front().dominated},
                                 {"violated_bin_count", reps.front().violated_bins.size()}};
  }
  return o;
}

Json header(const std::string& command, const ProblemSpec& spec) {
  Json j;
  j["command"] = command;
  j["problem"] = problem_json(spec);
  j["warnings"] = spec.warnings;
  return j;
}

void merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

int dispatch(const std::string& command, const Settings& s, std::ostream& out) {
  const ProblemSpec spec = resolve(s);
  const SignPartition part = partition(spec);
  Json j = header(command, spec);
  int code = kOk;
  const PiecewiseWeight* sample_weight = nullptr;
  Outcome a;
  Outcome l;
  Outcome d;

  if (command == "analyze") {
    a = analyze(spec, part);
    merge(j, a.json);
  } else if (command == "link-check") {
    l = link_check(spec, part);
    merge(j, l.json);
    code = l.code;
    if (l.omega_tilde) sample_weight = &*l.omega_tilde;
  } else if (command == "salvage") {
    d = salvage_run(spec, part, s);
    merge(j, d.json);
    code = d.code;
    if (d.omega_tilde) sample_weight = &*d.omega_tilde;
  } else if (command == "adversary") {
    j["adversary"] = adversary_run(spec, part, s).json;
  } else {
    a = analyze(spec, part);
    j["analyze"] = a.json;
    if (spec.link) {
      l = link_check(spec, part);
      j["link_check"] = l.json;
      if (l.json.contains("prop1") && !l.json["prop1"].is_null()) {
        j["beta_original"] = l.json["beta_original"];
        j["beta_transformed"] = l.json["beta_transformed"];
      }
    } else {
      j["link_check"] = nullptr;
    }
    d = salvage_run(spec, part, s);
    j["salvage"] = d.json;
    if (!j.contains("beta_transformed") && d.json.contains("beta_transformed")) {
      j["beta_original"] = d.json["beta_original"];
      j["beta_transformed"] = d.json["beta_transformed"];
    }
    j["adversary"] = adversary_run(spec, part, s).json;
    code = l.code != kOk ? l.code : d.code;
    if (d.omega_tilde) sample_weight = &*d.omega_tilde;
    if (!s.out_dir.empty() && l.omega_tilde) write_samples_csv(csv_path(s, "samples_link.csv"), spec, &*l.omega_tilde);
  }
  j["exit_code"] = code;
  if (!s.out_dir.empty()) write_samples_csv(csv_path(s, "samples.csv"), spec, sample_weight);
  out << j.dump(2) << '\n';
  return code;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v <= 0) throw ConfigError("--schedule: '" + item + "' is not a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("--schedule: empty");
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted-average estimand diagnostics: sign partition, link conditions, measure dominance"};
  app.name("salvage-tool");
  app.require_subcommand(1);

  Settings s;
  std::string schedule_text;
  auto common = [&](CLI::App* sub, bool needs_problem) {
    if (needs_problem) sub->add_option("--problem", s.problem, "Problem JSON file or gallery name")->required();
    sub->add_option("--bins", s.bins, "Bin count (salvage: run only this n)");
    sub->add_option("--schedule", schedule_text, "Comma-separated bin counts, e.g. 64,128,256");
    sub->add_option("--quad-tol", s.quad_tol, "Absolute quadrature tolerance");
    sub->add_option("--grid", s.grid, "Grid points for pointwise link checks");
    sub->add_option("--out", s.out_dir, "Directory for CSV output");
    sub->add_option("--z", s.z, "Gaussian fixture parameter");
    sub->add_option("--epsilon", s.epsilon, "Adversary floor for g'");
    sub->add_option("--branch", s.branch, "Monotone branch of a non-injective link (0-based)");
    sub->add_option("--bin-scheme", s.bin_scheme, "Bin placement: mass (default) or width");
  };
  common(app.add_subcommand("analyze", "Sign partition, beta and mass"), true);
  common(app.add_subcommand("link-check", "Link conditions, transformed weights, residuals"), true);
  common(app.add_subcommand("salvage", "Measure dominance and binned transformed weights"), true);
  common(app.add_subcommand("adversary", "Positive g' that makes beta negative"), true);
  CLI::App* gallery = app.add_subcommand("gallery", "Run the full pipeline on a named fixture");
  gallery->add_option("name", s.problem, "example1, example2, constant_effect or gaussian")->required();
  common(gallery, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (!schedule_text.empty()) s.schedule = parse_schedule(schedule_text);
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "gallery" && !is_gallery_name(s.problem)) gallery_document(s.problem);  // throws with the list
    return dispatch(command, s, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const EvalError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const LinkError& e) {
    err << "error: " << e.what() << '\n';
    return kLinkFailed;
  } catch (const DominanceError& e) {
    err << "error: " << e.what() << '\n';
    return kDominanceViolated;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace salvage::cli
