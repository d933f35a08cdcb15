#pragma once

#include <string>

#include <json.hpp>

#include "problem.hpp"
#include "salvage/adversary.hpp"
#include "salvage/dominance.hpp"
#include "salvage/link.hpp"

namespace salvage::cli {

using Json = nlohmann::ordered_json;

Json to_json(const QuadratureResult& r);
Json to_json(const IntervalSet& s);
Json to_json(const SignPartition& part);
Json to_json(const LinkFn& link);
Json to_json(const ConditionReport& rep);
Json to_json(const Prop1Check& p);
Json to_json(const AdversaryResult& r);
/// `bins_detail` adds the full per-bin table.
Json to_json(const DominanceReport& rep, bool bins_detail = false);
Json problem_json(const ProblemSpec& spec);

/// x, omega, omega_tilde, g_prime at `points` uniform points over the
/// problem domain. omega_tilde is left blank when `omega_tilde` is null.
void write_samples_csv(const std::string& path, const ProblemSpec& spec, const PiecewiseWeight* omega_tilde,
                       std::size_t points = 2048);

/// bin_lo, bin_hi, mu_minus, mu_plus, leb_plus, omega_tilde_value, violated
void write_bins_csv(const std::string& path, const DominanceReport& rep);

}  // namespace salvage::cli
