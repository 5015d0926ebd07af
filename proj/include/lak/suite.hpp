#pragma once

// The six shipped subjects, their sample generators, and subjects built from
// structure configs.

#include <cstddef>
#include <string>
#include <vector>

#include "lak/compliance.hpp"
#include "lak/config.hpp"

namespace lak::suite {

// Sample generators. Lengths are uniform in [1, max_len].
Sampler binary_sampler(std::size_t max_len = 8);
/// Session records with minutes, day (advancing by 0, 1 or 2), task t1..t4 and done flag.
Sampler session_sampler(std::size_t max_len = 8);
/// 0/1 activity at a per-sequence propensity; records over `channels` when non-empty.
Sampler activity_sampler(std::size_t max_len = 8, std::vector<std::string> channels = {});

bkt::BktParams builtin_bkt_params();
dashboard::DashboardConfig builtin_dashboard_config();
/// Briefly trained on a fixed dropout corpus; identical on every call.
predictive::PredictiveModel builtin_predictive_model();

/// Builtin subjects in table order: bkt, dashboard, predictive, ex1_rate, ex2_last, ex3_smooth.
std::vector<Subject> builtin_subjects();
/// Throws SchemaError for an unknown name.
Subject builtin_subject(const std::string& name);

std::vector<ComplianceReport> run_builtin_suite(const ReportConfig& config);

/// Subject for a config. Structures run under the config's gap policy; canonical
/// subjects wrap the inner subject's function and reuse its sampler.
Subject instantiate(const StructureConfig& config);

}  // namespace lak::suite
