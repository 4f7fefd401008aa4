#pragma once

#include <string>
#include <vector>

#include "sicreg/inference.hpp"
#include "sicreg/simlab.hpp"

namespace sicreg {

// Coefficient table in the two-component layout: estimate, (se) and
// delta-BIC per component, blank where a predictor is inactive.
std::string render_fit_table(const FitResult& fit,
                             const std::vector<std::string>& predictor_names);

// One row per (step, eps, component, predictor, standardized value);
// intercepts excluded.
std::string render_path_csv(const FitTrace& trace,
                            const std::vector<std::string>& predictor_names);

// Aligned-table report of a Monte-Carlo study (includes timing).
std::string render_study_text(const StudyReport& report);

// Machine-readable twin: n,method,component,coefficient,metric,value.
// Deterministic for a fixed seed (timing excluded).
std::string render_study_csv(const StudyReport& report);

std::string render_coverage(const CoverageReport& rep);

}  // namespace sicreg
