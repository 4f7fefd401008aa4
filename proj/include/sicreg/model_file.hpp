#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sicreg/inference.hpp"

namespace sicreg {

// Self-describing JSON persistence of a fitted model. Save -> load -> save is
// byte-identical; unknown schema versions fail loudly.
struct ModelFile {
    static constexpr const char* kSchemaVersion = "sicreg.model/1";

    std::string response;
    std::vector<std::string> predictors;
    bool standardized = true;
    bool spr = false;
    std::vector<double> scaling_sd;  // length p (ones when not standardized)
    std::vector<double> beta;        // original scale, zeros explicit, length p+1
    std::vector<double> alpha;
    std::vector<int> active_beta;
    std::vector<int> active_alpha;
    std::vector<double> se_beta;  // aligned with active indices
    std::vector<double> se_alpha;
    double bic = 0.0;
    std::vector<std::pair<int, double>> delta_bic_beta;
    std::vector<std::pair<int, double>> delta_bic_alpha;
    double eps_start = 10.0;
    double eps_end = 1e-5;
    int steps = 100;
    double tol = 1e-8;
    double zero_tol = 1e-8;
    std::string train_fingerprint;  // fnv1a-64 of the training file bytes

    ParamVector coefficients() const;
};

ModelFile make_model_file(const FitResult& fit, const std::string& response,
                          const std::vector<std::string>& predictors,
                          const TelescopeSchedule& schedule, const SolverConfig& cfg, bool spr,
                          const std::string& train_fingerprint);

std::string to_json(const ModelFile& m);
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& m, const std::string& path);
ModelFile load_model(const std::string& path);

// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string fingerprint(std::string_view bytes);

}  // namespace sicreg
