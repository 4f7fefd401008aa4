#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sicreg/param_vector.hpp"

namespace sicreg {

// One simulated predictor column.
struct CovariateSpec {
    enum class Kind { exponential, bernoulli, std_normal, mvn_group };
    Kind kind = Kind::std_normal;
    double param = 0.0;  // rate (exponential) or success probability (bernoulli)
    int group = 0;       // mvn_group id; members correlate as base^|pos_j - pos_k|
};

// Generative truth and study layout for a Monte-Carlo run.
struct Scenario {
    std::string name;
    std::vector<CovariateSpec> covariates;  // length p
    double mvn_corr_base = 0.8;
    ParamVector truth;  // beta_true / alpha_true, length p+1
    std::vector<long> sample_sizes;
    int replicates = 1;
    double test_fraction = 0.2;
    uint64_t seed = 1;

    int p() const { return static_cast<int>(covariates.size()); }
    void validate() const;
};

// Parses the flat key-value scenario format, e.g.
//
//   name = benchmark
//   covariates = exp(1) mvn(1) bern(0.75) norm
//   beta  = 0 1 0.5 0.5 1
//   alpha = 0 0.5 1 0.5 1
//   n = 100 500 1000
//   replicates = 300
//   test_fraction = 0.2
//   seed = 1
//
// Lines starting with '#' are comments. Throws InputError on malformed input.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace sicreg
