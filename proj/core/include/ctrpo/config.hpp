#pragma once

#include <cstdint>
#include <string>

#include "ctrpo/env.hpp"
#include "ctrpo/optimizers.hpp"

namespace ctrpo {

enum class Algorithm { Cpo, Trpo, TrpoRp };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct BcCfg {
    int num_demos = 25;
    double lr = 0.001;
    int epochs = 5000;  // full-batch gradient steps
};

struct ValueFitCfg {
    double lr = 0.001;
    int epochs = 15;      // full-batch gradient steps per training iteration
    int max_batch = 1024;  // larger batches are stride-subsampled for the fit
};

struct TrainingCfg {
    int iterations = 200;
    int episodes_per_iteration = 20;
    std::uint64_t seed = 1;
    int rollout_workers = 1;
};

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::Cpo;
    ConstraintCfg constraint;
    double gamma = 0.995;
    double gamma_c = 0.995;
    double gae_lambda = 0.97;
    BcCfg bc;
    ValueFitCfg value_fit;
    TrainingCfg training;
    TrustRegionCfg trust_region;
    EnvParams env;

    void validate() const;
};

/// Parse "key = value" lines ('#' starts a comment). Every key must be one
/// the schema knows; unknown keys are an error. Omitted keys keep their
/// defaults.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Full round-trippable rendering (every key, current values).
std::string config_to_text(const ExperimentConfig& cfg);
void save_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace ctrpo
