#pragma once

#include <string>

#include "signglm/simulate.hpp"

namespace signglm::cli {

// Experiment config from a JSON object or a flat key=value file (detected by
// the first non-space character). Keys: model, rho_grid, p_grid, s_grid, n,
// reps, seed, cv_folds, cv_grid_size, standardize, t_param. Unknown keys are
// rejected.
ExperimentConfig parse_experiment_config(const std::string& path);

}  // namespace signglm::cli
