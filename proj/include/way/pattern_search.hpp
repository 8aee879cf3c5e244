#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace way {

// Derivative-free coordinate pattern search with multistart. Deterministic
// for a fixed seed: starts are evaluated in order and ties break toward the
// lower start index.
struct PatternSearchOptions {
    double initial_step = 0.25;
    double shrink = 0.5;
    double step_tol = 1e-10;
    double improve_tol = 1e-10;  // convergence when a full sweep improves less
    int max_sweeps = 400;
    int multistarts = 16;
    double start_radius = 1.0;   // uniform box around x0 for extra starts
    std::uint64_t seed = 42;
};

struct PatternSearchResult {
    std::vector<double> x;
    double value = 0.0;
    int sweeps = 0;
    int best_start = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

PatternSearchResult pattern_search(const Objective& f, std::vector<double> x0,
                                   const PatternSearchOptions& opt = {});

PatternSearchResult pattern_search_multistart(const Objective& f,
                                              const std::vector<double>& x0,
                                              const PatternSearchOptions& opt = {});

}  // namespace way
