#include "way/pattern_search.hpp"
#include <cmath>

#include "way/rng.hpp"

namespace way {

PatternSearchResult pattern_search(const Objective& f, std::vector<double> x,
                                   const PatternSearchOptions& opt) {
    PatternSearchResult res;
    const std::size_t n = x.size();
    std::vector<double> steps(n, opt.initial_step);
    double fx = f(x);
    int sweeps = 0;
    for (; sweeps < opt.max_sweeps; ++sweeps) {
        const double f_before = fx;
        bool any_move = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (const double dir : {+1.0, -1.0}) {
                const double saved = x[i];
                x[i] = saved + dir * steps[i];
                const double ft = f(x);
                if (ft < fx) {
                    fx = ft;
                    any_move = true;
                    // greedy: keep marching in the improving direction,
                    // bounded so penalty plateaus cannot stall the sweep
                    for (int step = 0; step < 32; ++step) {
                        const double prev = x[i];
                        x[i] = prev + dir * steps[i];
                        const double f2 = f(x);
                        if (f2 < fx - 1e-15 * (1.0 + std::abs(fx))) {
                            fx = f2;
                        } else {
                            x[i] = prev;
                            break;
                        }
                    }
                    break;
                }
                x[i] = saved;
            }
        }
        if (!any_move) {
            bool all_small = true;
            for (auto& s : steps) {
                s *= opt.shrink;
                if (s > opt.step_tol) all_small = false;
            }
            if (all_small) {
                res.converged = true;
                break;
            }
        } else if (f_before - fx < opt.improve_tol) {
            bool all_small = true;
            for (auto& s : steps) {
                s *= opt.shrink;
                if (s > opt.step_tol) all_small = false;
            }
            if (all_small) {
                res.converged = true;
                break;
            }
        }
    }
    res.x = std::move(x);
    res.value = fx;
    res.sweeps = sweeps;
    return res;
}

PatternSearchResult pattern_search_multistart(const Objective& f,
                                              const std::vector<double>& x0,
                                              const PatternSearchOptions& opt) {
    Rng rng(opt.seed);
    PatternSearchResult best;
    bool have = false;
    for (int s = 0; s < opt.multistarts; ++s) {
        std::vector<double> start = x0;
        if (s > 0) {
            for (auto& v : start)
                v += rng.uniform(-opt.start_radius, opt.start_radius);
        }
        PatternSearchResult r = pattern_search(f, std::move(start), opt);
        r.best_start = s;
        if (!have || r.value < best.value) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

}  // namespace way
