#pragma once

#include <cstdint>
#include <vector>

#include "way/matrix.hpp"

namespace way {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// reproducible across platforms and standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);
    double gaussian();                      // standard normal (Box-Muller)
    // Derive an independent stream for a row/substream index.
    Rng substream(std::uint64_t index) const;

  private:
    std::uint64_t s_[4];
    double cached_gauss_ = 0.0;
    bool has_cached_ = false;
    std::uint64_t seed_;
};

// Haar-like random unit vector: normalized vector of iid complex Gaussians.
StateVector random_state(Rng& rng, int dim);
Operator random_hermitian(Rng& rng, int dim, double scale = 1.0);

}  // namespace way
