#include "way/rng.hpp"

#include <cmath>

namespace way {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gauss_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    cached_gauss_ = r * std::sin(th);
    has_cached_ = true;
    return r * std::cos(th);
}

Rng Rng::substream(std::uint64_t index) const {
    std::uint64_t mix = seed_ ^ (0x9e3779b97f4a7c15ULL + index * 0xd1342543de82ef95ULL);
    return Rng(splitmix64(mix));
}

StateVector random_state(Rng& rng, int dim) {
    StateVector psi(dim);
    for (int i = 0; i < dim; ++i) psi[i] = cplx(rng.gaussian(), rng.gaussian());
    psi.normalize();
    return psi;
}

Operator random_hermitian(Rng& rng, int dim, double scale) {
    Operator A(dim);
    for (int i = 0; i < dim; ++i) {
        A.at(i, i) = scale * rng.gaussian();
        for (int j = i + 1; j < dim; ++j) {
            const cplx v(scale * rng.gaussian(), scale * rng.gaussian());
            A.at(i, j) = v;
            A.at(j, i) = std::conj(v);
        }
    }
    return A;
}

}  // namespace way
