#include "way/config.hpp"

#include <map>

namespace way {

Config& config() {
    static Config cfg;
    return cfg;
}

bool set_tolerance(Config& cfg, const std::string& key, double value) {
    static const std::map<std::string, double Tolerances::*> table = {
        {"hermitian", &Tolerances::hermitian},
        {"hermitian_input", &Tolerances::hermitian_input},
        {"state_norm", &Tolerances::state_norm},
        {"density", &Tolerances::density},
        {"unitary", &Tolerances::unitary},
        {"povm_complete", &Tolerances::povm_complete},
        {"effect_psd", &Tolerances::effect_psd},
        {"probability", &Tolerances::probability},
        {"zero_probability", &Tolerances::zero_probability},
        {"eig_merge", &Tolerances::eig_merge},
        {"variance_clamp", &Tolerances::variance_clamp},
        {"wigner_residual", &Tolerances::wigner_residual},
        {"lattice", &Tolerances::lattice},
        {"admissible_mass", &Tolerances::admissible_mass},
        {"slack", &Tolerances::slack},
        {"denom_floor", &Tolerances::denom_floor},
    };
    auto it = table.find(key);
    if (it == table.end()) return false;
    cfg.tol.*(it->second) = value;
    return true;
}

}  // namespace way
