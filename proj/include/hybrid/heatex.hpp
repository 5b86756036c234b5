#pragma once

#include <cmath>
#include <string>

#include "hybrid/errors.hpp"
#include "hybrid/physcore.hpp"

namespace hybrid {

struct HeatingReference {
    std::string label;
    Particle species;
    double distance_d = 0.0;   // m
    double frequency_f = 0.0;  // Hz
    double rate = 0.0;         // quanta/s
    double temperature = 0.0;  // K
    std::string material;
    std::string citation;

    void validate() const {
        require(distance_d > 0.0 && frequency_f > 0.0 && rate > 0.0 && temperature > 0.0,
                "heating reference '" + label + "': d, f, rate, T must be positive");
        require(species.mass > 0.0 && species.charge != 0.0,
                "heating reference '" + label + "': species needs charge and mass");
    }
};

// n_dot scales as (q^2 / m) / (d^4 f^(1 + alpha)).
inline double extrapolate(const HeatingReference& ref, const Particle& target, double target_d, double target_f,
                          double alpha_exp) {
    ref.validate();
    require(alpha_exp >= 0.5 && alpha_exp <= 2.0, "extrapolate: alpha must be in [0.5, 2]");
    require(target_d > 0.0 && target_f > 0.0, "extrapolate: target d and f must be positive");
    require(target.mass > 0.0, "extrapolate: target mass must be positive");
    const double charge_mass = (target.charge * target.charge / target.mass) /
                               (ref.species.charge * ref.species.charge / ref.species.mass);
    return ref.rate * charge_mass * std::pow(ref.distance_d / target_d, 4) *
           std::pow(ref.frequency_f / target_f, 1.0 + alpha_exp);
}

// Re-anchors a reference at a new particle, distance and frequency, so chains of extrapolations compose.
inline HeatingReference rebase(const HeatingReference& ref, const Particle& target, double target_d, double target_f,
                               double alpha_exp) {
    HeatingReference out = ref;
    out.label = ref.label + "->" + target.name;
    out.rate = extrapolate(ref, target, target_d, target_f, alpha_exp);
    out.species = target;
    out.distance_d = target_d;
    out.frequency_f = target_f;
    return out;
}

}  // namespace hybrid
