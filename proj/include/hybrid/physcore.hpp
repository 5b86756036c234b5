#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "hybrid/constants.hpp"
#include "hybrid/errors.hpp"

namespace hybrid {

struct Particle {
    std::string name;
    double charge = 0.0;  // C
    double mass = 0.0;    // kg

    bool operator==(const Particle&) const = default;
};

struct Environment {
    double temperature = 4.0;  // K
};

inline Particle make_particle(std::string name, double charge, double mass) {
    require(mass > 0.0, "particle '" + name + "': mass must be positive");
    require(std::abs(charge) > 0.0, "particle '" + name + "': charge must be nonzero");
    return Particle{std::move(name), charge, mass};
}

// Species catalog. Ions use the paper's A * m_p mass convention.
class ParticleCatalog {
public:
    ParticleCatalog() {
        using namespace constants;
        add(make_particle("electron", -elementary_charge, electron_mass));
        add(make_particle("9Be+", elementary_charge, 9.0 * proton_mass));
        add(make_particle("24Mg+", elementary_charge, 24.0 * proton_mass));
        add(make_particle("40Ca+", elementary_charge, 40.0 * proton_mass));
        add(make_particle("88Sr+", elementary_charge, 88.0 * proton_mass));
    }

    void add(const Particle& p) { species_[p.name] = p; }

    bool contains(const std::string& name) const { return species_.count(name) != 0; }

    const Particle& lookup(const std::string& name) const {
        auto it = species_.find(name);
        if (it == species_.end()) throw ConfigError("unknown species '" + name + "'");
        return it->second;
    }

    const std::map<std::string, Particle>& all() const { return species_; }

private:
    std::map<std::string, Particle> species_;
};

inline const ParticleCatalog& builtin_catalog() {
    static const ParticleCatalog catalog;
    return catalog;
}

inline Particle particle_lookup(const std::string& name,
                                const ParticleCatalog& catalog = builtin_catalog()) {
    return catalog.lookup(name);
}

// Bose occupation 1/(exp(hbar w / kT) - 1), no high-temperature shortcut.
inline double thermal_occupation(double omega0, const Environment& env) {
    require(omega0 > 0.0, "thermal_occupation: omega0 must be positive");
    require(env.temperature > 0.0, "thermal_occupation: temperature must be positive");
    const double x = constants::hbar * omega0 / (constants::boltzmann * env.temperature);
    return 1.0 / std::expm1(x);
}

}  // namespace hybrid
