#pragma once

// Whole-system energy accounting. Units: energy in mJ, time in s, power in W.

#include "reoh/error.hpp"
#include "reoh/platform.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace reoh {

inline constexpr double kMillijoulesPerJoule = 1000.0;

struct PlatformEnergy {
    std::size_t platform = 0;
    double static_energy = 0.0;   // mJ
    double dynamic_energy = 0.0;  // mJ
    bool active = false;
};

struct EnergyBreakdown {
    std::vector<PlatformEnergy> platforms;  // one record per platform, declaration order
    double total = 0.0;                     // mJ
};

struct RunMeasurement {
    int app_id = 0;
    NativeConfig config;
    double mean_time = 0.0;    // s
    double mean_energy = 0.0;  // mJ, dynamic
    double time_stddev = 0.0;
    double energy_stddev = 0.0;
    int runs = 1;
};

/// Energy per unit time, in mJ/s (mW).
inline double power_from(double energy_mj, double time_s) {
    if (!(time_s > 0.0)) throw InvalidArgument("power_from: time must be positive");
    return energy_mj / time_s;
}

/// Idle energy of a platform over `duration_s`, in mJ.
inline double static_energy(const PlatformSpec& spec, double duration_s) {
    if (!(duration_s >= 0.0)) throw InvalidArgument("static_energy: duration must be non-negative");
    return spec.static_power * duration_s * kMillijoulesPerJoule;
}

/// Total energy of the machine while `active` runs for `duration_s`:
/// static energy of every platform plus the active platform's dynamic energy.
inline EnergyBreakdown total_energy(const System& system, std::size_t active, double dynamic_mj,
                                    double duration_s) {
    if (active >= system.platforms.size())
        throw InvalidArgument("total_energy: unknown active platform #" + std::to_string(active));
    if (!(dynamic_mj >= 0.0)) throw InvalidArgument("total_energy: dynamic energy must be non-negative");
    EnergyBreakdown out;
    out.platforms.reserve(system.platforms.size());
    for (std::size_t p = 0; p < system.platforms.size(); ++p) {
        PlatformEnergy rec;
        rec.platform = p;
        rec.static_energy = static_energy(system.platforms[p], duration_s);
        rec.active = p == active;
        rec.dynamic_energy = rec.active ? dynamic_mj : 0.0;
        out.total += rec.static_energy + rec.dynamic_energy;
        out.platforms.push_back(rec);
    }
    return out;
}

/// Total energy in mJ of one run measured as (dynamic power W, time s).
inline double total_energy_of(const System& system, std::size_t active, double dynamic_power_w, double time_s) {
    return total_energy(system, active, dynamic_power_w * time_s * kMillijoulesPerJoule, time_s).total;
}

} // namespace reoh
