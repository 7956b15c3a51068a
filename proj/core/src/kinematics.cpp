#include "ionloss/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "ionloss/errors.hpp"

namespace ionloss
{
CollisionParams velocity_from_energy(double energy_mev_u)
{
    if (!(energy_mev_u > 0) || !std::isfinite(energy_mev_u))
    {
        throw DomainError("velocity_from_energy: energy must be positive");
    }
    CollisionParams p{};
    p.energy_mev_u = energy_mev_u;
    p.gamma = 1 + energy_mev_u / constants::atomic_mass_mev;
    // 1 - 1/gamma^2 written to avoid cancellation at low energy
    double const t = energy_mev_u / constants::atomic_mass_mev;
    p.beta = std::sqrt(t * (t + 2)) / p.gamma;
    p.velocity_au = p.beta * constants::speed_of_light_au;
    return p;
}

CollisionParams params_from_velocity(double velocity_au)
{
    if (!(velocity_au > 0 && velocity_au < constants::speed_of_light_au))
    {
        throw DomainError("params_from_velocity: need 0 < v < c");
    }
    CollisionParams p{};
    p.velocity_au = velocity_au;
    p.beta = velocity_au / constants::speed_of_light_au;
    p.gamma = 1 / std::sqrt((1 - p.beta) * (1 + p.beta));
    p.energy_mev_u = (p.gamma - 1) * constants::atomic_mass_mev;
    return p;
}

std::vector<RegimeCheck> evaluate_regime(CollisionParams const& params,
                                         ProjectileSpec const& proj,
                                         MoleculeGeometry const& geom,
                                         RegimeThresholds const& thresholds)
{
    std::vector<RegimeCheck> checks;

    // Sudden: per-atom collision time, Lorentz contracted, against tau_e.
    double const tau_c = thresholds.atom_size / (params.gamma * params.velocity_au);
    double const sudden = tau_c / thresholds.electron_period;
    checks.push_back({"sudden",
                      "collision time / electron period (gamma^-1 a / v / tau_e)",
                      sudden, thresholds.sudden_ratio,
                      sudden < thresholds.sudden_ratio});

    double const charge = proj.charge_state();
    checks.push_back({"charge", "projectile charge state Z - N_P", charge,
                      double(thresholds.min_charge_state),
                      charge >= thresholds.min_charge_state});

    double const target_size = std::max(geom.extent(), thresholds.atom_size);
    double const k = params.gamma * params.velocity_au
                     * constants::electron_masses_per_u;
    double const kl = k * target_size;
    checks.push_back({"eikonal",
                      "projectile momentum per nucleon x target size (k L)",
                      kl, thresholds.min_kl, kl >= thresholds.min_kl});
    return checks;
}

std::vector<std::string> validate_regime(CollisionParams const& params,
                                         ProjectileSpec const& proj,
                                         MoleculeGeometry const& geom,
                                         RegimeThresholds const& thresholds)
{
    std::vector<std::string> warnings;
    for (auto const& check : evaluate_regime(params, proj, geom, thresholds))
    {
        if (check.satisfied)
        {
            continue;
        }
        std::ostringstream msg;
        msg << check.name << ": " << check.description << " = " << check.value;
        if (check.name == "sudden")
        {
            msg << " >= " << check.threshold;
        }
        else
        {
            msg << " < " << check.threshold;
        }
        warnings.push_back(msg.str());
    }
    return warnings;
}
}  // namespace ionloss
