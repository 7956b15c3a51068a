#pragma once

#include <string>
#include <vector>

#include "ionloss/atomic_data.hpp"
#include "ionloss/form_factor.hpp"

namespace ionloss
{
namespace constants
{
inline constexpr double atomic_mass_mev = 931.494;  //!< m_u c^2
inline constexpr double speed_of_light_au = 137.035999;
inline constexpr double electron_masses_per_u = 1822.888486;
inline constexpr double bohr2_in_cm2 = 2.8002852e-17;
}  // namespace constants

//! Beam kinematics for a projectile of given kinetic energy per nucleon.
struct CollisionParams
{
    double energy_mev_u;
    double gamma;
    double beta;
    double velocity_au;
};

CollisionParams velocity_from_energy(double energy_mev_u);

//! Build parameters from a speed in atomic units (mainly for diagnostics).
CollisionParams params_from_velocity(double velocity_au);

//---------------------------------------------------------------------------//
// Validity diagnostics for the sudden and eikonal approximations.
struct RegimeThresholds
{
    double sudden_ratio = 0.1;      //!< warn if tau_c / tau_e >= this
    double electron_period = 1.0;   //!< tau_e of outer-shell target electrons
    double atom_size = 1.0;         //!< interaction radius of one target atom
    int min_charge_state = 5;       //!< warn if Z - N_P < this
    double min_kl = 100;            //!< warn if k L_target < this
};

struct RegimeCheck
{
    std::string name;
    std::string description;
    double value;
    double threshold;
    bool satisfied;
};

//! All three checks with their computed ratios.
std::vector<RegimeCheck> evaluate_regime(CollisionParams const& params,
                                         ProjectileSpec const& proj,
                                         MoleculeGeometry const& geom,
                                         RegimeThresholds const& thresholds = {});

//! Warning messages for violated checks only; never throws.
std::vector<std::string> validate_regime(CollisionParams const& params,
                                         ProjectileSpec const& proj,
                                         MoleculeGeometry const& geom,
                                         RegimeThresholds const& thresholds = {});
}  // namespace ionloss
