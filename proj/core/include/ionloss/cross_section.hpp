#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ionloss/atomic_data.hpp"
#include "ionloss/b_plane_integrator.hpp"
#include "ionloss/form_factor.hpp"
#include "ionloss/kinematics.hpp"
#include "ionloss/transfer.hpp"

namespace ionloss
{
//! Projectile, target, beam and the W_ion table used to evaluate it.
struct CollisionSystem
{
    MoleculeGeometry geometry;
    ProjectileSpec projectile;
    CollisionParams beam;
    std::shared_ptr<IonizationTable const> table;
};

struct QuadratureOptions
{
    double rel_tol = 1e-3;
    double abs_tol = 0;
    std::size_t max_evaluations = 20'000'000;
    double cutoff_ratio = 1e-10;
    //! Disks of this radius around each projection use the saturated W_ion.
    double excluded_radius = 1e-6;
    //! Allow the quarter-plane path for mirror-symmetric geometries.
    bool use_symmetry = true;
};

//---------------------------------------------------------------------------//
//! Independent-electron loss probabilities at one impact parameter.
struct ChannelProbabilities
{
    double p_ion;
    //! P_m for m = 0..N_P, binomial in p_ion.
    std::vector<double> channel;
};

//! Binomial C(n, m) p^m (1 - p)^(n - m), m = 0..n, written to out.
void binomial_channels(double p, int n, std::span<double> out);

ChannelProbabilities loss_probabilities(Vec2 b, TransferField const& field,
                                        ProjectileSpec const& proj,
                                        IonizationTable const& table,
                                        double excluded_radius = 1e-6);

//---------------------------------------------------------------------------//
struct CrossSectionResult
{
    int m;               //!< number of electrons lost
    double sigma_au;     //!< bohr^2
    double sigma_cm2;
    double quad_error;   //!< absolute, bohr^2
};

//! sigma^{m+}(theta, phi) for m = 1..N_P.
std::vector<CrossSectionResult>
cross_section_fixed(CollisionSystem const& system, Orientation const& orient,
                    QuadratureOptions const& opts = {});

//! Integral of the single-electron ionisation probability over the plane,
//! reported with m = 0. Sum_m m sigma^{m+} equals N_P times this.
CrossSectionResult ionization_area(CollisionSystem const& system,
                                   Orientation const& orient,
                                   QuadratureOptions const& opts = {});

//! phi-averaged sigma(theta), evaluated at phi = 0 by rotational symmetry.
std::vector<CrossSectionResult>
cross_section_theta(CollisionSystem const& system, double theta,
                    QuadratureOptions const& opts = {});

struct PhiInvarianceCheck
{
    bool passed;
    //! max over channels of |sigma(phi1) - sigma(phi2)| / (combined error)
    double worst_ratio;
};

//! Compare sigma(theta, 0) and sigma(theta, phi) against 3x combined error.
PhiInvarianceCheck check_phi_invariance(CollisionSystem const& system,
                                        double theta, double phi,
                                        QuadratureOptions const& opts = {});

//---------------------------------------------------------------------------//
struct OrientationScan
{
    std::vector<double> theta_grid;
    //! [m - 1][theta index]
    std::vector<std::vector<CrossSectionResult>> sigma;
    std::vector<std::vector<double>> delta;
    std::vector<CrossSectionResult> sigma_perp;
};

struct ScanOptions
{
    QuadratureOptions quadrature;
    int threads = 1;
    //! Azimuth used to verify phi invariance once per system (at theta =
    //! pi/4); disabled when empty.
    std::optional<double> phi_check = 1.234;
};

//! Default grid: 31 uniform points on [0, pi/2].
std::vector<double> default_theta_grid(int points = 31);

//! delta^{m+}(theta) = (sigma(theta) - sigma_perp) / sigma_perp.
OrientationScan delta_scan(CollisionSystem const& system,
                           std::span<double const> theta_grid,
                           ScanOptions const& opts = {});

struct OrientationAverage
{
    std::vector<CrossSectionResult> sigma_avg;
    std::vector<CrossSectionResult> sigma_perp;
    //! (sigma_avg - sigma_perp) / sigma_perp per channel
    std::vector<double> relative_correction;
};

/*!
 * Chaotic-orientation average (1/2) int_0^pi sigma(theta) sin(theta) dtheta,
 * using sigma(pi - theta) = sigma(theta). Gauss-Legendre in cos(theta) with
 * \c nodes points on each of 13 theta panels whose edges halve from pi/2
 * towards 0. The error combines the difference to the half-order rule with
 * the propagated quadrature errors.
 */
OrientationAverage orientation_average(CollisionSystem const& system,
                                       int nodes = 8,
                                       ScanOptions const& opts = {});
}  // namespace ionloss
