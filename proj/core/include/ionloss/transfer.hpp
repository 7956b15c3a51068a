#pragma once

#include <array>
#include <span>
#include <vector>

#include "ionloss/atomic_data.hpp"
#include "ionloss/vec.hpp"

namespace ionloss
{
//! Momentum kick received by each projectile electron, in the impact plane.
struct MomentumTransfer
{
    Vec2 vector;

    double magnitude() const { return norm(vector); }
    friend MomentumTransfer operator+(MomentumTransfer a, MomentumTransfer b)
    {
        return {a.vector + b.vector};
    }
};

//! chi(b) = (2 Z / v) sum_i A_i K0(alpha_i b), the per-electron eikonal phase
//! of one screened atom. Requires b > 0, v > 0.
double eikonal_phase_single(HfsAtom const& atom, double v, double b);

//! q(b) = (2 Z / v) sum_i alpha_i A_i K1(alpha_i |b|) b_hat = -grad chi.
MomentumTransfer momentum_transfer_single(HfsAtom const& atom, double v, Vec2 b);

//! Q(b) = sum_m q_m(b - s_m). Throws DomainError if b coincides with a
//! projection s_m.
MomentumTransfer total_momentum_transfer(std::span<Vec2 const> projections,
                                         std::span<HfsAtom const> atoms,
                                         double v, Vec2 b);

//---------------------------------------------------------------------------//
/*!
 * Precomputed kick field of a molecule at fixed orientation and speed.
 *
 * Used inside quadrature loops. \c at returns the total kick and the
 * smallest per-atom impact parameter so callers can treat excluded disks.
 */
class TransferField
{
  public:
    TransferField(std::span<Vec2 const> projections,
                  std::span<HfsAtom const> atoms, double v);

    struct Sample
    {
        MomentumTransfer kick;
        double min_distance;
    };

    //! Kick at b; per-atom terms with |b - s_m| below \c excluded_radius are
    //! skipped and reported through \c min_distance.
    Sample at(Vec2 b, double excluded_radius = 0) const;

    std::vector<Vec2> const& projections() const { return projections_; }

  private:
    struct Term
    {
        double weight;  // 2 Z A_i alpha_i / v
        double alpha;
    };
    std::vector<Vec2> projections_;
    std::vector<std::array<Term, 3>> terms_;
};
}  // namespace ionloss
