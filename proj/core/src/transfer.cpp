#include "ionloss/transfer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ionloss/errors.hpp"
#include "ionloss/special_functions.hpp"

namespace ionloss
{
namespace
{
void check_velocity(double v)
{
    if (!(v > 0) || !std::isfinite(v))
    {
        throw DomainError("transfer: velocity must be positive");
    }
}

double kick_magnitude(HfsAtom const& atom, double v, double b)
{
    double sum = 0;
    for (int i = 0; i < 3; ++i)
    {
        double const alpha = atom.alpha()[i];
        sum += alpha * atom.a()[i] * bessel_k1(alpha * b);
    }
    return 2 * atom.z() / v * sum;
}
}  // namespace

double eikonal_phase_single(HfsAtom const& atom, double v, double b)
{
    check_velocity(v);
    if (!(b > 0))
    {
        throw DomainError("eikonal_phase_single: impact parameter must be > 0");
    }
    double sum = 0;
    for (int i = 0; i < 3; ++i)
    {
        sum += atom.a()[i] * bessel_k0(atom.alpha()[i] * b);
    }
    return 2 * atom.z() / v * sum;
}

MomentumTransfer momentum_transfer_single(HfsAtom const& atom, double v, Vec2 b)
{
    check_velocity(v);
    double const length = norm(b);
    if (!(length > 0))
    {
        throw DomainError("momentum_transfer_single: impact parameter must be "
                          "non-zero");
    }
    return {(kick_magnitude(atom, v, length) / length) * b};
}

MomentumTransfer total_momentum_transfer(std::span<Vec2 const> projections,
                                         std::span<HfsAtom const> atoms,
                                         double v, Vec2 b)
{
    if (projections.size() != atoms.size())
    {
        throw DomainError("total_momentum_transfer: projections and atoms "
                          "differ in length");
    }
    MomentumTransfer total{};
    for (std::size_t m = 0; m < atoms.size(); ++m)
    {
        Vec2 const bm = b - projections[m];
        if (!(norm(bm) > 0))
        {
            throw DomainError("total_momentum_transfer: b coincides with the "
                              "projection of atom " + std::to_string(m));
        }
        total = total + momentum_transfer_single(atoms[m], v, bm);
    }
    return total;
}

//---------------------------------------------------------------------------//
TransferField::TransferField(std::span<Vec2 const> projections,
                             std::span<HfsAtom const> atoms, double v)
    : projections_(projections.begin(), projections.end())
{
    check_velocity(v);
    if (projections.size() != atoms.size() || atoms.empty())
    {
        throw DomainError("TransferField: need one projection per atom");
    }
    for (auto const& atom : atoms)
    {
        std::array<Term, 3> t{};
        for (int i = 0; i < 3; ++i)
        {
            t[i] = {2 * atom.z() * atom.a()[i] * atom.alpha()[i] / v,
                    atom.alpha()[i]};
        }
        terms_.push_back(t);
    }
}

TransferField::Sample TransferField::at(Vec2 b, double excluded_radius) const
{
    Sample result{{}, std::numeric_limits<double>::infinity()};
    for (std::size_t m = 0; m < projections_.size(); ++m)
    {
        Vec2 const bm = b - projections_[m];
        double const length = norm(bm);
        result.min_distance = std::min(result.min_distance, length);
        if (!(length > excluded_radius) || length == 0)
        {
            continue;
        }
        double magnitude = 0;
        for (auto const& term : terms_[m])
        {
            if (term.weight != 0)
            {
                magnitude += term.weight * bessel_k1(term.alpha * length);
            }
        }
        result.kick.vector += (magnitude / length) * bm;
    }
    return result;
}
}  // namespace ionloss
