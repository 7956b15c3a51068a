#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ionloss/vec.hpp"

namespace ionloss
{
//---------------------------------------------------------------------------//
/*!
 * A neutral target atom in the Hartree-Fock-Slater screening model.
 *
 * The screening function is Phi(r) = sum_i A_i exp(-alpha_i r) with
 * sum_i A_i = 1 (to 1e-6). Construction validates Z >= 1 and alpha_i > 0.
 */
class HfsAtom
{
  public:
    using Coefficients = std::array<double, 3>;

    HfsAtom(int z, Coefficients a, Coefficients alpha);

    int z() const { return z_; }
    Coefficients const& a() const { return a_; }
    Coefficients const& alpha() const { return alpha_; }

    friend bool operator==(HfsAtom const&, HfsAtom const&) = default;

  private:
    int z_;
    Coefficients a_;
    Coefficients alpha_;
};

using HfsTable = std::map<int, HfsAtom>;

//! Phi(r) in (0, 1]; throws DomainError for r < 0.
double screening_function(HfsAtom const& atom, double r);

//! Electron charge density -(Z / 4 pi r) sum A_i alpha_i^2 e^{-alpha_i r}.
double charge_density(HfsAtom const& atom, double r);

//---------------------------------------------------------------------------//
//! Target atom placed in the molecular body frame (bohr).
struct PlacedAtom
{
    HfsAtom atom;
    Vec3 position;
};

/*!
 * Rigid molecule in its body frame. Diatomics are placed at +-L/2 on the body
 * z axis, centred on the midpoint of the nuclei.
 */
class MoleculeGeometry
{
  public:
    explicit MoleculeGeometry(std::vector<PlacedAtom> atoms);

    static MoleculeGeometry single(HfsAtom const& atom);
    static MoleculeGeometry diatomic(HfsAtom const& atom, double bond_length);
    static MoleculeGeometry diatomic(HfsAtom const& first,
                                     HfsAtom const& second,
                                     double bond_length);

    std::vector<PlacedAtom> const& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    //! Largest internuclear distance; zero for a single atom.
    double extent() const;

  private:
    std::vector<PlacedAtom> atoms_;
};

//! Polar angle theta in [0, pi] of the body axis from the beam; azimuth phi
//! is reduced into [0, 2 pi).
class Orientation
{
  public:
    Orientation(double theta, double phi = 0);

    double theta() const { return theta_; }
    double phi() const { return phi_; }

  private:
    double theta_;
    double phi_;
};

/*!
 * Project each atom, rotated by R_z(phi) R_y(theta), onto the plane
 * perpendicular to the beam (lab z axis). Longitudinal coordinates drop out
 * of the straight-line eikonal integral.
 */
std::vector<Vec2> transverse_positions(MoleculeGeometry const& geom,
                                       Orientation const& orient);

//---------------------------------------------------------------------------//
// HFS coefficient files: CSV with header `Z,A1,A2,A3,alpha1,alpha2,alpha3`.
// Blank lines and lines starting with '#' are ignored.
HfsTable load_hfs_table(std::filesystem::path const& path);
HfsTable parse_hfs_table(std::istream& in, std::string const& source_name);

//! Table compiled in from core/data/hfs_dhfs.csv.
HfsTable const& builtin_hfs_table();

//! Look up an atom by Z; throws LoadError naming the missing entry.
HfsAtom const& find_atom(HfsTable const& table, int z);
}  // namespace ionloss
