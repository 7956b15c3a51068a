#include "ionloss/atomic_data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "builtin_hfs.hpp"
#include "ionloss/errors.hpp"

namespace ionloss
{
namespace
{
constexpr double coefficient_sum_tolerance = 1e-6;

std::string trim(std::string const& s)
{
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
    {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string const& line)
{
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
    {
        fields.push_back(trim(field));
    }
    return fields;
}

double parse_double(std::string const& text, std::string const& where)
{
    std::size_t used = 0;
    double value = 0;
    try
    {
        value = std::stod(text, &used);
    }
    catch (std::exception const&)
    {
        throw LoadError(where + ": cannot parse number '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value))
    {
        throw LoadError(where + ": cannot parse number '" + text + "'");
    }
    return value;
}
}  // namespace

HfsAtom::HfsAtom(int z, Coefficients a, Coefficients alpha)
    : z_(z), a_(a), alpha_(alpha)
{
    if (z_ < 1)
    {
        throw DomainError("HfsAtom: nuclear charge must be >= 1, got "
                          + std::to_string(z_));
    }
    double sum = 0;
    for (int i = 0; i < 3; ++i)
    {
        if (!(alpha_[i] > 0) || !std::isfinite(alpha_[i]))
        {
            throw DomainError("HfsAtom Z=" + std::to_string(z_)
                              + ": screening exponents must be positive");
        }
        if (!std::isfinite(a_[i]))
        {
            throw DomainError("HfsAtom Z=" + std::to_string(z_)
                              + ": non-finite coefficient");
        }
        sum += a_[i];
    }
    if (std::abs(sum - 1) > coefficient_sum_tolerance)
    {
        throw DomainError("HfsAtom Z=" + std::to_string(z_)
                          + ": coefficients A_i sum to " + std::to_string(sum)
                          + ", expected 1");
    }
}

double screening_function(HfsAtom const& atom, double r)
{
    if (!(r >= 0))
    {
        throw DomainError("screening_function: radius must be >= 0");
    }
    double phi = 0;
    for (int i = 0; i < 3; ++i)
    {
        phi += atom.a()[i] * std::exp(-atom.alpha()[i] * r);
    }
    return phi;
}

double charge_density(HfsAtom const& atom, double r)
{
    if (!(r > 0))
    {
        throw DomainError("charge_density: radius must be > 0");
    }
    double sum = 0;
    for (int i = 0; i < 3; ++i)
    {
        double const alpha = atom.alpha()[i];
        sum += atom.a()[i] * alpha * alpha * std::exp(-alpha * r);
    }
    return -atom.z() / (4 * std::numbers::pi * r) * sum;
}

//---------------------------------------------------------------------------//
MoleculeGeometry::MoleculeGeometry(std::vector<PlacedAtom> atoms)
    : atoms_(std::move(atoms))
{
    if (atoms_.empty())
    {
        throw DomainError("MoleculeGeometry: at least one atom is required");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i)
    {
        for (std::size_t j = i + 1; j < atoms_.size(); ++j)
        {
            if (!(norm(atoms_[i].position - atoms_[j].position) > 0))
            {
                throw DomainError("MoleculeGeometry: atoms "
                                  + std::to_string(i) + " and "
                                  + std::to_string(j) + " coincide");
            }
        }
    }
}

MoleculeGeometry MoleculeGeometry::single(HfsAtom const& atom)
{
    return MoleculeGeometry({PlacedAtom{atom, {}}});
}

MoleculeGeometry MoleculeGeometry::diatomic(HfsAtom const& atom, double bond_length)
{
    return diatomic(atom, atom, bond_length);
}

MoleculeGeometry MoleculeGeometry::diatomic(HfsAtom const& first,
                                            HfsAtom const& second,
                                            double bond_length)
{
    if (!(bond_length > 0) || !std::isfinite(bond_length))
    {
        throw DomainError("MoleculeGeometry: bond length must be positive");
    }
    double const half = 0.5 * bond_length;
    return MoleculeGeometry({PlacedAtom{first, {0, 0, -half}},
                             PlacedAtom{second, {0, 0, half}}});
}

double MoleculeGeometry::extent() const
{
    double result = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
    {
        for (std::size_t j = i + 1; j < atoms_.size(); ++j)
        {
            result = std::max(result,
                              norm(atoms_[i].position - atoms_[j].position));
        }
    }
    return result;
}

Orientation::Orientation(double theta, double phi) : theta_(theta), phi_(phi)
{
    if (!(theta >= 0 && theta <= std::numbers::pi))
    {
        throw DomainError("Orientation: theta must lie in [0, pi]");
    }
    if (!std::isfinite(phi))
    {
        throw DomainError("Orientation: phi must be finite");
    }
    constexpr double two_pi = 2 * std::numbers::pi;
    phi_ = std::fmod(phi, two_pi);
    if (phi_ < 0)
    {
        phi_ += two_pi;
    }
    if (phi_ >= two_pi)
    {
        phi_ = 0;
    }
}

std::vector<Vec2> transverse_positions(MoleculeGeometry const& geom,
                                       Orientation const& orient)
{
    double const ct = std::cos(orient.theta());
    double const st = std::sin(orient.theta());
    double const cp = std::cos(orient.phi());
    double const sp = std::sin(orient.phi());

    std::vector<Vec2> result;
    result.reserve(geom.size());
    for (auto const& placed : geom.atoms())
    {
        Vec3 const p = placed.position;
        // R_y(theta)
        double const x1 = ct * p.x + st * p.z;
        double const y1 = p.y;
        // R_z(phi); the z component is longitudinal and discarded
        result.push_back({cp * x1 - sp * y1, sp * x1 + cp * y1});
    }
    return result;
}

//---------------------------------------------------------------------------//
HfsTable parse_hfs_table(std::istream& in, std::string const& source_name)
{
    static std::vector<std::string> const expected_header
        = {"Z", "A1", "A2", "A3", "alpha1", "alpha2", "alpha3"};

    HfsTable table;
    bool seen_header = false;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line))
    {
        ++line_number;
        std::string const content = trim(line);
        if (content.empty() || content.front() == '#')
        {
            continue;
        }
        std::string const where = source_name + ":" + std::to_string(line_number);
        auto const fields = split_fields(content);
        if (!seen_header)
        {
            if (fields != expected_header)
            {
                throw LoadError(where + ": expected header "
                                "'Z,A1,A2,A3,alpha1,alpha2,alpha3'");
            }
            seen_header = true;
            continue;
        }
        if (fields.size() != 7)
        {
            throw LoadError(where + ": expected 7 fields, found "
                            + std::to_string(fields.size()));
        }
        double const z_value = parse_double(fields[0], where);
        int const z = static_cast<int>(z_value);
        if (z_value != z)
        {
            throw LoadError(where + ": Z must be an integer");
        }
        HfsAtom::Coefficients a{};
        HfsAtom::Coefficients alpha{};
        for (int i = 0; i < 3; ++i)
        {
            a[i] = parse_double(fields[1 + i], where);
            alpha[i] = parse_double(fields[4 + i], where);
        }
        try
        {
            auto [it, inserted] = table.emplace(z, HfsAtom(z, a, alpha));
            if (!inserted)
            {
                throw LoadError(where + ": duplicate entry for Z="
                                + std::to_string(z));
            }
        }
        catch (DomainError const& e)
        {
            throw LoadError(where + ": invalid entry for Z=" + std::to_string(z)
                            + ": " + e.what());
        }
    }
    return table;
}

HfsTable load_hfs_table(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw LoadError("cannot open HFS table '" + path.string() + "'");
    }
    return parse_hfs_table(in, path.string());
}

HfsTable const& builtin_hfs_table()
{
    static HfsTable const table = [] {
        std::istringstream in(detail::builtin_hfs_csv);
        return parse_hfs_table(in, "<builtin hfs_dhfs.csv>");
    }();
    return table;
}

HfsAtom const& find_atom(HfsTable const& table, int z)
{
    auto const it = table.find(z);
    if (it == table.end())
    {
        throw LoadError("no HFS screening entry for Z=" + std::to_string(z));
    }
    return it->second;
}
}  // namespace ionloss
