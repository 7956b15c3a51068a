#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ionloss/atomic_data.hpp"
#include "ionloss/form_factor.hpp"

namespace ionloss::cli
{
enum class Units
{
    au,
    cm2
};

Units parse_units(std::string const& text);
char const* to_string(Units units);

struct TableParams
{
    double s_max = 20;
    int n_points = 400;
    int n_max = 20;
};

struct TargetAtom
{
    int z;
    Vec3 position;  //!< body frame, bohr
};

/*!
 * Everything a command needs. Built from JSON; see README for the schema.
 *
 * Defaults: Fe25+ on N2 (L = 2.07 bohr) at 10, 100 and 1000 MeV/u with a
 * 31-point theta grid.
 */
struct RunConfig
{
    std::string projectile_label = "Fe25+";
    int projectile_z = 26;
    int projectile_electrons = 1;
    std::optional<double> z_eff;

    std::string target_label = "N2";
    std::vector<TargetAtom> target_atoms;

    std::vector<double> energies_mev_u{10, 100, 1000};
    std::vector<double> theta_grid;
    int average_nodes = 8;
    double tolerance = 1e-3;
    TableParams table;
    std::optional<std::filesystem::path> hfs_file;

    std::optional<std::filesystem::path> output;
    Units units = Units::au;
    std::uint64_t seed = 1;
    int threads = 1;

    ProjectileSpec projectile() const;
    //! HFS table from \c hfs_file, or the built-in one.
    HfsTable hfs_table() const;
    MoleculeGeometry geometry() const;
};

//! Parse and validate; throws ConfigError naming the offending field.
//! Relative paths inside the file resolve against \c base_dir.
RunConfig parse_run_config(std::istream& in,
                           std::filesystem::path const& base_dir = {});
RunConfig load_run_config(std::filesystem::path const& path);

//! Default configuration (no file given).
RunConfig default_run_config();

//! Range checks shared by the file parser and command-line overrides.
void validate(RunConfig const& cfg);

//! Single-line JSON echo of the physics-relevant settings (no output path,
//! no thread count), used in output metadata.
std::string config_echo(RunConfig const& cfg);
}  // namespace ionloss::cli
