#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ionloss/cross_section.hpp"
#include "ionloss/errors.hpp"

namespace ionloss::cli
{
namespace
{
using nlohmann::json;

constexpr double n2_bond_length = 2.07;

[[noreturn]] void field_error(std::string const& field, std::string const& what)
{
    throw ConfigError("config field '" + field + "': " + what);
}

double number(json const& j, std::string const& field)
{
    if (!j.is_number())
    {
        field_error(field, "expected a number");
    }
    return j.get<double>();
}

long long integer(json const& j, std::string const& field)
{
    if (!j.is_number_integer())
    {
        field_error(field, "expected an integer");
    }
    return j.get<long long>();
}

std::string text(json const& j, std::string const& field)
{
    if (!j.is_string())
    {
        field_error(field, "expected a string");
    }
    return j.get<std::string>();
}

void reject_unknown(json const& obj, std::set<std::string> const& known,
                    std::string const& prefix)
{
    for (auto it = obj.begin(); it != obj.end(); ++it)
    {
        if (!known.count(it.key()))
        {
            field_error(prefix + it.key(), "unknown key");
        }
    }
}

void apply_projectile_preset(RunConfig& cfg, std::string const& name,
                             std::string const& field)
{
    static std::map<std::string, int> const presets{
        {"Fe25+", 1}, {"Fe24+", 2}, {"Fe23+", 3}};
    auto it = presets.find(name);
    if (it == presets.end())
    {
        field_error(field, "unknown projectile preset '" + name
                               + "' (known: Fe25+, Fe24+, Fe23+)");
    }
    cfg.projectile_label = name;
    cfg.projectile_z = 26;
    cfg.projectile_electrons = it->second;
    cfg.z_eff.reset();
}

std::vector<TargetAtom> homonuclear_diatomic(int z, double bond_length)
{
    return {{z, {0, 0, -0.5 * bond_length}}, {z, {0, 0, 0.5 * bond_length}}};
}

void apply_molecule_preset(RunConfig& cfg, std::string const& name,
                           std::optional<double> bond_length,
                           std::string const& field)
{
    if (name != "N2")
    {
        field_error(field, "unknown molecule preset '" + name + "' (known: N2)");
    }
    cfg.target_label = name;
    cfg.target_atoms = homonuclear_diatomic(7, bond_length.value_or(n2_bond_length));
}

void parse_projectile(RunConfig& cfg, json const& j)
{
    if (j.is_string())
    {
        apply_projectile_preset(cfg, j.get<std::string>(), "projectile");
        return;
    }
    if (!j.is_object())
    {
        field_error("projectile", "expected a preset name or an object");
    }
    reject_unknown(j, {"z", "electrons", "z_eff", "label"}, "projectile.");
    if (!j.contains("z") || !j.contains("electrons"))
    {
        field_error("projectile", "needs 'z' and 'electrons'");
    }
    cfg.projectile_z = int(integer(j["z"], "projectile.z"));
    cfg.projectile_electrons = int(integer(j["electrons"], "projectile.electrons"));
    cfg.z_eff.reset();
    if (j.contains("z_eff"))
    {
        cfg.z_eff = number(j["z_eff"], "projectile.z_eff");
    }
    cfg.projectile_label = j.contains("label")
                               ? text(j["label"], "projectile.label")
                               : "Z" + std::to_string(cfg.projectile_z) + "/"
                                     + std::to_string(cfg.projectile_electrons) + "e";
}

void parse_target(RunConfig& cfg, json const& j)
{
    if (j.is_string())
    {
        apply_molecule_preset(cfg, j.get<std::string>(), std::nullopt, "target");
        return;
    }
    if (!j.is_object())
    {
        field_error("target", "expected a preset name or an object");
    }
    reject_unknown(j, {"molecule", "bond_length", "atoms", "name"}, "target.");
    if (j.contains("molecule") == j.contains("atoms"))
    {
        field_error("target", "give exactly one of 'molecule' or 'atoms'");
    }
    if (j.contains("molecule"))
    {
        std::optional<double> bond;
        if (j.contains("bond_length"))
        {
            bond = number(j["bond_length"], "target.bond_length");
            if (!(*bond > 0))
            {
                field_error("target.bond_length", "must be > 0");
            }
        }
        apply_molecule_preset(cfg, text(j["molecule"], "target.molecule"), bond,
                              "target.molecule");
        return;
    }
    if (j.contains("bond_length"))
    {
        field_error("target.bond_length", "only valid with 'molecule'");
    }
    auto const& atoms = j["atoms"];
    if (!atoms.is_array() || atoms.empty())
    {
        field_error("target.atoms", "expected a non-empty array");
    }
    cfg.target_atoms.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i)
    {
        std::string const prefix = "target.atoms[" + std::to_string(i) + "]";
        auto const& a = atoms[i];
        if (!a.is_object() || !a.contains("z"))
        {
            field_error(prefix, "expected an object with 'z'");
        }
        reject_unknown(a, {"z", "position"}, prefix + ".");
        TargetAtom atom{int(integer(a["z"], prefix + ".z")), {0, 0, 0}};
        if (a.contains("position"))
        {
            auto const& p = a["position"];
            if (!p.is_array() || p.size() != 3)
            {
                field_error(prefix + ".position", "expected [x, y, z]");
            }
            atom.position = {number(p[0], prefix + ".position[0]"),
                             number(p[1], prefix + ".position[1]"),
                             number(p[2], prefix + ".position[2]")};
        }
        cfg.target_atoms.push_back(atom);
    }
    cfg.target_label = j.contains("name") ? text(j["name"], "target.name") : "custom";
}

void parse_theta_grid(RunConfig& cfg, json const& j)
{
    if (j.is_number_integer())
    {
        cfg.theta_grid = default_theta_grid(int(j.get<long long>()));
        return;
    }
    if (j.is_object())
    {
        reject_unknown(j, {"points"}, "theta_grid.");
        if (!j.contains("points"))
        {
            field_error("theta_grid", "needs 'points'");
        }
        long long const points = integer(j["points"], "theta_grid.points");
        if (points < 2 || points > 100000)
        {
            field_error("theta_grid.points", "must be in [2, 100000]");
        }
        cfg.theta_grid = default_theta_grid(int(points));
        return;
    }
    if (!j.is_array() || j.empty())
    {
        field_error("theta_grid", "expected a point count, {points: n} or a list");
    }
    cfg.theta_grid.clear();
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        cfg.theta_grid.push_back(number(j[i], "theta_grid[" + std::to_string(i) + "]"));
    }
}

void parse_table(RunConfig& cfg, json const& j)
{
    if (!j.is_object())
    {
        field_error("table", "expected an object");
    }
    reject_unknown(j, {"s_max", "n_points", "n_max"}, "table.");
    if (j.contains("s_max"))
    {
        cfg.table.s_max = number(j["s_max"], "table.s_max");
    }
    if (j.contains("n_points"))
    {
        cfg.table.n_points = int(integer(j["n_points"], "table.n_points"));
    }
    if (j.contains("n_max"))
    {
        cfg.table.n_max = int(integer(j["n_max"], "table.n_max"));
    }
}

std::filesystem::path resolve(std::filesystem::path const& base, std::string const& p)
{
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}
}  // namespace

//---------------------------------------------------------------------------//
Units parse_units(std::string const& value)
{
    if (value == "au")
    {
        return Units::au;
    }
    if (value == "cm2")
    {
        return Units::cm2;
    }
    throw ConfigError("config field 'units': expected 'au' or 'cm2', got '" + value + "'");
}

char const* to_string(Units units)
{
    return units == Units::au ? "au" : "cm2";
}

ProjectileSpec RunConfig::projectile() const
{
    try
    {
        return ProjectileSpec(projectile_z, projectile_electrons, z_eff);
    }
    catch (DomainError const& e)
    {
        throw ConfigError(std::string("config field 'projectile': ") + e.what());
    }
}

HfsTable RunConfig::hfs_table() const
{
    return hfs_file ? load_hfs_table(*hfs_file) : builtin_hfs_table();
}

MoleculeGeometry RunConfig::geometry() const
{
    auto const table = hfs_table();
    std::vector<PlacedAtom> placed;
    for (std::size_t i = 0; i < target_atoms.size(); ++i)
    {
        auto it = table.find(target_atoms[i].z);
        if (it == table.end())
        {
            throw ConfigError("config field 'target.atoms[" + std::to_string(i)
                              + "].z': no HFS entry for Z="
                              + std::to_string(target_atoms[i].z));
        }
        placed.push_back({it->second, target_atoms[i].position});
    }
    try
    {
        return MoleculeGeometry(std::move(placed));
    }
    catch (DomainError const& e)
    {
        throw ConfigError(std::string("config field 'target': ") + e.what());
    }
}

RunConfig default_run_config()
{
    RunConfig cfg;
    cfg.target_atoms = homonuclear_diatomic(7, n2_bond_length);
    cfg.theta_grid = default_theta_grid(31);
    return cfg;
}

void validate(RunConfig const& cfg)
{
    if (cfg.energies_mev_u.empty())
    {
        field_error("energies_mev_u", "needs at least one energy");
    }
    for (std::size_t i = 0; i < cfg.energies_mev_u.size(); ++i)
    {
        double const e = cfg.energies_mev_u[i];
        if (!(e > 0) || !std::isfinite(e))
        {
            field_error("energies_mev_u[" + std::to_string(i) + "]", "must be > 0");
        }
    }
    if (!(cfg.tolerance >= 1e-6 && cfg.tolerance <= 1e-1))
    {
        field_error("tolerance", "must lie in [1e-6, 1e-1]");
    }
    for (std::size_t i = 0; i < cfg.theta_grid.size(); ++i)
    {
        double const t = cfg.theta_grid[i];
        if (!(t >= 0 && t <= 0.5 * std::numbers::pi))
        {
            field_error("theta_grid[" + std::to_string(i) + "]", "must lie in [0, pi/2]");
        }
        if (i > 0 && !(t > cfg.theta_grid[i - 1]))
        {
            field_error("theta_grid[" + std::to_string(i) + "]", "grid must be ascending");
        }
    }
    if (cfg.theta_grid.empty())
    {
        field_error("theta_grid", "must not be empty");
    }
    if (cfg.average_nodes < 2 || cfg.average_nodes > 64)
    {
        field_error("average_nodes", "must lie in [2, 64]");
    }
    if (!(cfg.table.s_max >= 20) || cfg.table.n_points < 200 || cfg.table.n_max < 10)
    {
        field_error("table", "need s_max >= 20, n_points >= 200, n_max >= 10");
    }
    if (cfg.threads < 1)
    {
        field_error("threads", "must be >= 1");
    }
    if (cfg.target_atoms.empty())
    {
        field_error("target", "needs at least one atom");
    }
    cfg.projectile();
    cfg.geometry();
}

RunConfig parse_run_config(std::istream& in, std::filesystem::path const& base_dir)
{
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object())
    {
        throw ConfigError("config: top level must be an object");
    }
    reject_unknown(j,
                   {"projectile", "target", "energies_mev_u", "theta_grid",
                    "average_nodes", "tolerance", "table", "hfs_file", "output",
                    "units", "seed", "threads"},
                   "");

    RunConfig cfg = default_run_config();
    if (j.contains("projectile"))
    {
        parse_projectile(cfg, j["projectile"]);
    }
    if (j.contains("target"))
    {
        parse_target(cfg, j["target"]);
    }
    if (j.contains("energies_mev_u"))
    {
        auto const& e = j["energies_mev_u"];
        if (e.is_number())
        {
            cfg.energies_mev_u = {e.get<double>()};
        }
        else if (e.is_array())
        {
            cfg.energies_mev_u.clear();
            for (std::size_t i = 0; i < e.size(); ++i)
            {
                cfg.energies_mev_u.push_back(
                    number(e[i], "energies_mev_u[" + std::to_string(i) + "]"));
            }
        }
        else
        {
            field_error("energies_mev_u", "expected a number or a list");
        }
    }
    if (j.contains("theta_grid"))
    {
        parse_theta_grid(cfg, j["theta_grid"]);
    }
    if (j.contains("average_nodes"))
    {
        cfg.average_nodes = int(integer(j["average_nodes"], "average_nodes"));
    }
    if (j.contains("tolerance"))
    {
        cfg.tolerance = number(j["tolerance"], "tolerance");
    }
    if (j.contains("table"))
    {
        parse_table(cfg, j["table"]);
    }
    if (j.contains("hfs_file"))
    {
        cfg.hfs_file = resolve(base_dir, text(j["hfs_file"], "hfs_file"));
    }
    if (j.contains("output"))
    {
        cfg.output = resolve(base_dir, text(j["output"], "output"));
    }
    if (j.contains("units"))
    {
        cfg.units = parse_units(text(j["units"], "units"));
    }
    if (j.contains("seed"))
    {
        long long const seed = integer(j["seed"], "seed");
        if (seed < 0)
        {
            field_error("seed", "must be >= 0");
        }
        cfg.seed = std::uint64_t(seed);
    }
    if (j.contains("threads"))
    {
        cfg.threads = int(integer(j["threads"], "threads"));
    }
    try
    {
        validate(cfg);
    }
    catch (LoadError const& e)
    {
        throw ConfigError(std::string("config field 'hfs_file': ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open config file " + path.string());
    }
    return parse_run_config(in, path.parent_path());
}

std::string config_echo(RunConfig const& cfg)
{
    json j;
    json proj{{"label", cfg.projectile_label},
              {"z", cfg.projectile_z},
              {"electrons", cfg.projectile_electrons}};
    proj["z_eff"] = cfg.projectile().z_eff();
    j["projectile"] = proj;
    json atoms = json::array();
    for (auto const& a : cfg.target_atoms)
    {
        atoms.push_back({{"z", a.z},
                         {"position", {a.position.x, a.position.y, a.position.z}}});
    }
    j["target"] = {{"name", cfg.target_label}, {"atoms", atoms}};
    j["energies_mev_u"] = cfg.energies_mev_u;
    j["theta_points"] = cfg.theta_grid.size();
    j["average_nodes"] = cfg.average_nodes;
    j["tolerance"] = cfg.tolerance;
    j["table"] = {{"s_max", cfg.table.s_max},
                  {"n_points", cfg.table.n_points},
                  {"n_max", cfg.table.n_max}};
    j["hfs"] = cfg.hfs_file ? cfg.hfs_file->filename().string() : "builtin";
    j["units"] = to_string(cfg.units);
    j["seed"] = cfg.seed;
    return j.dump();
}
}  // namespace ionloss::cli
