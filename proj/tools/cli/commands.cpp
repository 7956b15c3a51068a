#include "commands.hpp"

#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "ionloss/cross_section.hpp"
#include "ionloss/kinematics.hpp"

#ifndef IONLOSS_VERSION
#    define IONLOSS_VERSION "unknown"
#endif

namespace ionloss::cli
{
namespace
{
std::string fmt(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

void write_preamble(RunConfig const& cfg, char const* command, std::ostream& out)
{
    out << "# ionloss " << IONLOSS_VERSION << ' ' << command << '\n';
    out << "# system: " << cfg.projectile_label << " -> " << cfg.target_label << '\n';
    out << "# config: " << config_echo(cfg) << '\n';
}

void write_block_header(RunConfig const& cfg, CollisionParams const& beam,
                        std::ostream& out, std::ostream& log)
{
    out << "# block energy_mev_u=" << fmt(beam.energy_mev_u)
        << " velocity_au=" << fmt(beam.velocity_au) << " gamma=" << fmt(beam.gamma)
        << '\n';
    for (auto const& warning : validate_regime(beam, cfg.projectile(), cfg.geometry()))
    {
        out << "# warning: " << warning << '\n';
        log << "warning (" << fmt(beam.energy_mev_u) << " MeV/u): " << warning << '\n';
    }
}

ScanOptions scan_options(RunConfig const& cfg)
{
    ScanOptions opts;
    opts.quadrature.rel_tol = cfg.tolerance;
    opts.threads = cfg.threads;
    opts.phi_check = phi_check_angle(cfg.seed);
    return opts;
}

CollisionSystem make_system(RunConfig const& cfg, double energy,
                            std::shared_ptr<IonizationTable const> table)
{
    return {cfg.geometry(), cfg.projectile(), velocity_from_energy(energy),
            std::move(table)};
}
}  // namespace

double phi_check_angle(std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    return 2 * std::numbers::pi * (double(gen() >> 11) * 0x1.0p-53);
}

std::shared_ptr<IonizationTable const> build_table(RunConfig const& cfg)
{
    return std::make_shared<IonizationTable const>(IonizationTable::build(
        cfg.table.s_max, cfg.table.n_points, cfg.table.n_max));
}

//---------------------------------------------------------------------------//
void cmd_scan_theta(RunConfig const& cfg, std::ostream& out, std::ostream& log)
{
    auto const table = build_table(cfg);
    auto const opts = scan_options(cfg);
    write_preamble(cfg, "scan-theta", out);
    out << "# rng: mt19937_64 seed=" << cfg.seed
        << " phi_check=" << fmt(*opts.phi_check) << '\n';
    out << "theta_rad,channel_m,sigma_au,sigma_cm2,quad_error_au,delta\n";
    for (double energy : cfg.energies_mev_u)
    {
        auto const system = make_system(cfg, energy, table);
        write_block_header(cfg, system.beam, out, log);
        auto const scan = delta_scan(system, cfg.theta_grid, opts);
        for (std::size_t i = 0; i < scan.theta_grid.size(); ++i)
        {
            for (std::size_t m = 0; m < scan.sigma.size(); ++m)
            {
                auto const& r = scan.sigma[m][i];
                out << fmt(scan.theta_grid[i]) << ',' << r.m << ',' << fmt(r.sigma_au)
                    << ',' << fmt(r.sigma_cm2) << ',' << fmt(r.quad_error) << ','
                    << fmt(scan.delta[m][i]) << '\n';
            }
        }
    }
}

void cmd_average(RunConfig const& cfg, std::ostream& out, std::ostream& log)
{
    auto const table = build_table(cfg);
    auto opts = scan_options(cfg);
    bool const cm2 = cfg.units == Units::cm2;
    write_preamble(cfg, "average", out);
    out << "# orientation quadrature: Gauss-Legendre in cos(theta), "
        << cfg.average_nodes << " nodes per panel\n";
    out << (cm2 ? "channel_m,sigma_avg_cm2,sigma_perp_cm2,relative_correction\n"
                : "channel_m,sigma_avg_au,sigma_perp_au,relative_correction\n");
    for (double energy : cfg.energies_mev_u)
    {
        auto const system = make_system(cfg, energy, table);
        write_block_header(cfg, system.beam, out, log);
        auto const avg = orientation_average(system, cfg.average_nodes, opts);
        for (std::size_t m = 0; m < avg.sigma_avg.size(); ++m)
        {
            auto const& a = avg.sigma_avg[m];
            auto const& p = avg.sigma_perp[m];
            out << "# channel " << a.m << " error_au avg=" << fmt(a.quad_error)
                << " perp=" << fmt(p.quad_error) << '\n';
            out << a.m << ',' << fmt(cm2 ? a.sigma_cm2 : a.sigma_au) << ','
                << fmt(cm2 ? p.sigma_cm2 : p.sigma_au) << ','
                << fmt(avg.relative_correction[m]) << '\n';
        }
    }
}

void cmd_table(RunConfig const& cfg, std::ostream& out, std::ostream&)
{
    auto const table = build_table(cfg);
    out << "# ionloss " << IONLOSS_VERSION << " table\n";
    out << "# s_max=" << fmt(cfg.table.s_max) << " n_points=" << cfg.table.n_points
        << " n_max=" << cfg.table.n_max << " clipped_nodes=" << table->clipped_nodes()
        << '\n';
    table->write_csv(out);
}

void cmd_validate(RunConfig const& cfg, std::ostream& out, std::ostream&)
{
    auto const proj = cfg.projectile();
    auto const geom = cfg.geometry();
    out << "ionloss " << IONLOSS_VERSION << " validate: " << cfg.projectile_label
        << " -> " << cfg.target_label << '\n';
    for (double energy : cfg.energies_mev_u)
    {
        auto const beam = velocity_from_energy(energy);
        out << "energy " << fmt(energy) << " MeV/u: v = " << fmt(beam.velocity_au)
            << " a.u., gamma = " << fmt(beam.gamma) << '\n';
        for (auto const& check : evaluate_regime(beam, proj, geom))
        {
            char const* relation = check.name == "sudden" ? " < " : " >= ";
            out << "  " << (check.satisfied ? "pass" : "WARN") << "  " << check.name
                << ": " << check.description << " = " << fmt(check.value) << " (need"
                << relation << fmt(check.threshold) << ")\n";
        }
    }
}
}  // namespace ionloss::cli
