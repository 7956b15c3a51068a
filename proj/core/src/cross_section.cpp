#include "ionloss/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ionloss/detail/gauss_legendre.hpp"
#include "ionloss/detail/parallel.hpp"
#include "ionloss/errors.hpp"

namespace ionloss
{
namespace
{
constexpr double half_pi = 0.5 * std::numbers::pi;
constexpr int average_halvings = 12;

std::vector<HfsAtom> atom_list(MoleculeGeometry const& geom)
{
    std::vector<HfsAtom> atoms;
    for (auto const& placed : geom.atoms())
    {
        atoms.push_back(placed.atom);
    }
    return atoms;
}

// The set {(atom, s_m)} is invariant under x -> -x and under y -> -y.
bool mirror_symmetric(std::vector<Vec2> const& proj,
                      std::vector<HfsAtom> const& atoms)
{
    double scale = 1;
    for (Vec2 p : proj)
    {
        scale = std::max(scale, norm(p));
    }
    double const tol = 1e-12 * scale;
    auto has_image = [&](std::size_t m, Vec2 image) {
        for (std::size_t k = 0; k < proj.size(); ++k)
        {
            if (atoms[k] == atoms[m] && norm(proj[k] - image) <= tol)
            {
                return true;
            }
        }
        return false;
    };
    for (std::size_t m = 0; m < proj.size(); ++m)
    {
        if (!has_image(m, {-proj[m].x, proj[m].y})
            || !has_image(m, {proj[m].x, -proj[m].y}))
        {
            return false;
        }
    }
    return true;
}

void check_system(CollisionSystem const& system)
{
    if (!system.table)
    {
        throw ConfigError("CollisionSystem: no ionization table");
    }
}

struct PlaneProblem
{
    std::vector<Vec2> projections;
    std::vector<HfsAtom> atoms;
    TransferField field;
    BPlaneDomain domain;
};

PlaneProblem make_problem(CollisionSystem const& system,
                          Orientation const& orient,
                          QuadratureOptions const& opts)
{
    auto projections = transverse_positions(system.geometry, orient);
    auto atoms = atom_list(system.geometry);
    TransferField field(projections, atoms, system.beam.velocity_au);
    BPlaneDomain domain;
    domain.points_of_interest = projections;
    domain.quarter_symmetric = opts.use_symmetry && mirror_symmetric(projections, atoms);
    domain.cutoff_ratio = opts.cutoff_ratio;
    domain.grading_inner = opts.excluded_radius;
    return {std::move(projections), std::move(atoms), std::move(field),
            std::move(domain)};
}

double ionization_at(Vec2 b, TransferField const& field,
                     IonizationTable const& table, double z_eff,
                     double excluded_radius)
{
    auto const sample = field.at(b, excluded_radius);
    if (sample.min_distance <= excluded_radius)
    {
        return table.saturation();
    }
    return table(sample.kick.magnitude() / z_eff);
}

IntegrationOptions integration_options(QuadratureOptions const& opts)
{
    IntegrationOptions io;
    io.rel_tol = opts.rel_tol;
    io.abs_tol = opts.abs_tol;
    io.max_evaluations = opts.max_evaluations;
    return io;
}

CrossSectionResult make_result(int m, double value, double error)
{
    return {m, value, value * constants::bohr2_in_cm2, error};
}
}  // namespace

//---------------------------------------------------------------------------//
void binomial_channels(double p, int n, std::span<double> out)
{
    if (!(p >= 0 && p <= 1))
    {
        throw DomainError("binomial_channels: p must lie in [0, 1]");
    }
    if (n < 0 || out.size() < std::size_t(n) + 1)
    {
        throw DomainError("binomial_channels: output needs n + 1 slots");
    }
    double const q = 1 - p;
    double choose = 1;
    for (int m = 0; m <= n; ++m)
    {
        out[m] = choose * std::pow(p, m) * std::pow(q, n - m);
        choose = choose * (n - m) / (m + 1);
    }
}

ChannelProbabilities loss_probabilities(Vec2 b, TransferField const& field,
                                        ProjectileSpec const& proj,
                                        IonizationTable const& table,
                                        double excluded_radius)
{
    for (Vec2 s : field.projections())
    {
        if (!(norm(b - s) > 0))
        {
            throw DomainError("loss_probabilities: b coincides with an atom "
                              "projection");
        }
    }
    ChannelProbabilities result;
    result.p_ion = ionization_at(b, field, table, proj.z_eff(), excluded_radius);
    result.channel.resize(proj.electrons() + 1);
    binomial_channels(result.p_ion, proj.electrons(), result.channel);
    return result;
}

std::vector<CrossSectionResult>
cross_section_fixed(CollisionSystem const& system, Orientation const& orient,
                    QuadratureOptions const& opts)
{
    check_system(system);
    auto const problem = make_problem(system, orient, opts);
    int const n = system.projectile.electrons();
    double const z_eff = system.projectile.z_eff();
    IonizationTable const& table = *system.table;

    auto integrand = [&](Vec2 b, std::span<double> out) {
        double const p = ionization_at(b, problem.field, table, z_eff,
                                       opts.excluded_radius);
        double channels[4];
        binomial_channels(p, n, channels);
        for (int m = 1; m <= n; ++m)
        {
            out[m - 1] = channels[m];
        }
    };
    auto const integral = integrate_b_plane(n, integrand, problem.domain,
                                            integration_options(opts));
    std::vector<CrossSectionResult> results;
    for (int m = 1; m <= n; ++m)
    {
        results.push_back(make_result(m, integral.value[m - 1], integral.error[m - 1]));
    }
    return results;
}

CrossSectionResult ionization_area(CollisionSystem const& system,
                                   Orientation const& orient,
                                   QuadratureOptions const& opts)
{
    check_system(system);
    auto const problem = make_problem(system, orient, opts);
    double const z_eff = system.projectile.z_eff();
    IonizationTable const& table = *system.table;
    auto integrand = [&](Vec2 b, std::span<double> out) {
        out[0] = ionization_at(b, problem.field, table, z_eff, opts.excluded_radius);
    };
    auto const integral = integrate_b_plane(1, integrand, problem.domain,
                                            integration_options(opts));
    return make_result(0, integral.value[0], integral.error[0]);
}

std::vector<CrossSectionResult>
cross_section_theta(CollisionSystem const& system, double theta,
                    QuadratureOptions const& opts)
{
    return cross_section_fixed(system, Orientation(theta, 0), opts);
}

PhiInvarianceCheck check_phi_invariance(CollisionSystem const& system,
                                        double theta, double phi,
                                        QuadratureOptions const& opts)
{
    auto const a = cross_section_fixed(system, Orientation(theta, 0), opts);
    auto const b = cross_section_fixed(system, Orientation(theta, phi), opts);
    PhiInvarianceCheck check{true, 0};
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double const combined = a[i].quad_error + b[i].quad_error;
        double const diff = std::abs(a[i].sigma_au - b[i].sigma_au);
        double const ratio = combined > 0 ? diff / combined : (diff > 0 ? INFINITY : 0);
        check.worst_ratio = std::max(check.worst_ratio, ratio);
    }
    check.passed = check.worst_ratio <= 3;
    return check;
}

//---------------------------------------------------------------------------//
std::vector<double> default_theta_grid(int points)
{
    if (points < 2)
    {
        throw ConfigError("theta grid needs at least 2 points");
    }
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
    {
        grid[i] = half_pi * i / (points - 1);
    }
    grid.back() = half_pi;
    return grid;
}

OrientationScan delta_scan(CollisionSystem const& system,
                           std::span<double const> theta_grid,
                           ScanOptions const& opts)
{
    check_system(system);
    if (theta_grid.empty())
    {
        throw ConfigError("delta_scan: empty theta grid");
    }
    for (double t : theta_grid)
    {
        if (!(t >= 0 && t <= half_pi))
        {
            throw ConfigError("delta_scan: theta values must lie in [0, pi/2]");
        }
    }
    int const n = system.projectile.electrons();
    std::size_t const points = theta_grid.size();

    // Task layout: [0, points) grid angles, then sigma_perp, then the two
    // phi-invariance evaluations.
    struct Task
    {
        double theta;
        double phi;
    };
    std::vector<Task> tasks;
    for (double t : theta_grid)
    {
        tasks.push_back({t, 0});
    }
    tasks.push_back({half_pi, 0});
    if (opts.phi_check)
    {
        tasks.push_back({0.25 * std::numbers::pi, 0});
        tasks.push_back({0.25 * std::numbers::pi, *opts.phi_check});
    }
    std::vector<std::vector<CrossSectionResult>> results(tasks.size());
    detail::parallel_for(tasks.size(), opts.threads, [&](std::size_t i) {
        // Grid points at pi/2 share the sigma_perp evaluation.
        if (i < points && tasks[i].theta == half_pi)
        {
            return;
        }
        results[i] = cross_section_fixed(
            system, Orientation(tasks[i].theta, tasks[i].phi), opts.quadrature);
    });

    if (opts.phi_check)
    {
        auto const& a = results[points + 1];
        auto const& b = results[points + 2];
        for (int m = 0; m < n; ++m)
        {
            double const combined = a[m].quad_error + b[m].quad_error;
            if (std::abs(a[m].sigma_au - b[m].sigma_au) > 3 * combined)
            {
                throw ConvergenceError(
                    "delta_scan: phi invariance violated for channel m="
                        + std::to_string(m + 1),
                    {a[m].sigma_au, b[m].sigma_au}, {a[m].quad_error, b[m].quad_error},
                    0);
            }
        }
    }

    OrientationScan scan;
    scan.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    scan.sigma_perp = results[points];
    scan.sigma.assign(n, {});
    scan.delta.assign(n, {});
    for (int m = 0; m < n; ++m)
    {
        double const perp = scan.sigma_perp[m].sigma_au;
        if (!(perp > 0))
        {
            throw DomainError("delta_scan: sigma_perp vanishes for channel m="
                              + std::to_string(m + 1) + " (degenerate system)");
        }
        for (std::size_t i = 0; i < points; ++i)
        {
            auto const& r = theta_grid[i] == half_pi ? scan.sigma_perp[m] : results[i][m];
            scan.sigma[m].push_back(r);
            scan.delta[m].push_back(theta_grid[i] == half_pi ? 0.0
                                                             : (r.sigma_au - perp) / perp);
        }
    }
    return scan;
}

// Panel edges in theta for the average: halving towards theta = 0, where
// sigma(theta) has a narrow peak of width ~ 1/L in theta.
std::vector<double> average_panel_edges(int halvings)
{
    std::vector<double> edges{0.0};
    for (int j = halvings; j >= 0; --j)
    {
        edges.push_back(std::ldexp(half_pi, -j));
    }
    return edges;
}

OrientationAverage orientation_average(CollisionSystem const& system, int nodes,
                                       ScanOptions const& opts)
{
    check_system(system);
    if (nodes < 2)
    {
        throw ConfigError("orientation_average: need at least 2 nodes per panel");
    }
    int const n = system.projectile.electrons();
    auto const edges = average_panel_edges(average_halvings);

    // Composite Gauss-Legendre in u = cos(theta) on each panel, at the full
    // and half order. Weights sum to 1 over u in [0, 1].
    std::vector<double> thetas{half_pi};
    std::vector<double> fine_w;
    std::vector<double> coarse_w;
    std::size_t const fine_begin = thetas.size();
    for (int order : {nodes, nodes / 2})
    {
        for (std::size_t p = 0; p + 1 < edges.size(); ++p)
        {
            double const u_hi = std::cos(edges[p]);
            double const u_lo = std::cos(edges[p + 1]);
            auto const [u, w] = detail::gauss_legendre(order, u_lo, u_hi);
            for (std::size_t i = 0; i < u.size(); ++i)
            {
                thetas.push_back(std::acos(u[i]));
                (order == nodes ? fine_w : coarse_w).push_back(w[i]);
            }
        }
    }
    std::size_t const coarse_begin = fine_begin + fine_w.size();

    std::vector<std::vector<CrossSectionResult>> results(thetas.size());
    detail::parallel_for(thetas.size(), opts.threads, [&](std::size_t i) {
        results[i] = cross_section_fixed(system, Orientation(thetas[i], 0),
                                         opts.quadrature);
    });

    OrientationAverage avg;
    avg.sigma_perp = results[0];
    for (int m = 0; m < n; ++m)
    {
        double fine = 0;
        double fine_err = 0;
        for (std::size_t i = 0; i < fine_w.size(); ++i)
        {
            fine += fine_w[i] * results[fine_begin + i][m].sigma_au;
            fine_err += fine_w[i] * results[fine_begin + i][m].quad_error;
        }
        double coarse = 0;
        for (std::size_t i = 0; i < coarse_w.size(); ++i)
        {
            coarse += coarse_w[i] * results[coarse_begin + i][m].sigma_au;
        }
        avg.sigma_avg.push_back(make_result(m + 1, fine, std::abs(fine - coarse) + fine_err));
        double const perp = avg.sigma_perp[m].sigma_au;
        if (!(perp > 0))
        {
            throw DomainError("orientation_average: sigma_perp vanishes for "
                              "channel m=" + std::to_string(m + 1));
        }
        avg.relative_correction.push_back((fine - perp) / perp);
    }
    return avg;
}
}  // namespace ionloss
