#include "ionloss/verification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "ionloss/detail/gauss_legendre.hpp"
#include "ionloss/detail/parallel.hpp"
#include "ionloss/errors.hpp"

namespace ionloss
{
namespace
{
constexpr double two_pi = 2 * std::numbers::pi;

//---------------------------------------------------------------------------//
// Monte-Carlo
//---------------------------------------------------------------------------//
std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform on [0, 1) from the top 53 bits; independent of the library's
// distribution implementations.
double unit_uniform(std::mt19937_64& gen)
{
    return double(gen() >> 11) * 0x1.0p-53;
}

class RadialProposal
{
  public:
    explicit RadialProposal(double scale) : scale_(scale) {}

    double sample(std::mt19937_64& gen) const
    {
        double const pick = unit_uniform(gen);
        double const u = unit_uniform(gen);
        if (pick < 0.5)
        {
            return -scale_ * std::log1p(-u);
        }
        return r_lo_ * std::exp(u * log_span_);
    }

    // Density in the plane at distance r from the center.
    double plane_density(double r) const
    {
        double radial = 0.5 * std::exp(-r / scale_) / scale_;
        if (r >= r_lo_ && r < r_hi_)
        {
            radial += 0.5 / (r * log_span_);
        }
        return radial / (two_pi * r);
    }

  private:
    double scale_;
    double r_lo_ = 1e-8;
    double r_hi_ = 50;
    double log_span_ = std::log(r_hi_ / r_lo_);
};
}  // namespace

std::vector<McEstimate> mc_cross_section(CollisionSystem const& system,
                                         Orientation const& orient,
                                         std::size_t n_samples,
                                         std::uint64_t seed,
                                         McOptions const& opts)
{
    if (n_samples < 10'000)
    {
        throw ConfigError("mc_cross_section: need at least 10^4 samples");
    }
    if (!system.table)
    {
        throw ConfigError("mc_cross_section: no ionization table");
    }
    int const n = system.projectile.electrons();
    double const z_eff = system.projectile.z_eff();
    auto const projections = transverse_positions(system.geometry, orient);
    std::vector<HfsAtom> atoms;
    for (auto const& placed : system.geometry.atoms())
    {
        atoms.push_back(placed.atom);
    }
    TransferField const field(projections, atoms, system.beam.velocity_au);
    IonizationTable const& table = *system.table;
    RadialProposal const proposal(opts.radial_scale);

    std::size_t const block = std::max<std::size_t>(opts.block_size, 1);
    std::size_t const blocks = (n_samples + block - 1) / block;
    // [block][2 * channel + {0: sum, 1: sum of squares}]
    std::vector<std::vector<double>> sums(blocks, std::vector<double>(2 * n));

    detail::parallel_for(blocks, opts.threads, [&](std::size_t ib) {
        std::mt19937_64 gen(splitmix64(seed ^ splitmix64(ib + 1)));
        std::size_t const count = std::min(block, n_samples - ib * block);
        auto& acc = sums[ib];
        double channels[4];
        for (std::size_t i = 0; i < count; ++i)
        {
            auto const center = projections[std::min<std::size_t>(
                std::size_t(unit_uniform(gen) * projections.size()),
                projections.size() - 1)];
            double const r = proposal.sample(gen);
            double const angle = two_pi * unit_uniform(gen);
            Vec2 const b{center.x + r * std::cos(angle), center.y + r * std::sin(angle)};

            double density = 0;
            for (Vec2 s : projections)
            {
                double const d = norm(b - s);
                density += d > 0 ? proposal.plane_density(d) : INFINITY;
            }
            density /= double(projections.size());

            auto const sample = field.at(b, opts.excluded_radius);
            double const p = sample.min_distance <= opts.excluded_radius
                                 ? table.saturation()
                                 : table(sample.kick.magnitude() / z_eff);
            binomial_channels(p, n, channels);
            for (int m = 0; m < n; ++m)
            {
                double const f = std::isinf(density) ? 0.0 : channels[m + 1] / density;
                acc[2 * m] += f;
                acc[2 * m + 1] += f * f;
            }
        }
    });

    std::vector<McEstimate> result(n);
    double const count = double(n_samples);
    for (int m = 0; m < n; ++m)
    {
        double sum = 0;
        double sum_sq = 0;
        for (auto const& acc : sums)
        {
            sum += acc[2 * m];
            sum_sq += acc[2 * m + 1];
        }
        double const mean = sum / count;
        double const var = std::max(0.0, sum_sq / count - mean * mean);
        result[m] = {mean, std::sqrt(var / (count - 1)), n_samples, seed};
    }
    return result;
}

//---------------------------------------------------------------------------//
// Continuum route
//---------------------------------------------------------------------------//
namespace
{
constexpr double continuum_r_max = 30.0;
constexpr double base_step = 0.005;
constexpr int max_partial_wave = 1500;

// Radial grid r_i = i h on [0, r_max] with j_l(q r_i) rows filled on demand.
class BesselGrid
{
  public:
    BesselGrid(double q, double h) : q_(q), h_(h)
    {
        int points = int(std::ceil(continuum_r_max / h));
        points += points % 2;
        size_ = points + 1;
    }

    std::size_t size() const { return size_; }
    double step() const { return h_; }

    std::vector<double> const& row(int l)
    {
        while (int(rows_.size()) <= l)
        {
            unsigned const order = rows_.size();
            std::vector<double> values(size_);
            for (std::size_t i = 0; i < size_; ++i)
            {
                // libstdc++ reports an underflowed j_l as NaN.
                double const j = std::sph_bessel(order, q_ * h_ * double(i));
                values[i] = std::isnan(j) ? 0.0 : j;
            }
            rows_.push_back(std::move(values));
        }
        return rows_[l];
    }

  private:
    double q_;
    double h_;
    std::size_t size_;
    std::vector<std::vector<double>> rows_;
};

// ln of sqrt(2/pi) C_l(eta) k^{l+1} for eta = -1/k, so that the regular
// Coulomb wave is sqrt(2/pi) C_l (kr)^{l+1} (1 + O(r)) and tends to
// sqrt(2/pi) sin(...) at large r.
double log_origin_normalization(int l, double k)
{
    double const eta = 1 / k;
    double const two_pi_eta = two_pi * eta;
    double value = 0.5 * std::log(two_pi_eta / -std::expm1(-two_pi_eta));
    value += l * std::log(2.0);
    for (int j = 1; j <= l; ++j)
    {
        value += 0.5 * std::log(double(j) * j + eta * eta);
    }
    value -= std::lgamma(2.0 * l + 2);
    value += (l + 1) * std::log(k);
    value += 0.5 * std::log(2 / std::numbers::pi);
    return value;
}

// sum_n B_n r^n with n (n + 2l + 1) B_n = -2 B_{n-1} - k^2 B_{n-2}.
long double origin_series(int l, long double k, long double r)
{
    long double prev = 0;
    long double cur = 1;
    long double sum = 1;
    long double power = 1;
    for (int n = 1; n < 4000; ++n)
    {
        long double const next
            = (-2 * cur - k * k * prev) / (static_cast<long double>(n) * (n + 2 * l + 1));
        prev = cur;
        cur = next;
        power *= r;
        long double const term = cur * power;
        sum += term;
        if (n > 4 && std::abs(term) < 1e-22L * std::abs(sum)
            && std::abs(prev * power / r) < 1e-20L * std::abs(sum))
        {
            return sum;
        }
    }
    throw ConvergenceError("continuum oracle: origin series did not converge",
                           {double(sum)}, {}, 0);
}

// (2l+1) |<k l| j_l(q r) |1s>|^2 for one partial wave.
double partial_wave_term(int l, double k, BesselGrid& grid)
{
    double const h = grid.step();
    std::size_t const size = grid.size();
    double const ll = double(l) * (l + 1);
    auto g = [&](double r) { return ll / (r * r) - 2 / r - k * k; };

    // Series start where the centrifugal term is mild enough for Numerov.
    double const r_start = std::max(2 * h, 5.3 * h * (l + 1));
    std::size_t const i_start = std::min<std::size_t>(
        size - 1, std::max<std::size_t>(2, std::size_t(std::ceil(r_start / h))));
    double const r_ref = h * double(i_start);

    // v(r) = (r / r_ref)^{l+1} * series, so the physical wave is
    // exp(log_norm + (l+1) ln r_ref) * v.
    std::vector<double> v(size, 0.0);
    for (std::size_t i = 1; i <= i_start; ++i)
    {
        double const r = h * double(i);
        double const scale = std::exp((l + 1) * std::log(r / r_ref));
        v[i] = scale * double(origin_series(l, k, r));
    }
    double const c = h * h / 12;
    double g_prev = g(h * double(i_start - 1));
    double g_cur = g(h * double(i_start));
    for (std::size_t i = i_start; i + 1 < size; ++i)
    {
        double const g_next = g(h * double(i + 1));
        v[i + 1] = (2 * v[i] * (1 + 5 * c * g_cur) - v[i - 1] * (1 - c * g_prev))
                   / (1 - c * g_next);
        g_prev = g_cur;
        g_cur = g_next;
    }

    auto const& jl = grid.row(l);
    double integral = 0;
    for (std::size_t i = 1; i < size; ++i)
    {
        double const r = h * double(i);
        double const weight = (i == size - 1) ? 1 : (i % 2 ? 4 : 2);
        integral += weight * v[i] * jl[i] * 2 * std::exp(-r) * r;
    }
    integral *= h / 3;
    if (integral == 0)
    {
        return 0;
    }
    double const log_amp = log_origin_normalization(l, k) + (l + 1) * std::log(r_ref)
                           + std::log(std::abs(integral));
    return (2 * l + 1) * std::exp(2 * log_amp);
}

class ContinuumDensity
{
  public:
    explicit ContinuumDensity(double q) : q_(q) {}

    double operator()(double k)
    {
        auto& grid = grid_for(k);
        double sum = 0;
        int small_run = 0;
        double const l_floor = 2 + std::max(k, q_);
        for (int l = 0; l <= max_partial_wave; ++l)
        {
            double const term = partial_wave_term(l, k, grid);
            sum += term;
            small_run = (term <= 1e-9 * sum) ? small_run + 1 : 0;
            if (l > l_floor && small_run >= 2)
            {
                return sum;
            }
        }
        throw ConvergenceError("continuum oracle: partial-wave sum did not "
                               "converge at k=" + std::to_string(k),
                               {sum}, {}, max_partial_wave);
    }

  private:
    BesselGrid& grid_for(double k)
    {
        int level = 0;
        while (base_step / double(1 << level) > 0.1 / (k + q_ + 1))
        {
            ++level;
        }
        auto it = grids_.find(level);
        if (it == grids_.end())
        {
            it = grids_.emplace(level, BesselGrid(q_, base_step / double(1 << level))).first;
        }
        return it->second;
    }

    double q_;
    std::map<int, BesselGrid> grids_;
};

double panel_integral(ContinuumDensity& density, double lo, double hi)
{
    auto const [nodes, weights] = detail::gauss_legendre(8, lo, hi);
    double sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        sum += weights[i] * density(nodes[i]);
    }
    return sum;
}
}  // namespace

double continuum_ionization_density(double s, double k)
{
    if (!(s > 0) || !(k > 0) || !std::isfinite(s) || !std::isfinite(k))
    {
        throw DomainError("continuum_ionization_density: s and k must be "
                          "positive and finite");
    }
    ContinuumDensity density(s);
    return density(k);
}

double continuum_ionization_oracle(double s)
{
    if (!(s > 0) || !std::isfinite(s))
    {
        throw DomainError("continuum_ionization_oracle: s must be positive and finite");
    }
    ContinuumDensity density(s);
    constexpr double width = 1.0;
    constexpr double panel_tol = 1e-8;
    double const start = width * std::floor(s / width);

    double total = panel_integral(density, start, start + width);
    // Downward towards k = 0.
    for (double lo = start - width; lo >= 0; lo -= width)
    {
        double const part = panel_integral(density, lo, lo + width);
        total += part;
        if (part < panel_tol * total)
        {
            break;
        }
    }
    // Upward past the ridge at k ~ s.
    for (double lo = start + width;; lo += width)
    {
        double const part = panel_integral(density, lo, lo + width);
        total += part;
        if (lo > s + 3 && lo > 3 && part < panel_tol * total)
        {
            break;
        }
        if (lo > s + 200)
        {
            throw ConvergenceError("continuum oracle: k integral did not converge",
                                   {total}, {part}, 0);
        }
    }
    return total;
}

//---------------------------------------------------------------------------//
// Reference Bessel functions
//---------------------------------------------------------------------------//
namespace
{
void check_reference_args(double x, int order, char const* name)
{
    if (!(x > 0) || !std::isfinite(x) || (order != 0 && order != 1))
    {
        throw DomainError(std::string(name) + ": need x > 0 and order 0 or 1");
    }
}
}  // namespace

// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt. The integrand is analytic
// in a strip and decays doubly exponentially, so the trapezoid rule
// converges geometrically in 1/h.
double bessel_reference(double x, int order)
{
    check_reference_args(x, order, "bessel_reference");
    long double const lx = x;
    long double const h = std::min(0.02L, 0.1L / std::sqrt(lx));
    long double sum = 0.5L;  // t = 0, scaled by exp(x)
    for (int i = 1;; ++i)
    {
        long double const t = h * i;
        long double const term
            = std::exp(-lx * (std::cosh(t) - 1)) * std::cosh(order * t);
        sum += term;
        if (term < 1e-24L * sum)
        {
            break;
        }
    }
    return double(h * sum * std::exp(-lx));
}

// I_n(x) = (1/pi) int_0^pi exp(x cos t) cos(n t) dt; the integrand is smooth
// and periodic, so the trapezoid rule is spectrally accurate.
double bessel_i_reference(double x, int order)
{
    check_reference_args(x, order, "bessel_i_reference");
    long double const lx = x;
    int const panels = 64 + 8 * int(std::ceil(x));
    long double const h = std::numbers::pi_v<long double> / panels;
    long double sum = 0;
    for (int i = 0; i <= panels; ++i)
    {
        long double const t = h * i;
        long double const w = (i == 0 || i == panels) ? 0.5L : 1.0L;
        sum += w * std::exp(lx * (std::cos(t) - 1)) * std::cos(order * t);
    }
    return double(sum * h / std::numbers::pi_v<long double> * std::exp(lx));
}
}  // namespace ionloss
