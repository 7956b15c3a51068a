#include "ionloss/form_factor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ionloss/errors.hpp"
#include "ionloss/special_functions.hpp"

namespace ionloss
{
namespace
{
constexpr double zeta3 = 1.2020569031595942854;
constexpr double radial_cutoff = 70;

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr std::array<double, 8> gl16_x = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> gl16_w = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

// Normalised hydrogenic radial function R_nl(r) for unit charge.
double hydrogenic_radial(int n, int l, double r)
{
    double const rho = 2 * r / n;
    // generalised Laguerre L_{n-l-1}^{(2l+1)}(rho) by upward recurrence
    int const k_max = n - l - 1;
    double const alpha = 2 * l + 1;
    double lag_prev = 1;
    double lag = 1;
    if (k_max >= 1)
    {
        lag = 1 + alpha - rho;
        for (int k = 1; k < k_max; ++k)
        {
            double const next
                = ((2 * k + 1 + alpha - rho) * lag - (k + alpha) * lag_prev)
                  / (k + 1);
            lag_prev = lag;
            lag = next;
        }
    }
    double const log_norm
        = 0.5
          * (3 * std::log(2.0 / n) + std::lgamma(n - l) - std::log(2.0 * n)
             - std::lgamma(n + l + 1));
    double const log_envelope = log_norm - 0.5 * rho + l * std::log(rho);
    return std::exp(log_envelope) * lag;
}

// Radial overlaps I_nl(s) = int R_nl j_l(s r) R_10 r^2 dr for all n <= n_max.
class OverlapEngine
{
  public:
    OverlapEngine(int n_max, double s_largest)
        : n_max_(n_max), pairs_(n_max * (n_max + 1) / 2)
    {
        double const panel = std::min(0.25, 2.0 / std::max(s_largest, 1.0));
        int const panels = static_cast<int>(std::ceil(radial_cutoff / panel));
        double const width = radial_cutoff / panels;
        nodes_.reserve(panels * 16);
        for (int p = 0; p < panels; ++p)
        {
            double const mid = (p + 0.5) * width;
            for (int i = 0; i < 8; ++i)
            {
                double const dx = 0.5 * width * gl16_x[i];
                nodes_.push_back({mid - dx, 0.5 * width * gl16_w[i]});
                nodes_.push_back({mid + dx, 0.5 * width * gl16_w[i]});
            }
        }
        kernel_.resize(nodes_.size() * pairs_);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
        {
            double const r = nodes_[i].r;
            double const base = nodes_[i].w * 2 * std::exp(-r) * r * r;
            std::size_t idx = 0;
            for (int n = 1; n <= n_max_; ++n)
            {
                for (int l = 0; l < n; ++l)
                {
                    kernel_[i * pairs_ + idx++] = base * hydrogenic_radial(n, l, r);
                }
            }
        }
    }

    // Shell totals T_n = sum_l (2l+1) I_nl^2, n = 1..n_max.
    std::vector<double> shells(double s) const
    {
        std::vector<double> overlap(pairs_, 0.0);
        std::vector<double> jl(n_max_);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
        {
            spherical_bessel_j(n_max_ - 1, s * nodes_[i].r, jl);
            double const* k = &kernel_[i * pairs_];
            std::size_t idx = 0;
            for (int n = 1; n <= n_max_; ++n)
            {
                for (int l = 0; l < n; ++l, ++idx)
                {
                    overlap[idx] += k[idx] * jl[l];
                }
            }
        }
        std::vector<double> totals(n_max_, 0.0);
        std::size_t idx = 0;
        for (int n = 1; n <= n_max_; ++n)
        {
            for (int l = 0; l < n; ++l, ++idx)
            {
                totals[n - 1] += (2 * l + 1) * overlap[idx] * overlap[idx];
            }
        }
        return totals;
    }

  private:
    struct Node
    {
        double r;
        double w;
    };
    int n_max_;
    std::size_t pairs_;
    std::vector<Node> nodes_;
    std::vector<double> kernel_;
};

// Sum of shells plus a least-squares C/n^3 tail fitted to the last three.
double survival_from_shells(std::vector<double> const& shells)
{
    int const n_max = static_cast<int>(shells.size());
    double total = 0;
    for (double t : shells)
    {
        total += t;
    }
    if (n_max < 3)
    {
        return total;
    }
    double num = 0;
    double den = 0;
    double partial_zeta = 0;
    for (int n = 1; n <= n_max; ++n)
    {
        partial_zeta += 1.0 / (double(n) * n * n);
    }
    for (int n = n_max - 2; n <= n_max; ++n)
    {
        double const inv3 = 1.0 / (double(n) * n * n);
        num += shells[n - 1] * inv3;
        den += inv3 * inv3;
    }
    double const c = num / den;
    return total + c * (zeta3 - partial_zeta);
}

void check_scaled_momentum(double s, char const* name)
{
    if (!(s >= 0) || !std::isfinite(s))
    {
        throw DomainError(std::string(name)
                          + ": scaled momentum transfer must be >= 0");
    }
}

void check_n_max(int n_max, char const* name)
{
    if (n_max < 1)
    {
        throw DomainError(std::string(name) + ": n_max must be >= 1");
    }
}
}  // namespace

//---------------------------------------------------------------------------//
ProjectileSpec::ProjectileSpec(int z_nucleus, int electrons,
                               std::optional<double> z_eff)
    : z_nucleus_(z_nucleus)
    , electrons_(electrons)
    , z_eff_(z_eff.value_or(z_nucleus - electrons + 1))
{
    if (electrons_ < 1 || electrons_ > 3)
    {
        throw DomainError("ProjectileSpec: supported electron counts are 1..3, "
                          "got " + std::to_string(electrons_));
    }
    if (z_nucleus_ - electrons_ < 1)
    {
        throw DomainError("ProjectileSpec: charge state Z - N_P must be >= 1");
    }
    if (!(z_eff_ > 0) || !std::isfinite(z_eff_))
    {
        throw DomainError("ProjectileSpec: effective charge must be positive");
    }
}

//---------------------------------------------------------------------------//
double elastic_form_factor(double q, double z_eff)
{
    if (!(q >= 0) || !std::isfinite(q))
    {
        throw DomainError("elastic_form_factor: q must be >= 0");
    }
    if (!(z_eff > 0))
    {
        throw DomainError("elastic_form_factor: Z_eff must be > 0");
    }
    double const s = q / z_eff;
    double const denom = 1 + 0.25 * s * s;
    return 1 / (denom * denom);
}

std::vector<double> bound_shell_probabilities(double s, int n_max)
{
    check_scaled_momentum(s, "bound_shell_probabilities");
    check_n_max(n_max, "bound_shell_probabilities");
    return OverlapEngine(n_max, s).shells(s);
}

double bound_survival_probability(double s, int n_max)
{
    check_scaled_momentum(s, "bound_survival_probability");
    check_n_max(n_max, "bound_survival_probability");
    if (s == 0)
    {
        return 1;
    }
    auto const shells = OverlapEngine(n_max, s).shells(s);
    return std::clamp(survival_from_shells(shells), 0.0, 1.0);
}

double ionization_probability(double s, int n_max)
{
    check_scaled_momentum(s, "ionization_probability");
    return std::clamp(1 - bound_survival_probability(s, n_max), 0.0, 1.0);
}

//---------------------------------------------------------------------------//
IonizationTable IonizationTable::build(double s_max, int n_points, int n_max)
{
    if (!(s_max >= 20) || n_points < 200 || n_max < 10)
    {
        std::ostringstream msg;
        msg << "IonizationTable: need s_max >= 20, n_points >= 200, "
               "n_max >= 10 (got s_max="
            << s_max << ", n_points=" << n_points << ", n_max=" << n_max << ")";
        throw ConfigError(msg.str());
    }

    IonizationTable table;
    table.n_max_ = n_max;
    table.s_.resize(n_points);
    table.w_.resize(n_points);

    OverlapEngine const engine(n_max, s_max);
    // Quadratic grading: W ~ s^2 near 0 is then reproduced by the 3-point
    // slopes, and small kicks keep their relative accuracy.
    for (int i = 0; i < n_points; ++i)
    {
        double const x = double(i) / (n_points - 1);
        double const s = i + 1 == n_points ? s_max : s_max * x * x;
        table.s_[i] = s;
        if (i == 0)
        {
            table.w_[i] = 0;
            continue;
        }
        double const raw = 1 - survival_from_shells(engine.shells(s));
        if (raw < 0 || raw > 1)
        {
            ++table.clipped_;
        }
        table.w_[i] = std::clamp(raw, 0.0, 1.0);
    }
    // Round-off near saturation can break monotonicity at the 1e-12 level.
    for (int i = 1; i < n_points; ++i)
    {
        if (table.w_[i] < table.w_[i - 1])
        {
            if (table.w_[i - 1] - table.w_[i] > 1e-10)
            {
                throw ConvergenceError(
                    "IonizationTable: W_ion not monotone near s="
                        + std::to_string(table.s_[i]),
                    {table.w_[i - 1], table.w_[i]}, {}, n_max);
            }
            table.w_[i] = table.w_[i - 1];
        }
    }
    table.compute_slopes();
    return table;
}

IonizationTable IonizationTable::from_samples(std::vector<double> s_grid,
                                              std::vector<double> w_values)
{
    if (s_grid.size() < 2 || s_grid.size() != w_values.size())
    {
        throw ConfigError("IonizationTable: need >= 2 samples of equal length");
    }
    if (s_grid.front() != 0 || w_values.front() != 0)
    {
        throw ConfigError("IonizationTable: grid must start at s = 0 with W = 0");
    }
    for (std::size_t i = 0; i < s_grid.size(); ++i)
    {
        if (!(w_values[i] >= 0 && w_values[i] <= 1))
        {
            throw ConfigError("IonizationTable: W outside [0, 1] at row "
                              + std::to_string(i));
        }
        if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
        {
            throw ConfigError("IonizationTable: s grid not ascending at row "
                              + std::to_string(i));
        }
        if (i > 0 && w_values[i] < w_values[i - 1])
        {
            throw ConfigError("IonizationTable: W decreasing at row "
                              + std::to_string(i));
        }
    }
    IonizationTable table;
    table.s_ = std::move(s_grid);
    table.w_ = std::move(w_values);
    table.compute_slopes();
    return table;
}

// Three-point slopes limited by the Hyman filter; keeps the interpolant
// monotone on monotone data.
void IonizationTable::compute_slopes()
{
    std::size_t const n = s_.size();
    slope_.assign(n, 0.0);
    std::vector<double> h(n - 1);
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        h[i] = s_[i + 1] - s_[i];
        delta[i] = (w_[i + 1] - w_[i]) / h[i];
    }
    if (n == 2)
    {
        slope_[0] = slope_[1] = delta[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        slope_[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    }
    slope_[0] = ((2 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
    slope_[n - 1] = ((2 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3])
                    / (h[n - 2] + h[n - 3]);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const left = i > 0 ? delta[i - 1] : delta[0];
        double const right = i + 1 < n ? delta[i] : delta[n - 2];
        if (left * right <= 0)
        {
            slope_[i] = 0;
            continue;
        }
        double const bound = 3 * std::min(std::abs(left), std::abs(right));
        slope_[i] = std::copysign(std::min(std::abs(slope_[i]), bound), left);
        if (slope_[i] * left < 0)
        {
            slope_[i] = 0;
        }
    }
}

double IonizationTable::operator()(double s) const
{
    if (!(s >= 0))
    {
        throw DomainError("IonizationTable: s must be >= 0");
    }
    if (s >= s_.back())
    {
        double const f = elastic_form_factor(s, 1.0);
        return 1 - f * f;
    }
    std::size_t const i
        = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin())
          - 1;
    double const h = s_[i + 1] - s_[i];
    double const t = (s - s_[i]) / h;
    double const t2 = t * t;
    double const t3 = t2 * t;
    double const h00 = 2 * t3 - 3 * t2 + 1;
    double const h10 = t3 - 2 * t2 + t;
    double const h01 = -2 * t3 + 3 * t2;
    double const h11 = t3 - t2;
    return h00 * w_[i] + h10 * h * slope_[i] + h01 * w_[i + 1] + h11 * h * slope_[i + 1];
}

void IonizationTable::write_csv(std::ostream& out) const
{
    out << "s,w_ion\n";
    char line[64];
    for (std::size_t i = 0; i < s_.size(); ++i)
    {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", s_[i], w_[i]);
        out << line;
    }
}

IonizationTable IonizationTable::read_csv(std::istream& in)
{
    std::vector<double> s;
    std::vector<double> w;
    std::string line;
    bool header = false;
    int row = 0;
    while (std::getline(in, line))
    {
        ++row;
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        if (!header)
        {
            if (line.rfind("s,w_ion", 0) != 0)
            {
                throw LoadError("ionization table CSV: missing 's,w_ion' header");
            }
            header = true;
            continue;
        }
        double sv = 0;
        double wv = 0;
        char tail = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf%c", &sv, &wv, &tail) < 2)
        {
            throw LoadError("ionization table CSV: bad row " + std::to_string(row));
        }
        s.push_back(sv);
        w.push_back(wv);
    }
    try
    {
        return from_samples(std::move(s), std::move(w));
    }
    catch (ConfigError const& e)
    {
        throw LoadError(std::string("ionization table CSV: ") + e.what());
    }
}
}  // namespace ionloss
