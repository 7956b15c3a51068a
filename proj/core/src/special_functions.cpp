#include "ionloss/special_functions.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ionloss/errors.hpp"

namespace ionloss
{
namespace
{
constexpr double euler_gamma = 0.57721566490153286061;
constexpr double series_limit = 2.0;

void check_argument(double x, char const* name)
{
    if (!(x > 0) || !std::isfinite(x))
    {
        throw DomainError(std::string(name) + ": argument must be positive "
                          "and finite, got " + std::to_string(x));
    }
}

// Ascending series, 0 < x <= 2:
//   K0 = -(ln(x/2) + gamma) I0 + sum_k t_k H_k
//   K1 = 1/x + ln(x/2) I1 - (x/4) sum_k u_k [psi(k+1) + psi(k+2)]
// with t_k = (x^2/4)^k / (k!)^2 and u_k = (x^2/4)^k / (k! (k+1)!).
BesselK01 small_argument(double x)
{
    double const y = 0.25 * x * x;
    double const log_half = std::log(0.5 * x);

    double t = 1;  // t_k
    double u = 1;  // u_k
    double i0 = 1;
    double i1_sum = 1;  // I1 = (x/2) sum u_k
    double harmonic = 0;  // H_k
    double k0_tail = 0;
    double k1_tail = -2 * euler_gamma + 1;  // psi(1) + psi(2)

    for (int k = 1; k < 60; ++k)
    {
        t *= y / (double(k) * k);
        u *= y / (double(k) * (k + 1));
        harmonic += 1.0 / k;
        i0 += t;
        i1_sum += u;
        k0_tail += t * harmonic;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        double const term = u * (-2 * euler_gamma + 2 * harmonic + 1.0 / (k + 1));
        k1_tail += term;
        if (t < 1e-18 * i0 && std::abs(term) < 1e-18 * std::abs(k1_tail))
        {
            break;
        }
    }
    double const i1 = 0.5 * x * i1_sum;

    BesselK01 result;
    result.k0 = -(log_half + euler_gamma) * i0 + k0_tail;
    result.k1 = 1 / x + log_half * i1 - 0.25 * x * k1_tail;
    return result;
}

// Steed/Temme continued fraction for x > 2, returning e^x K0 and e^x K1.
BesselK01 large_argument_scaled(double x)
{
    double b = 2 * (1 + x);
    double d = 1 / b;
    double h = d;
    double delh = d;
    double q1 = 0;
    double q2 = 1;
    double const a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1 + q * delh;
    for (int i = 1; i < 100000; ++i)
    {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        double const qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2;
        d = 1 / (b + a * d);
        delh = (b * d - 1) * delh;
        h += delh;
        double const dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17)
        {
            break;
        }
    }
    h *= a1;
    BesselK01 result;
    result.k0 = std::sqrt(std::numbers::pi / (2 * x)) / s;
    result.k1 = result.k0 * (x + 0.5 - h) / x;
    return result;
}

double underflow_guard(double scaled, double x)
{
    double const value = scaled * std::exp(-x);
    return value < DBL_MIN ? 0.0 : value;
}
}  // namespace

BesselK01 bessel_k01(double x)
{
    check_argument(x, "bessel_k01");
    if (x <= series_limit)
    {
        return small_argument(x);
    }
    auto const scaled = large_argument_scaled(x);
    return {underflow_guard(scaled.k0, x), underflow_guard(scaled.k1, x)};
}

double bessel_k0(double x)
{
    check_argument(x, "bessel_k0");
    return bessel_k01(x).k0;
}

double bessel_k1(double x)
{
    check_argument(x, "bessel_k1");
    return bessel_k01(x).k1;
}

void spherical_bessel_j(int lmax, double x, std::span<double> out)
{
    if (lmax < 0 || out.size() < static_cast<std::size_t>(lmax) + 1)
    {
        throw DomainError("spherical_bessel_j: output span too small");
    }
    if (!(x >= 0) || !std::isfinite(x))
    {
        throw DomainError("spherical_bessel_j: argument must be finite and "
                          "non-negative");
    }
    if (x == 0)
    {
        std::fill(out.begin(), out.begin() + lmax + 1, 0.0);
        out[0] = 1;
        return;
    }
    if (x < 1e-8)
    {
        // Leading terms of x^l / (2l+1)!! (1 - x^2 / (2 (2l+3)))
        double term = 1;
        for (int l = 0; l <= lmax; ++l)
        {
            out[l] = term * (1 - x * x / (2.0 * (2 * l + 3)));
            term *= x / (2 * l + 3);
        }
        return;
    }
    if (x > lmax)
    {
        double const sx = std::sin(x);
        double const cx = std::cos(x);
        out[0] = sx / x;
        if (lmax >= 1)
        {
            out[1] = sx / (x * x) - cx / x;
        }
        for (int l = 1; l < lmax; ++l)
        {
            out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1];
        }
        return;
    }

    // Downward recurrence from well above max(l, x).
    int const start = lmax + 20 + static_cast<int>(std::sqrt(40.0 * (lmax + 1)));
    double next = 0;      // j_{l+1}
    double current = 1;  // j_l, arbitrary scale
    double norm_sum = 0;
    constexpr double rescale_at = 1e100;
    for (int l = start; l >= 0; --l)
    {
        if (l <= lmax)
        {
            out[l] = current;
        }
        norm_sum += (2 * l + 1) * current * current;
        if (std::abs(current) > rescale_at)
        {
            current /= rescale_at;
            next /= rescale_at;
            norm_sum /= rescale_at * rescale_at;
            for (int k = l; k <= lmax; ++k)
            {
                out[k] /= rescale_at;
            }
        }
        if (l == 0)
        {
            break;
        }
        double const previous = (2 * l + 1) / x * current - next;
        next = current;
        current = previous;
    }
    // Fix the overall sign against whichever of j_0, j_1 is better conditioned.
    double const exact0 = std::sin(x) / x;
    double const exact1 = std::sin(x) / (x * x) - std::cos(x) / x;
    double const sign = std::abs(exact0) > std::abs(exact1)
                            ? exact0 * out[0]
                            : exact1 * out[1];
    double const scale = std::copysign(1.0 / std::sqrt(norm_sum), sign);
    for (int l = 0; l <= lmax; ++l)
    {
        out[l] *= scale;
    }
}
}  // namespace ionloss
