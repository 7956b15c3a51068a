#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace ionloss::detail
{
// Nodes and weights of the n-point Gauss-Legendre rule mapped to [a, b].
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(int n, double a, double b)
{
    std::vector<double> x(n);
    std::vector<double> w(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1;
            double p1 = z;
            for (int k = 2; k <= n; ++k)
            {
                double const p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1)
            {
                p0 = 1;
                p1 = z;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            double const dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
            {
                break;
            }
        }
        double const weight = 2 / ((1 - z * z) * dp * dp);
        double const half = 0.5 * (b - a);
        double const mid = 0.5 * (b + a);
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        w[i] = w[n - 1 - i] = half * weight;
    }
    return {x, w};
}
}  // namespace ionloss::detail
