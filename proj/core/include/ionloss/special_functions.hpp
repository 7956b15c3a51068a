#pragma once

#include <span>

namespace ionloss
{
//---------------------------------------------------------------------------//
/*!
 * Modified Bessel functions of the second kind (McDonald functions).
 *
 * Relative accuracy is better than 1e-12 on [1e-8, 700]. Arguments past the
 * double underflow threshold return exactly zero. Non-positive, NaN, or
 * infinite arguments throw DomainError.
 */
double bessel_k0(double x);
double bessel_k1(double x);

//! K0 and K1 together (shares the continued fraction for x > 2).
struct BesselK01
{
    double k0;
    double k1;
};
BesselK01 bessel_k01(double x);

//---------------------------------------------------------------------------//
/*!
 * Spherical Bessel functions j_0(x) .. j_lmax(x) written into \c out, which
 * must hold lmax + 1 values. Upward recurrence when x > lmax, otherwise
 * Miller downward recurrence normalised by the sum rule
 * sum (2l+1) j_l^2 = 1.
 */
void spherical_bessel_j(int lmax, double x, std::span<double> out);
}  // namespace ionloss
