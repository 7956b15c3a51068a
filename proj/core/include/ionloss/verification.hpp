#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ionloss/cross_section.hpp"

namespace ionloss
{
//! Monte-Carlo estimate with its one-sigma statistical error.
struct McEstimate
{
    double value = 0;
    double std_error = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct McOptions
{
    int threads = 1;
    //! Samples per independently seeded block.
    std::size_t block_size = 8192;
    double excluded_radius = 1e-6;
    //! Scale of the exponential radial component (bohr).
    double radial_scale = 1.0;
};

/*!
 * Importance-sampled estimate of sigma^{m+}(theta, phi) in bohr^2, one entry
 * per channel m = 1..N_P.
 *
 * Points are drawn around a uniformly chosen atom projection with a radial
 * distance taken from an equal mixture of an exponential and a log-uniform
 * law. Each block of samples owns a generator (mt19937_64) seeded from
 * (seed, block index), and block sums are reduced in block order, so the
 * result does not depend on the thread count.
 */
std::vector<McEstimate> mc_cross_section(CollisionSystem const& system,
                                         Orientation const& orient,
                                         std::size_t n_samples,
                                         std::uint64_t seed,
                                         McOptions const& opts = {});

/*!
 * W_ion(s) from the continuum side: the squared 1s -> (k, l) matrix element
 * of exp(-i q.r), summed over partial waves and integrated over k. Coulomb
 * waves are integrated outward with Numerov's method from a power-series
 * start normalised on the momentum scale.
 */
double continuum_ionization_oracle(double s);

//! d W_ion / d k at momentum k of the ejected electron (same construction).
double continuum_ionization_density(double s, double k);

//! K_order(x), order 0 or 1, from its integral representation in extended
//! precision. Slow.
double bessel_reference(double x, int order);

//! I_order(x), order 0 or 1, same approach.
double bessel_i_reference(double x, int order);
}  // namespace ionloss
