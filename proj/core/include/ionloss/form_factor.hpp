#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ionloss
{
//---------------------------------------------------------------------------//
/*!
 * Projectile ion with 1..3 electrons in equivalent hydrogenic 1s orbitals.
 *
 * The effective charge defaults to Z - N_P + 1, the charge seen by an
 * electron once the other N_P - 1 are accounted for.
 */
class ProjectileSpec
{
  public:
    ProjectileSpec(int z_nucleus, int electrons,
                   std::optional<double> z_eff = std::nullopt);

    static ProjectileSpec fe25() { return {26, 1}; }
    static ProjectileSpec fe24() { return {26, 2}; }
    static ProjectileSpec fe23() { return {26, 3}; }

    int z_nucleus() const { return z_nucleus_; }
    int electrons() const { return electrons_; }
    //! Asymptotic ("visible") charge Z - N_P.
    int charge_state() const { return z_nucleus_ - electrons_; }
    double z_eff() const { return z_eff_; }

  private:
    int z_nucleus_;
    int electrons_;
    double z_eff_;
};

//---------------------------------------------------------------------------//
//! |<1s| exp(-i q.r) |1s>| = (1 + q^2 / 4 Z^2)^-2.
double elastic_form_factor(double q, double z_eff);

//! Probability of remaining in any bound state after a sudden kick of scaled
//! magnitude s = q / Z_eff, summing shells n <= n_max plus a C/n^3 tail.
double bound_survival_probability(double s, int n_max = 20);

//! Per-shell totals sum_{l,m} |<nlm| exp(-i q.r) |1s>|^2 for n = 1..n_max.
std::vector<double> bound_shell_probabilities(double s, int n_max);

//! W_ion(s) = 1 - P_bound(s), clipped to [0, 1].
double ionization_probability(double s, int n_max = 20);

//---------------------------------------------------------------------------//
/*!
 * Tabulated W_ion(s) with monotone piecewise-cubic interpolation.
 *
 * Past the last node the table returns the elastic-only bound
 * 1 - F(s)^2. Immutable once built; safe for concurrent reads.
 */
class IonizationTable
{
  public:
    static IonizationTable build(double s_max = 20, int n_points = 400,
                                 int n_max = 20);

    //! Wrap caller-provided samples (ascending grid from s = 0, values in
    //! [0, 1], non-decreasing). Throws ConfigError on invalid data.
    static IonizationTable from_samples(std::vector<double> s_grid,
                                        std::vector<double> w_values);

    double operator()(double s) const;

    //! Limit s -> infinity, used inside excluded disks around nuclei.
    double saturation() const { return 1.0; }

    std::vector<double> const& s_grid() const { return s_; }
    std::vector<double> const& w_values() const { return w_; }
    double s_max() const { return s_.back(); }
    int n_max() const { return n_max_; }
    //! Nodes whose raw 1 - P_bound fell outside [0, 1] and were clipped.
    int clipped_nodes() const { return clipped_; }

    //! CSV `s,w_ion` with 17 significant digits.
    void write_csv(std::ostream& out) const;
    static IonizationTable read_csv(std::istream& in);

  private:
    IonizationTable() = default;
    void compute_slopes();

    std::vector<double> s_;
    std::vector<double> w_;
    std::vector<double> slope_;
    int n_max_ = 0;
    int clipped_ = 0;
};
}  // namespace ionloss
