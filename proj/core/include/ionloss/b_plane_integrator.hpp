#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ionloss/vec.hpp"

namespace ionloss
{
//! Vector-valued integrand over the impact-parameter plane.
using BPlaneIntegrand = std::function<void(Vec2, std::span<double>)>;

struct BPlaneDomain
{
    //! Points where the integrand has structure (atom projections). The
    //! initial partition is graded geometrically towards each of them.
    std::vector<Vec2> points_of_interest;
    //! Integrand is even in x and in y: integrate one quadrant, times 4.
    bool quarter_symmetric = false;
    //! Half-width of the integration square. Chosen by ring search when unset.
    std::optional<double> b_max;
    //! Ring search stops once the integrand on the ring is below this
    //! fraction of its peak.
    double cutoff_ratio = 1e-10;
    double grading_inner = 1e-6;
    double grading_outer = 1.0;
};

struct IntegrationOptions
{
    double rel_tol = 1e-3;
    double abs_tol = 0;
    std::size_t max_evaluations = 20'000'000;
};

struct IntegrationResult
{
    std::vector<double> value;
    std::vector<double> error;
    std::size_t evaluations = 0;
    int max_depth = 0;
    double b_max = 0;
};

/*!
 * Globally adaptive 2-D cubature with the degree-7/5 embedded Genz-Malik
 * rule. Cells are bisected along the coordinate with the largest fourth
 * difference until every component satisfies
 * error <= max(abs_tol, rel_tol |value|).
 *
 * The cell sequence is deterministic. Throws ConvergenceError (carrying the
 * best estimate) when the evaluation budget is exhausted.
 */
IntegrationResult integrate_b_plane(std::size_t components,
                                    BPlaneIntegrand const& integrand,
                                    BPlaneDomain const& domain,
                                    IntegrationOptions const& options = {});
}  // namespace ionloss
