#include "ionloss/b_plane_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "ionloss/errors.hpp"

namespace ionloss
{
namespace
{
// Genz-Malik rule for two dimensions on [-1, 1]^2.
constexpr double lambda2 = 0.35856858280031809;  // sqrt(9/70)
constexpr double lambda4 = 0.94868329805051380;  // sqrt(9/10), also lambda3
constexpr double lambda5 = 0.68824720161168529;  // sqrt(9/19)
constexpr double w1 = -3816.0 / 19683.0;
constexpr double w2 = 980.0 / 6561.0;
constexpr double w3 = 1020.0 / 19683.0;
constexpr double w4 = 200.0 / 19683.0;
constexpr double w5 = 6859.0 / 19683.0 / 4.0;
constexpr double v1 = -971.0 / 729.0;
constexpr double v2 = 245.0 / 486.0;
constexpr double v3 = 65.0 / 1458.0;
constexpr double v4 = 25.0 / 729.0;
constexpr double fourth_difference_ratio = (9.0 / 70.0) / (9.0 / 10.0);
constexpr int points_per_cell = 17;

struct Cell
{
    Vec2 center;
    Vec2 half;
    int depth;
    int split_axis;
};

class Engine
{
  public:
    Engine(std::size_t components, BPlaneIntegrand const& f)
        : nc_(components), f_(f), buffer_(components)
    {
    }

    // Evaluate a cell, appending its value and error.
    void evaluate(Cell& cell, double* value, double* error)
    {
        std::vector<double> sum2(nc_, 0.0), sum3(nc_, 0.0), sum4(nc_, 0.0),
            sum5(nc_, 0.0), center(nc_, 0.0);
        std::array<std::vector<double>, 2> d2{std::vector<double>(nc_, 0.0),
                                              std::vector<double>(nc_, 0.0)};
        std::array<std::vector<double>, 2> d3 = d2;

        sample(cell.center, center, 1.0);
        double const hx = cell.half.x;
        double const hy = cell.half.y;
        for (int axis = 0; axis < 2; ++axis)
        {
            for (double sign : {-1.0, 1.0})
            {
                Vec2 const e2 = axis == 0 ? Vec2{sign * lambda2 * hx, 0}
                                          : Vec2{0, sign * lambda2 * hy};
                Vec2 const e3 = axis == 0 ? Vec2{sign * lambda4 * hx, 0}
                                          : Vec2{0, sign * lambda4 * hy};
                sample(cell.center + e2, d2[axis], 1.0);
                sample(cell.center + e3, d3[axis], 1.0);
            }
        }
        for (double sx : {-1.0, 1.0})
        {
            for (double sy : {-1.0, 1.0})
            {
                sample(cell.center + Vec2{sx * lambda4 * hx, sy * lambda4 * hy},
                       sum4, 1.0);
                sample(cell.center + Vec2{sx * lambda5 * hx, sy * lambda5 * hy},
                       sum5, 1.0);
            }
        }

        double const volume = 4 * hx * hy;
        std::array<double, 2> diff{0, 0};
        for (std::size_t c = 0; c < nc_; ++c)
        {
            sum2[c] = d2[0][c] + d2[1][c];
            sum3[c] = d3[0][c] + d3[1][c];
            double const i7 = volume
                              * (w1 * center[c] + w2 * sum2[c] + w3 * sum3[c]
                                 + w4 * sum4[c] + w5 * sum5[c]);
            double const i5 = volume
                              * (v1 * center[c] + v2 * sum2[c] + v3 * sum3[c]
                                 + v4 * sum4[c]);
            value[c] = i7;
            error[c] = std::abs(i7 - i5);
            for (int axis = 0; axis < 2; ++axis)
            {
                diff[axis] += std::abs(d2[axis][c] - 2 * center[c]
                                       - fourth_difference_ratio
                                             * (d3[axis][c] - 2 * center[c]));
            }
        }
        evaluations_ += points_per_cell;
        if (diff[0] == diff[1])
        {
            cell.split_axis = hx >= hy ? 0 : 1;
        }
        else
        {
            cell.split_axis = diff[0] > diff[1] ? 0 : 1;
        }
    }

    void sample(Vec2 point, std::vector<double>& accumulate, double weight)
    {
        std::fill(buffer_.begin(), buffer_.end(), 0.0);
        f_(point, buffer_);
        for (std::size_t c = 0; c < nc_; ++c)
        {
            accumulate[c] += weight * buffer_[c];
        }
    }

    double peak(Vec2 point)
    {
        std::fill(buffer_.begin(), buffer_.end(), 0.0);
        f_(point, buffer_);
        double result = 0;
        for (double v : buffer_)
        {
            result = std::max(result, std::abs(v));
        }
        return result;
    }

    std::size_t evaluations() const { return evaluations_; }

  private:
    std::size_t nc_;
    BPlaneIntegrand const& f_;
    std::vector<double> buffer_;
    std::size_t evaluations_ = 0;
};

std::vector<double> graded_breakpoints(double lo, double hi,
                                       std::vector<double> const& anchors,
                                       double inner, double outer)
{
    std::vector<double> points{lo, hi};
    for (double a : anchors)
    {
        points.push_back(a);
        for (double g = outer; g >= inner; g *= 0.5)
        {
            points.push_back(a - g);
            points.push_back(a + g);
        }
    }
    std::vector<double> kept;
    for (double p : points)
    {
        if (p >= lo && p <= hi)
        {
            kept.push_back(p);
        }
    }
    std::sort(kept.begin(), kept.end());
    double const min_gap = 1e-12 * (hi - lo);
    std::vector<double> unique{kept.front()};
    for (double p : kept)
    {
        if (p - unique.back() > min_gap)
        {
            unique.push_back(p);
        }
    }
    if (hi - unique.back() <= min_gap)
    {
        unique.back() = hi;
    }
    else
    {
        unique.push_back(hi);
    }
    return unique;
}

double choose_b_max(Engine& engine, BPlaneDomain const& domain, Vec2 center)
{
    double radius = 1;
    for (Vec2 p : domain.points_of_interest)
    {
        radius = std::max(radius, norm(p - center) + 1);
    }

    double peak = 0;
    std::vector<Vec2> probes = domain.points_of_interest;
    if (probes.empty())
    {
        probes.push_back(center);
    }
    for (Vec2 p : probes)
    {
        for (double r = domain.grading_inner * 10; r <= radius; r *= 4)
        {
            for (int k = 0; k < 8; ++k)
            {
                double const a = 2 * std::numbers::pi * (k + 0.5) / 8;
                peak = std::max(peak, engine.peak(p + Vec2{r * std::cos(a),
                                                           r * std::sin(a)}));
            }
        }
    }
    if (peak == 0)
    {
        return radius;
    }

    constexpr int ring_points = 64;
    for (int iter = 0; iter < 200; ++iter)
    {
        double ring = 0;
        for (int k = 0; k < ring_points; ++k)
        {
            double const a = 2 * std::numbers::pi * (k + 0.5) / ring_points;
            ring = std::max(ring, engine.peak(center + Vec2{radius * std::cos(a),
                                                            radius * std::sin(a)}));
        }
        if (ring <= domain.cutoff_ratio * peak)
        {
            return radius;
        }
        radius *= 1.25;
    }
    throw ConvergenceError("integrate_b_plane: integrand does not decay; "
                           "no outer cutoff found",
                           {}, {}, 0);
}
}  // namespace

IntegrationResult integrate_b_plane(std::size_t components,
                                    BPlaneIntegrand const& integrand,
                                    BPlaneDomain const& domain,
                                    IntegrationOptions const& options)
{
    if (components == 0)
    {
        throw ConfigError("integrate_b_plane: need at least one component");
    }
    if (!(options.rel_tol >= 0) || !(options.abs_tol >= 0)
        || (options.rel_tol == 0 && options.abs_tol == 0))
    {
        throw ConfigError("integrate_b_plane: need a positive tolerance");
    }

    Engine engine(components, integrand);

    // Domain square.
    Vec2 center{};
    if (!domain.quarter_symmetric && !domain.points_of_interest.empty())
    {
        for (Vec2 p : domain.points_of_interest)
        {
            center += p;
        }
        center = (1.0 / domain.points_of_interest.size()) * center;
    }
    double const b_max = domain.b_max ? *domain.b_max
                                      : choose_b_max(engine, domain, center);
    if (!(b_max > 0))
    {
        throw ConfigError("integrate_b_plane: b_max must be positive");
    }

    std::vector<double> ax;
    std::vector<double> ay;
    for (Vec2 p : domain.points_of_interest)
    {
        ax.push_back(domain.quarter_symmetric ? std::abs(p.x) : p.x);
        ay.push_back(domain.quarter_symmetric ? std::abs(p.y) : p.y);
    }
    double const x_lo = domain.quarter_symmetric ? 0 : center.x - b_max;
    double const y_lo = domain.quarter_symmetric ? 0 : center.y - b_max;
    auto const xs = graded_breakpoints(x_lo, center.x + b_max, ax,
                                       domain.grading_inner, domain.grading_outer);
    auto const ys = graded_breakpoints(y_lo, center.y + b_max, ay,
                                       domain.grading_inner, domain.grading_outer);

    std::size_t const nc = components;
    std::vector<Cell> cells;
    std::vector<double> values;
    std::vector<double> errors;
    auto add_cell = [&](Cell cell) {
        std::size_t const idx = cells.size();
        values.resize((idx + 1) * nc);
        errors.resize((idx + 1) * nc);
        engine.evaluate(cell, &values[idx * nc], &errors[idx * nc]);
        cells.push_back(cell);
    };
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j)
        {
            add_cell({{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])},
                      {0.5 * (xs[i + 1] - xs[i]), 0.5 * (ys[j + 1] - ys[j])},
                      0,
                      0});
        }
    }

    std::vector<double> total(nc);
    std::vector<double> total_err(nc);
    std::vector<double> scale(nc);
    auto recompute_totals = [&] {
        std::fill(total.begin(), total.end(), 0.0);
        std::fill(total_err.begin(), total_err.end(), 0.0);
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            for (std::size_t c = 0; c < nc; ++c)
            {
                total[c] += values[i * nc + c];
                total_err[c] += errors[i * nc + c];
            }
        }
    };
    auto update_scale = [&] {
        for (std::size_t c = 0; c < nc; ++c)
        {
            scale[c] = std::max({options.abs_tol, options.rel_tol * std::abs(total[c]),
                                 1e-300});
        }
    };
    auto priority = [&](std::size_t i) {
        double p = 0;
        for (std::size_t c = 0; c < nc; ++c)
        {
            p = std::max(p, errors[i * nc + c] / scale[c]);
        }
        return p;
    };
    auto converged = [&] {
        for (std::size_t c = 0; c < nc; ++c)
        {
            double const target = std::max(options.abs_tol,
                                           options.rel_tol * std::abs(total[c]));
            if (total_err[c] > target)
            {
                return false;
            }
        }
        return true;
    };

    using Entry = std::pair<double, std::size_t>;
    struct EntryLess
    {
        bool operator()(Entry const& a, Entry const& b) const
        {
            return a.first < b.first || (a.first == b.first && a.second > b.second);
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, EntryLess> heap;
    auto rebuild_heap = [&] {
        recompute_totals();
        update_scale();
        heap = {};
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            heap.push({priority(i), i});
        }
    };
    rebuild_heap();
    std::size_t next_rebuild = 2 * cells.size();
    int max_depth = 0;
    double const min_half = 1e-14 * b_max;

    while (!converged())
    {
        if (engine.evaluations() >= options.max_evaluations || heap.empty()
            || heap.top().first == 0)
        {
            recompute_totals();
            std::vector<double> scaled_value = total;
            std::vector<double> scaled_err = total_err;
            double const factor = domain.quarter_symmetric ? 4 : 1;
            for (std::size_t c = 0; c < nc; ++c)
            {
                scaled_value[c] *= factor;
                scaled_err[c] *= factor;
            }
            std::ostringstream msg;
            msg << "integrate_b_plane: no convergence after "
                << engine.evaluations() << " evaluations (depth " << max_depth
                << ")";
            throw ConvergenceError(msg.str(), scaled_value, scaled_err, max_depth);
        }
        std::size_t const idx = heap.top().second;
        heap.pop();
        Cell parent = cells[idx];
        double const h = parent.split_axis == 0 ? parent.half.x : parent.half.y;
        if (h < min_half)
        {
            // Too small to split; keep its error but stop selecting it.
            heap.push({0.0, idx});
            continue;
        }
        for (std::size_t c = 0; c < nc; ++c)
        {
            total[c] -= values[idx * nc + c];
            total_err[c] -= errors[idx * nc + c];
        }
        Cell left = parent;
        Cell right = parent;
        left.depth = right.depth = parent.depth + 1;
        max_depth = std::max(max_depth, left.depth);
        if (parent.split_axis == 0)
        {
            left.half.x = right.half.x = 0.5 * parent.half.x;
            left.center.x -= left.half.x;
            right.center.x += right.half.x;
        }
        else
        {
            left.half.y = right.half.y = 0.5 * parent.half.y;
            left.center.y -= left.half.y;
            right.center.y += right.half.y;
        }
        engine.evaluate(left, &values[idx * nc], &errors[idx * nc]);
        cells[idx] = left;
        add_cell(right);
        std::size_t const ridx = cells.size() - 1;
        for (std::size_t i : {idx, ridx})
        {
            for (std::size_t c = 0; c < nc; ++c)
            {
                total[c] += values[i * nc + c];
                total_err[c] += errors[i * nc + c];
            }
        }
        if (cells.size() >= next_rebuild)
        {
            rebuild_heap();
            next_rebuild = 2 * cells.size();
        }
        else
        {
            heap.push({priority(idx), idx});
            heap.push({priority(ridx), ridx});
        }
    }

    recompute_totals();
    IntegrationResult result;
    double const factor = domain.quarter_symmetric ? 4 : 1;
    result.value.resize(nc);
    result.error.resize(nc);
    for (std::size_t c = 0; c < nc; ++c)
    {
        result.value[c] = factor * total[c];
        result.error[c] = factor * total_err[c];
    }
    result.evaluations = engine.evaluations();
    result.max_depth = max_depth;
    result.b_max = b_max;
    return result;
}
}  // namespace ionloss
