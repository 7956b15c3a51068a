#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionloss
{
//! Argument outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Malformed or inconsistent input data file.
class LoadError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Invalid run configuration or parameter set.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A numerical procedure stopped before reaching its requested accuracy.
//! Carries the best estimate available at the point of failure.
class ConvergenceError : public std::runtime_error
{
  public:
    ConvergenceError(std::string const& what,
                     std::vector<double> best_estimate,
                     std::vector<double> error_estimate,
                     int depth_reached)
        : std::runtime_error(what)
        , best_estimate_(std::move(best_estimate))
        , error_estimate_(std::move(error_estimate))
        , depth_reached_(depth_reached)
    {
    }

    std::vector<double> const& best_estimate() const { return best_estimate_; }
    std::vector<double> const& error_estimate() const
    {
        return error_estimate_;
    }
    int depth_reached() const { return depth_reached_; }

  private:
    std::vector<double> best_estimate_;
    std::vector<double> error_estimate_;
    int depth_reached_;
};
}  // namespace ionloss
