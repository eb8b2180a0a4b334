#ifndef MYSTERY_ERRORS_HPP
#define MYSTERY_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace mystery
{

// Argument outside the domain of a function: std::domain_error is used as is.

/// Evaluation point too close to a singularity (pole of sn, zero of cn) or to
/// the boundary of the fundamental rectangle.
class pole_proximity_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A series failed to reach its tolerance within the iteration cap.
class convergence_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature refinement exhausted its level budget. Carries the last estimate
/// and the difference between the two finest levels.
class accuracy_error : public std::runtime_error
{
public:
    accuracy_error(const std::string &what, std::complex<double> best_estimate, double error_estimate)
        : std::runtime_error(what), m_best(best_estimate), m_err(error_estimate)
    {
    }
    std::complex<double> best_estimate() const
    {
        return m_best;
    }
    double error_estimate() const
    {
        return m_err;
    }

private:
    std::complex<double> m_best;
    double m_err;
};

} // namespace mystery

#endif
