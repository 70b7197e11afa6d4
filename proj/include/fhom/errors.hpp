#ifndef FHOM_ERRORS_HPP
#define FHOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fhom
{
// Numerical machinery exhausted its refinement budget (quadrature, series, fits).
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Measured rates are incompatible with the count-rate model (negative discriminant).
class inconsistent_data_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Transition probability solved from data falls outside [0,1] beyond tolerance.
class unphysical_data_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Inputs make the inversion formulas degenerate (zero staying rates, r_tilde = 0, ...).
class degenerate_input_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Configuration violates a type invariant or the file schema.
class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Least-squares fit failed (rank-deficient design, iteration budget exceeded).
class fit_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Fock-space truncation leaks more probability than the requested threshold.
class truncation_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace fhom

#endif
