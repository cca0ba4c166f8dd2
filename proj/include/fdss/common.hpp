#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdss {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using dvec = std::vector<double>;

/// Bad user input: malformed configs, dimension mismatches, out-of-range values.
/// The CLI maps this to a distinct exit code from runtime failures.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Runtime failure during simulation or optimization: degenerate filters,
/// insufficient Monte Carlo samples, non-finite losses.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdss
