#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace psdot {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative kernel (eigensolver, SVD) failed to converge, or a computed
/// quantity violated an internal sanity bound.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A matrix expected to be positive semidefinite has an eigenvalue below the
/// clipping tolerance.
class NotPsdError : public Error {
public:
    NotPsdError(const std::string& what, double lambda_min)
        : Error(what), lambda_min(lambda_min) {}
    double lambda_min;
};

/// A matrix expected to be coercive (uniformly positive definite) has an
/// eigenvalue below the coercivity tolerance.
class NotCoerciveError : public Error {
public:
    NotCoerciveError(const std::string& what, double lambda_min)
        : Error(what), lambda_min(lambda_min) {}
    double lambda_min;
};

/// Incompatible dimensions or grids.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A rational factor denominator is (nearly) zero at a grid point.
class NearPoleError : public Error {
public:
    NearPoleError(const std::string& what, std::vector<int> index)
        : Error(what), index(std::move(index)) {}
    std::vector<int> index;
};

/// A covariance field violates its symmetry invariant, or a transform left a
/// residual that should not be there (non-Hermitian spectrum, complex lags).
class CovarianceError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or unsupported field-spec content.
class SpecError : public Error {
public:
    using Error::Error;
};

} // namespace psdot
