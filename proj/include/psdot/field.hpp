#pragma once

// Matrix-valued fields sampled on a FrequencyGrid, flat storage in grid
// order. PsdField holds Hermitian values (the spectral densities); FactorField
// holds general complex matrices (spectral factors, all-pass fields);
// WeightField is a PsdField alias whose coercivity the distance routines
// check at the point of use.

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "psdot/grid.hpp"
#include "psdot/hermlin.hpp"

namespace psdot {

/// General complex m x m matrices on a grid (spectral factors, couplings, ...).
class FactorField {
public:
    FactorField() = default;

    FactorField(FrequencyGrid grid, int m, std::vector<ComplexMatrix> values)
        : grid_(std::move(grid)), m_(m), values_(std::move(values)) {
        if (m_ <= 0) throw ShapeError("FactorField: matrix dimension must be positive");
        if (values_.size() != grid_.point_count())
            throw ShapeError("FactorField: value count does not match grid");
        for (const auto& v : values_)
            if (v.rows() != m_ || v.cols() != m_)
                throw ShapeError("FactorField: value has wrong shape");
    }

    const FrequencyGrid& grid() const { return grid_; }
    int m() const { return m_; }
    std::size_t size() const { return values_.size(); }
    const ComplexMatrix& value(std::size_t flat) const { return values_[flat]; }
    const std::vector<ComplexMatrix>& values() const { return values_; }

private:
    FrequencyGrid grid_;
    int m_ = 0;
    std::vector<ComplexMatrix> values_;
};

/// Hermitian matrix field: a sampled power spectral density. Construction
/// checks shape and Hermitian structure only; positivity is a semantic
/// property checked by validate_field / the operations that require it.
class PsdField {
public:
    PsdField() = default;

    PsdField(FrequencyGrid grid, int m, std::vector<HermitianMatrix> values)
        : grid_(std::move(grid)), m_(m), values_(std::move(values)) {
        if (m_ <= 0) throw ShapeError("PsdField: matrix dimension must be positive");
        if (values_.size() != grid_.point_count())
            throw ShapeError("PsdField: value count does not match grid");
        for (const auto& v : values_)
            if (v.dim() != m_)
                throw ShapeError("PsdField: value has wrong shape");
    }

    const FrequencyGrid& grid() const { return grid_; }
    int m() const { return m_; }
    std::size_t size() const { return values_.size(); }
    const HermitianMatrix& value(std::size_t flat) const { return values_[flat]; }
    const std::vector<HermitianMatrix>& values() const { return values_; }

    /// Largest absolute entry over the whole field (scale for tolerances).
    double max_abs() const {
        double s = 0.0;
        for (const auto& v : values_) s = std::max(s, v.max_abs());
        return s;
    }

    /// Constant field: the same matrix at every grid point.
    static PsdField constant(const FrequencyGrid& grid, const HermitianMatrix& value) {
        return PsdField(grid, value.dim(),
                        std::vector<HermitianMatrix>(grid.point_count(), value));
    }

private:
    FrequencyGrid grid_;
    int m_ = 0;
    std::vector<HermitianMatrix> values_;
};

/// A weight field is structurally a PsdField; semantically it must be
/// uniformly coercive, which weighted operations verify before use.
using WeightField = PsdField;

struct PointSpectrumRange {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct FieldValidation {
    std::vector<PointSpectrumRange> per_point; // grid order
    double global_lambda_min = 0.0;
    double global_lambda_max = 0.0;
    double psd_tol = 0.0;      // slack used for the positivity verdict
    double coercive_tol = 0.0; // threshold used for the coercivity verdict
    bool psd_pass = false;      // every lambda_min >= -psd_tol
    bool coercive_pass = false; // every lambda_min >= coercive_tol
    std::optional<std::vector<int>> first_psd_failure;      // multi-index
    std::optional<std::vector<int>> first_coercive_failure; // multi-index
};

/// Eigenvalue sweep over the field. Negative tolerance arguments select the
/// relative defaults 1e-10 * scale (positivity slack) and 1e-8 * scale
/// (coercivity floor), with scale the largest absolute entry of the field
/// (floored at 1 so the zero field is not vacuously coercive).
inline FieldValidation validate_field(const PsdField& phi, double coercive_tol = -1.0,
                                      double psd_tol = -1.0) {
    FieldValidation report;
    report.per_point.reserve(phi.size());
    const double scale = std::max(phi.max_abs(), 1.0);
    report.psd_tol = psd_tol < 0.0 ? 1e-10 * scale : psd_tol;
    report.coercive_tol = coercive_tol < 0.0 ? 1e-8 * scale : coercive_tol;

    report.global_lambda_min = std::numeric_limits<double>::infinity();
    report.global_lambda_max = -std::numeric_limits<double>::infinity();
    report.psd_pass = true;
    report.coercive_pass = true;
    for (std::size_t p = 0; p < phi.size(); ++p) {
        const Eigen::VectorXd lam = eigenvalues_hermitian(phi.value(p));
        PointSpectrumRange range{lam(0), lam(lam.size() - 1)};
        report.per_point.push_back(range);
        report.global_lambda_min = std::min(report.global_lambda_min, range.lambda_min);
        report.global_lambda_max = std::max(report.global_lambda_max, range.lambda_max);
        if (range.lambda_min < -report.psd_tol && report.psd_pass) {
            report.psd_pass = false;
            report.first_psd_failure = phi.grid().unflatten(p);
        }
        if (range.lambda_min < report.coercive_tol && report.coercive_pass) {
            report.coercive_pass = false;
            report.first_coercive_failure = phi.grid().unflatten(p);
        }
    }
    return report;
}

inline std::string format_index(const std::vector<int>& index) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < index.size(); ++i)
        os << (i ? "," : "") << index[i];
    os << ")";
    return os.str();
}

/// Throw unless the weight field is uniformly coercive.
inline void require_coercive(const WeightField& omega, double coercive_tol = -1.0) {
    const FieldValidation report = validate_field(omega, coercive_tol);
    if (!report.coercive_pass) {
        throw NotCoerciveError("weight field not uniformly coercive at grid point " +
                                   format_index(*report.first_coercive_failure),
                               report.global_lambda_min);
    }
}

/// Check that two fields live on identical grids with identical matrix size.
inline void require_compatible(const PsdField& a, const PsdField& b, const char* what) {
    if (a.m() != b.m())
        throw ShapeError(std::string(what) + ": matrix dimensions differ");
    if (a.grid() != b.grid())
        throw ShapeError(std::string(what) + ": fields live on different grids");
}

/// Phi = W W^* pointwise, from a spectral factor.
inline PsdField psd_from_factor(const FactorField& w) {
    std::vector<HermitianMatrix> values;
    values.reserve(w.size());
    for (std::size_t p = 0; p < w.size(); ++p) {
        const ComplexMatrix prod = w.value(p) * w.value(p).adjoint();
        values.push_back(HermitianMatrix::from(prod));
    }
    return PsdField(w.grid(), w.m(), std::move(values));
}

} // namespace psdot
