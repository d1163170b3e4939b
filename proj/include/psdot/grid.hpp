#pragma once

// Uniform tensor grid over the d-torus. One abstraction serves both regimes:
// on a discrete torus the points are the exact frequencies and sums over them
// are exact; for continuous spectra the same points act as a rectangle rule
// for the normalized measure (on a torus the trapezoid and rectangle rules
// coincide). weight() * point_count() == 1 either way.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "psdot/errors.hpp"

namespace psdot {

enum class DomainKind {
    ContinuousQuadrature, // grid approximates an integral over the torus
    DiscreteTorus,        // grid IS the frequency set of a periodic field
};

inline std::string to_string(DomainKind k) {
    return k == DomainKind::DiscreteTorus ? "periodic" : "continuous";
}

class FrequencyGrid {
public:
    FrequencyGrid() = default;

    FrequencyGrid(std::vector<int> sizes, DomainKind domain)
        : sizes_(std::move(sizes)), domain_(domain) {
        if (sizes_.empty())
            throw ShapeError("FrequencyGrid: need at least one dimension");
        for (int n : sizes_)
            if (n <= 0)
                throw ShapeError("FrequencyGrid: sizes must be positive");
    }

    int dim() const { return static_cast<int>(sizes_.size()); }
    const std::vector<int>& sizes() const { return sizes_; }
    DomainKind domain() const { return domain_; }

    std::size_t point_count() const {
        std::size_t n = 1;
        for (int s : sizes_) n *= static_cast<std::size_t>(s);
        return n;
    }

    double weight() const { return 1.0 / static_cast<double>(point_count()); }

    /// Row-major flattening, last dimension fastest.
    std::size_t flatten(const std::vector<int>& index) const {
        std::size_t flat = 0;
        for (int i = 0; i < dim(); ++i)
            flat = flat * static_cast<std::size_t>(sizes_[i]) +
                   static_cast<std::size_t>(index[i]);
        return flat;
    }

    std::vector<int> unflatten(std::size_t flat) const {
        std::vector<int> index(sizes_.size());
        for (int i = dim() - 1; i >= 0; --i) {
            const auto n = static_cast<std::size_t>(sizes_[i]);
            index[i] = static_cast<int>(flat % n);
            flat /= n;
        }
        return index;
    }

    /// Angles theta_i = 2*pi * l_i / N_i for the flat point index.
    /// Dividing before multiplying keeps coincident points of an N-grid and
    /// a 2N-grid bitwise identical.
    std::vector<double> angles(std::size_t flat) const {
        std::vector<int> index = unflatten(flat);
        std::vector<double> theta(index.size());
        for (int i = 0; i < dim(); ++i)
            theta[i] = 2.0 * M_PI *
                       (static_cast<double>(index[i]) / static_cast<double>(sizes_[i]));
        return theta;
    }

    bool operator==(const FrequencyGrid& other) const {
        return sizes_ == other.sizes_ && domain_ == other.domain_;
    }
    bool operator!=(const FrequencyGrid& other) const { return !(*this == other); }

    /// Same points, possibly different interpretation.
    bool same_points(const FrequencyGrid& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<int> sizes_;
    DomainKind domain_ = DomainKind::ContinuousQuadrature;
};

/// Spec-default grid sizes: 64 per dimension up to d = 2, 16 for d = 3+.
inline std::vector<int> default_grid_sizes(int dim) {
    return std::vector<int>(static_cast<std::size_t>(dim), dim <= 2 ? 64 : 16);
}

} // namespace psdot
