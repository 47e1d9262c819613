/// @file field.hpp
/// @brief 3D velocity fields with X/Y halos, advection coefficients, and
///        deterministic field generators.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace advectflow {

/// Interior cell counts. Z is the column (vertical) dimension; the advection
/// k-loop starts at the second plane, so nz >= 2 is required.
struct Extents {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    bool valid() const { return nx >= 1 && ny >= 1 && nz >= 2; }

    std::int64_t columns() const {
        return static_cast<std::int64_t>(nx) * ny;
    }
    std::int64_t interior_cells() const { return columns() * nz; }

    /// Cell count of the stored array: a one-cell halo on each side in X
    /// and Y, none in Z.
    std::int64_t padded_cells() const {
        return static_cast<std::int64_t>(nx + 2) * (ny + 2) * nz;
    }

    friend bool operator==(const Extents&, const Extents&) = default;
};

/// Linear index of cell (i, j, k), Z-fastest, then Y, then X.
/// Valid for i in [-1, nx], j in [-1, ny], k in [0, nz).
inline std::int64_t linear_index(const Extents& e, int i, int j, int k) {
    return (static_cast<std::int64_t>(i + 1) * (e.ny + 2) + (j + 1)) * e.nz + k;
}

/// A double-precision scalar field over an nx x ny x nz interior with a
/// one-cell halo in X and Y. Immutable once constructed; halo values are
/// supplied by the producer (generator, file, or caller), never synthesized
/// here.
class Field3D {
  public:
    static constexpr int halo_x = 1;
    static constexpr int halo_y = 1;
    static constexpr int halo_z = 0;

    /// Takes ownership of `data`, which must have exactly
    /// extents.padded_cells() values in layout order.
    Field3D(Extents extents, std::vector<double> data);

    const Extents& extents() const { return extents_; }

    double at(int i, int j, int k) const {
        return data_[linear_index(extents_, i, j, k)];
    }

    const std::vector<double>& data() const { return data_; }

  private:
    Extents extents_;
    std::vector<double> data_;
};

/// Deterministic field initializers. The same spec and extents always
/// produce bit-identical data, halos included.
struct GeneratorSpec {
    enum class Kind { constant, ramp, seeded };

    Kind kind = Kind::constant;
    double value = 0.0;          // constant
    std::uint64_t seed = 0;      // seeded
    double lo = -1.0;            // seeded range
    double hi = 1.0;

    static GeneratorSpec constant(double c);
    static GeneratorSpec ramp();
    static GeneratorSpec seeded(std::uint64_t seed, double lo, double hi);

    /// Parses "constant:<c>", "ramp", or "seeded:<seed>:<lo>:<hi>".
    static GeneratorSpec parse(const std::string& text);
    std::string describe() const;
};

/// Builds a fully initialized field (halo cells included) from a generator.
/// Throws std::invalid_argument for invalid extents or generator ranges.
Field3D make_field(const Extents& extents, const GeneratorSpec& spec);

/// Per-column advection coefficients. Their physical definitions are opaque
/// here; callers supply values (defaults of 1.0 via unit_coeffs).
struct AdvectionCoeffs {
    double tcx = 1.0;
    double tcy = 1.0;
    std::vector<double> tzc1;  // one entry per k plane
    std::vector<double> tzc2;

    void validate(const Extents& e) const {
        if (static_cast<int>(tzc1.size()) != e.nz ||
            static_cast<int>(tzc2.size()) != e.nz) {
            throw std::invalid_argument(
                "coefficient arrays must have one entry per z plane");
        }
    }
};

AdvectionCoeffs unit_coeffs(int nz);

}  // namespace advectflow
