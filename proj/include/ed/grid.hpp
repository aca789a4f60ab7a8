#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "ed/errors.hpp"

namespace ed {

enum class Boundary { Periodic, Reflecting };

inline std::string to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "reflecting";
}

/// D-dimensional rectangular lattice (D <= 3), cell-centered fields.
/// Cell d-coordinate of multi-index i is (i_d + 1/2) * spacing(d), so the
/// domain is [0, L_d) per dimension. Cells are stored flat in row-major
/// order (last dimension fastest).
struct Grid {
    int dim = 1;
    std::array<int, 3> n{8, 1, 1};
    std::array<double, 3> length{1.0, 0.0, 0.0};
    Boundary boundary = Boundary::Periodic;

    static constexpr std::int64_t kMaxCells = 1 << 22;

    Grid() = default;
    Grid(int dim_, std::array<int, 3> n_, std::array<double, 3> length_, Boundary b)
        : dim(dim_), n(n_), length(length_), boundary(b) {
        validate();
    }

    /// 1D convenience.
    Grid(int n0, double l0, Boundary b)
        : dim(1), n{n0, 1, 1}, length{l0, 0.0, 0.0}, boundary(b) {
        validate();
    }

    void validate() const {
        if (dim < 1 || dim > 3) throw ValidationError("grid: dim must be in {1,2,3}");
        std::int64_t cells = 1;
        for (int d = 0; d < dim; ++d) {
            if (n[d] < 8) throw ValidationError("grid: points per dimension must be >= 8");
            if (!(length[d] > 0.0)) throw ValidationError("grid: lengths must be > 0");
            cells *= n[d];
        }
        if (cells > kMaxCells) throw ValidationError("grid: cell count exceeds budget");
    }

    double spacing(int d) const { return length[d] / n[d]; }

    std::int64_t cell_count() const {
        std::int64_t c = 1;
        for (int d = 0; d < dim; ++d) c *= n[d];
        return c;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= spacing(d);
        return v;
    }

    std::int64_t index(const std::array<int, 3>& i) const {
        std::int64_t idx = 0;
        for (int d = 0; d < dim; ++d) idx = idx * n[d] + i[d];
        return idx;
    }

    std::array<int, 3> multi_index(std::int64_t idx) const {
        std::array<int, 3> i{0, 0, 0};
        for (int d = dim - 1; d >= 0; --d) {
            i[d] = static_cast<int>(idx % n[d]);
            idx /= n[d];
        }
        return i;
    }

    double coord(int i_d, int d) const { return (i_d + 0.5) * spacing(d); }

    std::array<double, 3> position(std::int64_t idx) const {
        auto mi = multi_index(idx);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) x[d] = coord(mi[d], d);
        return x;
    }

    /// Neighbor cell index in direction +-1 along d; -1 when the step leaves
    /// a reflecting domain.
    std::int64_t neighbor(std::int64_t idx, int d, int dir) const {
        auto mi = multi_index(idx);
        int i = mi[d] + dir;
        if (boundary == Boundary::Periodic) {
            i = (i % n[d] + n[d]) % n[d];
        } else if (i < 0 || i >= n[d]) {
            return -1;
        }
        mi[d] = i;
        return index(mi);
    }

    /// True when the link from cell idx to its +d neighbor exists. A periodic
    /// grid has n_d links per line (the last one wraps); a reflecting grid has
    /// n_d - 1.
    bool has_link(std::int64_t idx, int d) const {
        if (boundary == Boundary::Periodic) return true;
        return multi_index(idx)[d] < n[d] - 1;
    }

    bool same_shape(const Grid& o) const {
        if (dim != o.dim || boundary != o.boundary) return false;
        for (int d = 0; d < dim; ++d) {
            if (n[d] != o.n[d] || length[d] != o.length[d]) return false;
        }
        return true;
    }
};

}  // namespace ed
