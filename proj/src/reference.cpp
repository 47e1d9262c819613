#include "advectflow/reference.hpp"

#include <stdexcept>

#include "advectflow/advection_kernel.hpp"

namespace advectflow {

namespace {

void check_inputs(const Field3D& u, const Field3D& v, const Field3D& w,
                  const AdvectionCoeffs& coeffs) {
    if (!(u.extents() == v.extents()) || !(u.extents() == w.extents())) {
        throw std::invalid_argument("u, v, w must share extents");
    }
    coeffs.validate(u.extents());
}

/// 27-point accessor over a field, centered on (i, j, k).
struct FieldStencil {
    const Field3D& f;
    int i, j, k;
    double operator()(int di, int dj, int dk) const {
        return f.at(i + di, j + dj, k + dk);
    }
};

enum class Stage { u, v, w, all };

/// One loop nest serves all entry points; the stage selector picks which
/// outputs are produced. Loop order (i outer, j, k inner) matches the
/// original kernel.
SourceTerms advect_impl(const Field3D& u, const Field3D& v, const Field3D& w,
                        const AdvectionCoeffs& coeffs, Stage stage) {
    check_inputs(u, v, w, coeffs);
    const Extents& e = u.extents();
    std::vector<double> su(static_cast<std::size_t>(e.padded_cells()), 0.0);
    std::vector<double> sv(su.size(), 0.0);
    std::vector<double> sw(su.size(), 0.0);

    const bool want_u = stage == Stage::u || stage == Stage::all;
    const bool want_v = stage == Stage::v || stage == Stage::all;
    const bool want_w = stage == Stage::w || stage == Stage::all;

    for (int i = 0; i < e.nx; ++i) {
        for (int j = 0; j < e.ny; ++j) {
            for (int k = 1; k < e.nz; ++k) {
                const bool top = k == e.nz - 1;
                const FieldStencil au{u, i, j, k};
                const FieldStencil av{v, i, j, k};
                const FieldStencil aw{w, i, j, k};
                const std::size_t m =
                    static_cast<std::size_t>(linear_index(e, i, j, k));
                if (want_u) {
                    su[m] = su_cell<double>(au, av, aw, coeffs.tcx, coeffs.tcy,
                                            coeffs.tzc1[k], coeffs.tzc2[k], top);
                }
                if (want_v) {
                    sv[m] = sv_cell<double>(au, av, aw, coeffs.tcx, coeffs.tcy,
                                            coeffs.tzc1[k], coeffs.tzc2[k], top);
                }
                if (want_w) {
                    sw[m] = sw_cell<double>(au, av, aw, coeffs.tcx, coeffs.tcy,
                                            coeffs.tzc1[k], coeffs.tzc2[k], top);
                }
            }
        }
    }
    return SourceTerms{Field3D(e, std::move(su)), Field3D(e, std::move(sv)),
                       Field3D(e, std::move(sw))};
}

/// Scalar that counts every arithmetic evaluation into a caller-owned tally.
struct CountedDouble {
    double v = 0.0;
    std::int64_t* ops = nullptr;

    friend CountedDouble operator+(const CountedDouble& a, const CountedDouble& b) {
        ++*a.ops;
        return {a.v + b.v, a.ops};
    }
    friend CountedDouble operator-(const CountedDouble& a, const CountedDouble& b) {
        ++*a.ops;
        return {a.v - b.v, a.ops};
    }
    friend CountedDouble operator*(const CountedDouble& a, const CountedDouble& b) {
        ++*a.ops;
        return {a.v * b.v, a.ops};
    }
};

struct CountingStencil {
    std::int64_t* ops;
    CountedDouble operator()(int, int, int) const { return {0.0, ops}; }
};

std::array<std::int64_t, 3> per_stage_ops(bool top) {
    std::array<std::int64_t, 3> out{};
    std::int64_t ops = 0;
    const CountingStencil acc{&ops};
    const CountedDouble c{1.0, &ops};

    ops = 0;
    su_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
    out[0] = ops;
    ops = 0;
    sv_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
    out[1] = ops;
    ops = 0;
    sw_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
    out[2] = ops;
    return out;
}

}  // namespace

Field3D advect_u(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs) {
    return std::move(advect_impl(u, v, w, coeffs, Stage::u).su);
}

Field3D advect_v(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs) {
    return std::move(advect_impl(u, v, w, coeffs, Stage::v).sv);
}

Field3D advect_w(const Field3D& u, const Field3D& v, const Field3D& w,
                 const AdvectionCoeffs& coeffs) {
    return std::move(advect_impl(u, v, w, coeffs, Stage::w).sw);
}

SourceTerms advect_all(const Field3D& u, const Field3D& v, const Field3D& w,
                       const AdvectionCoeffs& coeffs) {
    return advect_impl(u, v, w, coeffs, Stage::all);
}

FlopCount count_flops(const Extents& extents) {
    if (!extents.valid()) {
        throw std::invalid_argument("invalid extents");
    }
    FlopCount fc;
    fc.per_stage_interior = per_stage_ops(false);
    fc.per_stage_top = per_stage_ops(true);
    for (int s = 0; s < 3; ++s) {
        fc.per_interior_cell += fc.per_stage_interior[static_cast<std::size_t>(s)];
        fc.per_top_cell += fc.per_stage_top[static_cast<std::size_t>(s)];
    }
    fc.total = extents.columns() *
               ((extents.nz - 2) * fc.per_interior_cell + fc.per_top_cell);
    return fc;
}

std::int64_t counted_execution_flops(const Extents& extents) {
    if (!extents.valid()) {
        throw std::invalid_argument("invalid extents");
    }
    std::int64_t ops = 0;
    const CountingStencil acc{&ops};
    const CountedDouble c{1.0, &ops};
    for (int i = 0; i < extents.nx; ++i) {
        for (int j = 0; j < extents.ny; ++j) {
            for (int k = 1; k < extents.nz; ++k) {
                const bool top = k == extents.nz - 1;
                su_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
                sv_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
                sw_cell<CountedDouble>(acc, acc, acc, c, c, c, c, top);
            }
        }
    }
    return ops;
}

}  // namespace advectflow
