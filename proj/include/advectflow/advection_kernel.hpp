/// @file advection_kernel.hpp
/// @brief Per-cell Piacsek-Williams source-term expressions.
///
/// These three functions are the single normative definition of the scheme
/// (see docs/advection_scheme.md). Both the plain-loop reference and the
/// dataflow advect stages call them, so output equality between the two is
/// a matter of the streaming machinery, not of expression drift. Statement
/// order and association are contractual: results must be bit-identical no
/// matter which execution path evaluates them.
///
/// Accessors are callables (di, dj, dk) -> T over the 27-point neighborhood
/// of the target cell, with di/dj/dk in {-1, 0, 1}. `top` selects the
/// column-top form, which never touches dk = +1; at the top of the column
/// that slot has no physical neighbor behind it.
///
/// The scalar type T is a template parameter so the same expressions can be
/// evaluated with a counting type for operation accounting.

#pragma once

namespace advectflow {

/// X-velocity source term (21 ops per interior cell, 17 at the column top).
template <class T, class AccU, class AccV, class AccW>
T su_cell(const AccU& u, const AccV& v, const AccW& w, const T& tcx, const T& tcy,
          const T& tzc1k, const T& tzc2k, bool top) {
    T su = tcx * (u(-1, 0, 0) * (u(0, 0, 0) + u(-1, 0, 0)) -
                  u(1, 0, 0) * (u(0, 0, 0) + u(1, 0, 0)));
    su = su + tcy * (u(0, -1, 0) * (v(0, -1, 0) + v(1, -1, 0)) -
                     u(0, 1, 0) * (v(0, 0, 0) + v(1, 0, 0)));
    if (!top) {
        su = su + tzc1k * u(0, 0, -1) * (w(0, 0, -1) + w(1, 0, -1)) -
             tzc2k * u(0, 0, 1) * (w(0, 0, 0) + w(1, 0, 0));
    } else {
        su = su + tzc1k * u(0, 0, -1) * (w(0, 0, -1) + w(1, 0, -1));
    }
    return su;
}

/// Y-velocity source term: the X-orientation form transposed to Y. The
/// j-offset staggering mirrors the i-offset staggering of su_cell.
template <class T, class AccU, class AccV, class AccW>
T sv_cell(const AccU& u, const AccV& v, const AccW& w, const T& tcx, const T& tcy,
          const T& tzc1k, const T& tzc2k, bool top) {
    T sv = tcx * (v(-1, 0, 0) * (u(-1, 0, 0) + u(-1, 1, 0)) -
                  v(1, 0, 0) * (u(0, 0, 0) + u(0, 1, 0)));
    sv = sv + tcy * (v(0, -1, 0) * (v(0, 0, 0) + v(0, -1, 0)) -
                     v(0, 1, 0) * (v(0, 0, 0) + v(0, 1, 0)));
    if (!top) {
        sv = sv + tzc1k * v(0, 0, -1) * (w(0, 0, -1) + w(0, 1, -1)) -
             tzc2k * v(0, 0, 1) * (w(0, 0, 0) + w(0, 1, 0));
    } else {
        sv = sv + tzc1k * v(0, 0, -1) * (w(0, 0, -1) + w(0, 1, -1));
    }
    return sv;
}

/// Z-velocity source term. w is staggered downward in k, so the advecting
/// horizontal velocities average planes k and k-1; the vertical term is
/// self-advection, with the flux through the column top dropped in the top
/// form exactly as in the other two stages.
template <class T, class AccU, class AccV, class AccW>
T sw_cell(const AccU& u, const AccV& v, const AccW& w, const T& tcx, const T& tcy,
          const T& tzc1k, const T& tzc2k, bool top) {
    T sw = tcx * (w(-1, 0, 0) * (u(-1, 0, 0) + u(-1, 0, -1)) -
                  w(1, 0, 0) * (u(0, 0, 0) + u(0, 0, -1)));
    sw = sw + tcy * (w(0, -1, 0) * (v(0, -1, 0) + v(0, -1, -1)) -
                     w(0, 1, 0) * (v(0, 0, 0) + v(0, 0, -1)));
    if (!top) {
        sw = sw + tzc1k * w(0, 0, -1) * (w(0, 0, -1) + w(0, 0, 0)) -
             tzc2k * w(0, 0, 1) * (w(0, 0, 0) + w(0, 0, 1));
    } else {
        sw = sw + tzc1k * w(0, 0, -1) * (w(0, 0, -1) + w(0, 0, 0));
    }
    return sw;
}

}  // namespace advectflow
