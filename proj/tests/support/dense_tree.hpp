#pragma once

#include <Eigen/Dense>

#include "treelab/resolvent.hpp"

namespace treelab::testing {

inline std::size_t level_offset(int branching, int depth) {
    std::size_t off = 0, size = 1;
    for (int d = 0; d < depth; ++d) {
        off += size;
        size *= static_cast<std::size_t>(branching);
    }
    return off;
}

// Column 0 of (H - z)^{-1} for the truncated tree behind `r`, with diagonal
// taken from the stored potentials and the given hopping on every edge.
// The matrix is complex symmetric, so this is also row 0.
inline Eigen::VectorXcd dense_root_column(const ExactTreeResult& r, cplx z, double hopping) {
    const int k = r.branching();
    const auto n = static_cast<Eigen::Index>(r.vertex_count());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int d = 0; d <= r.depth(); ++d) {
        const auto pot = r.level_potential(d);
        const std::size_t off = level_offset(k, d);
        for (std::size_t i = 0; i < pot.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(off + i);
            h(row, row) = pot[i] - z;
            if (d > 0) {
                const auto parent = static_cast<Eigen::Index>(level_offset(k, d - 1) + i / static_cast<std::size_t>(k));
                h(row, parent) = hopping;
                h(parent, row) = hopping;
            }
        }
    }
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
    e0(0) = 1.0;
    return h.partialPivLu().solve(e0);
}

inline cplx dense_entry(const Eigen::VectorXcd& col, int branching, const VertexId& v) {
    return col(static_cast<Eigen::Index>(level_offset(branching, v.depth) + v.index));
}

}  // namespace treelab::testing
