#include "hmsort/association.hpp"

#include "hmsort/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hmsort {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

void CostMatrix::set(std::size_t row, std::size_t col, double value) {
    if (row >= rows_ || col >= cols_) {
        throw ContractError("cost matrix index out of range");
    }
    if (value != kInfeasible && !(value >= 0.0 && value <= 1.0)) {
        throw ContractError("cost matrix entry must be in [0, 1] or infeasible, got " +
                            std::to_string(value));
    }
    values_[row * cols_ + col] = value;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox expand(const BoundingBox& box, double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw ContractError("expansion scale must be finite and >= 0");
    }
    if (scale == 0.0) {
        return box;
    }
    const double dw = scale * box.width();
    const double dh = scale * box.height();
    return BoundingBox(box.left() - dw, box.top() - dh, box.width() + 2.0 * dw,
                       box.height() + 2.0 * dh);
}

double eiou_distance(const BoundingBox& track_box, const BoundingBox& det_box, double scale) {
    return 1.0 - iou(expand(track_box, scale), expand(det_box, scale));
}

double cosine_distance(const Embedding& a, const Embedding& b) {
    return std::clamp(1.0 - a.dot(b), 0.0, 2.0);
}

double harmonic_mean(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw ContractError("harmonic mean needs non-negative inputs");
    }
    const double sum = a + b;
    if (sum == 0.0) {
        return 0.0;
    }
    return 2.0 * a * b / sum;
}

CostMatrix build_cost_matrix(std::span<const AssociationInput> tracks,
                             std::span<const AssociationInput> detections, double expansion,
                             const TrackingConfig& cfg, bool use_appearance) {
    CostMatrix costs(tracks.size(), detections.size());
    for (std::size_t r = 0; r < tracks.size(); ++r) {
        for (std::size_t c = 0; c < detections.size(); ++c) {
            double motion = eiou_distance(tracks[r].box, detections[c].box, expansion);
            if (motion > cfg.iou_gate) {
                motion = 1.0;
            }
            const bool appearance = use_appearance && tracks[r].embedding != nullptr &&
                                    detections[c].embedding != nullptr;
            if (!appearance) {
                costs.set(r, c, motion == 1.0 ? kInfeasible : motion);
                continue;
            }
            double look = cosine_distance(*tracks[r].embedding, *detections[c].embedding);
            if (look > cfg.appearance_gate) {
                look = 1.0;
            }
            if (motion == 1.0 && look == 1.0) {
                costs.set(r, c, kInfeasible);
                continue;
            }
            const double fused = cfg.fusion_mode == FusionMode::HarmonicMean
                                      ? harmonic_mean(motion, look)
                                      : std::min(motion, look);
            costs.set(r, c, fused);
        }
    }
    return costs;
}

CostMatrix build_cost_matrix(std::span<const AssociationInput> tracks,
                             std::span<const Detection> detections, double expansion,
                             const TrackingConfig& cfg, bool use_appearance) {
    std::vector<AssociationInput> views;
    views.reserve(detections.size());
    for (const Detection& d : detections) {
        views.push_back({d.bbox, d.embedding ? &*d.embedding : nullptr});
    }
    return build_cost_matrix(tracks, views, expansion, cfg, use_appearance);
}

std::vector<long> solve_dense_assignment(std::span<const double> costs, std::size_t rows,
                                         std::size_t cols) {
    if (costs.size() != rows * cols) {
        throw ContractError("cost buffer size does not match rows * cols");
    }
    std::vector<long> row_to_col(rows, -1);
    if (rows == 0 || cols == 0) {
        return row_to_col;
    }
    // The augmenting-path formulation needs n <= m; solve the transpose otherwise.
    const bool transposed = rows > cols;
    const std::size_t n = transposed ? cols : rows;
    const std::size_t m = transposed ? rows : cols;
    auto cost = [&](std::size_t i, std::size_t j) {
        return transposed ? costs[j * cols + i] : costs[i * cols + j];
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
    std::vector<double> min_slack(m + 1);
    std::vector<char> used(m + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double slack = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (std::size_t j = 1; j <= m; ++j) {
        if (owner[j] == 0) continue;
        const std::size_t i = owner[j] - 1;
        if (transposed) {
            row_to_col[j - 1] = static_cast<long>(i);
        } else {
            row_to_col[i] = static_cast<long>(j - 1);
        }
    }
    return row_to_col;
}

Assignment linear_assignment(const CostMatrix& costs) {
    Assignment result;
    const std::size_t rows = costs.rows();
    const std::size_t cols = costs.cols();

    double max_finite = 0.0;
    bool any_feasible = false;
    for (double c : costs.values()) {
        if (c != kInfeasible) {
            max_finite = std::max(max_finite, c);
            any_feasible = true;
        }
    }

    std::vector<long> row_to_col(rows, -1);
    if (any_feasible) {
        // Any single infeasible pair outweighs every feasible total, so the
        // solver maximizes feasible cardinality before minimizing cost.
        const double k = static_cast<double>(std::min(rows, cols));
        const double penalty = (max_finite + 1.0) * (k + 1.0);
        std::vector<double> dense(costs.values().begin(), costs.values().end());
        for (double& c : dense) {
            if (c == kInfeasible) c = penalty;
        }
        row_to_col = solve_dense_assignment(dense, rows, cols);
    }

    std::vector<char> col_used(cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        const long c = row_to_col[r];
        if (c >= 0 && costs.feasible(r, static_cast<std::size_t>(c))) {
            result.matches.push_back({r, static_cast<std::size_t>(c)});
            col_used[static_cast<std::size_t>(c)] = 1;
        } else {
            result.unmatched_rows.push_back(r);
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) result.unmatched_cols.push_back(c);
    }
    return result;
}

}  // namespace hmsort
