#pragma once

#include "hmsort/model.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace hmsort {

/// Marks a track/detection pair that the solver must never match.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

/// Dense row-major tracks x detections matrix. Finite entries lie in [0, 1].
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = kInfeasible);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
    bool feasible(std::size_t row, std::size_t col) const { return (*this)(row, col) != kInfeasible; }

    /// Throws ContractError unless value is kInfeasible or within [0, 1].
    void set(std::size_t row, std::size_t col, double value);

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct Match {
    std::size_t row;
    std::size_t col;

    friend auto operator<=>(const Match&, const Match&) = default;
};

struct Assignment {
    std::vector<Match> matches;  ///< sorted by row
    std::vector<std::size_t> unmatched_rows;
    std::vector<std::size_t> unmatched_cols;
};

double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Grows each side by scale * size, keeping the center. Throws ContractError if scale < 0.
BoundingBox expand(const BoundingBox& box, double scale);

/// 1 - IoU of both boxes after expansion by the same scale.
double eiou_distance(const BoundingBox& track_box, const BoundingBox& det_box, double scale);

/// 1 - cos between two unit embeddings, in [0, 2].
double cosine_distance(const Embedding& a, const Embedding& b);

/// 2ab / (a + b), and 0 when both are 0. Throws ContractError on negative input.
double harmonic_mean(double a, double b);

/// Non-owning view of one side of the association problem.
struct AssociationInput {
    BoundingBox box;
    const Embedding* embedding = nullptr;
};

/// Fused, gated cost for every track/detection pair.
///
/// The EIoU channel is gated to 1 above cfg.iou_gate and the appearance
/// channel to 1 above cfg.appearance_gate. A pair whose every available
/// channel is gated is infeasible.
CostMatrix build_cost_matrix(std::span<const AssociationInput> tracks,
                             std::span<const AssociationInput> detections, double expansion,
                             const TrackingConfig& cfg, bool use_appearance);

CostMatrix build_cost_matrix(std::span<const AssociationInput> tracks,
                             std::span<const Detection> detections, double expansion,
                             const TrackingConfig& cfg, bool use_appearance);

/// Minimum-cost matching that never uses an infeasible entry.
///
/// Among feasible matchings the solver first maximizes the number of
/// matched pairs, then minimizes the summed cost.
Assignment linear_assignment(const CostMatrix& costs);

/// Dense rectangular Hungarian solver (shortest augmenting path).
///
/// Returns, for every row, the assigned column or -1. Exactly min(rows, cols)
/// rows are assigned and the total cost is minimal. All costs must be finite.
std::vector<long> solve_dense_assignment(std::span<const double> costs, std::size_t rows,
                                         std::size_t cols);

}  // namespace hmsort
