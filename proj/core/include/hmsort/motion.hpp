#pragma once

#include "hmsort/model.hpp"

namespace hmsort {

/// Constant-velocity Kalman filter over [cx, cy, w, h] and their velocities.
///
/// Process and measurement noise are scaled by the current box height so the
/// filter behaves the same at every image scale. One step is one frame.
class KalmanFilter {
public:
    struct Noise {
        double position_weight = 1.0 / 20.0;
        double velocity_weight = 1.0 / 160.0;
    };

    KalmanFilter() = default;
    explicit KalmanFilter(Noise noise) : noise_(noise) {}

    /// Zero-velocity track at the measurement. Throws ContractError if w or h <= 0.
    KalmanDistribution initiate(const Measurement& measurement) const;

    KalmanDistribution predict(const KalmanDistribution& prior) const;

    /// Throws ContractError if w or h <= 0, DegenerateCovariance if the
    /// innovation covariance is not positive definite.
    KalmanDistribution update(const KalmanDistribution& prior, const Measurement& measurement) const;

    /// Projected mean and covariance in measurement space, including R.
    std::pair<Measurement, Eigen::Matrix4d> project(const KalmanDistribution& d) const;

    const Noise& noise() const noexcept { return noise_; }

private:
    Noise noise_{};
};

/// True when the covariance is exactly symmetric with eigenvalues >= -tolerance.
bool is_valid_covariance(const StateCovariance& covariance, double tolerance = 1e-8);

}  // namespace hmsort
