#include "hmsort/motion.hpp"

#include "hmsort/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace hmsort {

namespace {

using Matrix48 = Eigen::Matrix<double, 4, 8>;

StateCovariance transition() {
    StateCovariance f = StateCovariance::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

Matrix48 observation() {
    Matrix48 h = Matrix48::Zero();
    for (int i = 0; i < 4; ++i) {
        h(i, i) = 1.0;
    }
    return h;
}

void require_positive_size(const Measurement& m) {
    if (!(m[2] > 0.0 && m[3] > 0.0) || !m.allFinite()) {
        throw ContractError("kalman measurement needs finite values and positive width/height");
    }
}

StateCovariance symmetrized(const StateCovariance& p) {
    return (p + p.transpose()) / 2.0;
}

}  // namespace

KalmanDistribution KalmanFilter::initiate(const Measurement& measurement) const {
    require_positive_size(measurement);
    const double h = measurement[3];
    KalmanDistribution d;
    d.mean.head<4>() = measurement;
    d.mean.tail<4>().setZero();

    StateVector std_dev;
    std_dev.head<4>().setConstant(2.0 * noise_.position_weight * h);
    std_dev.tail<4>().setConstant(10.0 * noise_.velocity_weight * h);
    d.covariance = std_dev.array().square().matrix().asDiagonal();
    return d;
}

KalmanDistribution KalmanFilter::predict(const KalmanDistribution& prior) const {
    static const StateCovariance f = transition();
    const double h = prior.mean[3];

    StateVector std_dev;
    std_dev.head<4>().setConstant(noise_.position_weight * h);
    std_dev.tail<4>().setConstant(noise_.velocity_weight * h);
    const StateCovariance q = std_dev.array().square().matrix().asDiagonal();

    KalmanDistribution next;
    next.mean = f * prior.mean;
    next.covariance = symmetrized(f * prior.covariance * f.transpose() + q);
    return next;
}

std::pair<Measurement, Eigen::Matrix4d> KalmanFilter::project(const KalmanDistribution& d) const {
    static const Matrix48 obs = observation();
    const double h = d.mean[3];
    const Eigen::Vector4d r_std = Eigen::Vector4d::Constant(noise_.position_weight * h);
    const Eigen::Matrix4d r = r_std.array().square().matrix().asDiagonal();
    Measurement mean = obs * d.mean;
    Eigen::Matrix4d cov = obs * d.covariance * obs.transpose() + r;
    return {mean, cov};
}

KalmanDistribution KalmanFilter::update(const KalmanDistribution& prior,
                                        const Measurement& measurement) const {
    require_positive_size(measurement);
    static const Matrix48 obs = observation();

    const auto [projected_mean, innovation_cov] = project(prior);
    const Eigen::LLT<Eigen::Matrix4d> chol(innovation_cov);
    if (chol.info() != Eigen::Success) {
        throw DegenerateCovariance("innovation covariance is not positive definite");
    }
    // K = P H^T S^-1, solved as S K^T = H P.
    const Eigen::Matrix<double, 8, 4> gain =
        chol.solve(obs * prior.covariance).transpose();
    const Measurement innovation = measurement - projected_mean;

    // Joseph form keeps the posterior PSD under rounding.
    const double h = prior.mean[3];
    const Eigen::Vector4d r_std = Eigen::Vector4d::Constant(noise_.position_weight * h);
    const Eigen::Matrix4d r = r_std.array().square().matrix().asDiagonal();
    const StateCovariance i_kh = StateCovariance::Identity() - gain * obs;

    KalmanDistribution posterior;
    posterior.mean = prior.mean + gain * innovation;
    posterior.covariance = symmetrized(i_kh * prior.covariance * i_kh.transpose() +
                                       gain * r * gain.transpose());
    return posterior;
}

bool is_valid_covariance(const StateCovariance& covariance, double tolerance) {
    if (!covariance.allFinite() || covariance != covariance.transpose()) {
        return false;
    }
    const Eigen::SelfAdjointEigenSolver<StateCovariance> solver(covariance,
                                                                Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -tolerance;
}

}  // namespace hmsort
