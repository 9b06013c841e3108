#pragma once

#include <Eigen/Dense>

namespace ncs::linalg {

/// Kronecker product A (x) B.
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Column-major stacking of a matrix into a vector.
Eigen::VectorXd vec(const Eigen::MatrixXd& m);

/// Inverse of vec().
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

/// Largest eigenvalue magnitude of a real square matrix.
/// Throws NumericError when the QR iteration does not converge.
double spectral_radius(const Eigen::MatrixXd& m);

/// Extremal eigenvalues of a symmetric matrix (only the lower triangle is read).
double max_eigenvalue(const Eigen::MatrixXd& symmetric);
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

inline bool is_positive_definite(const Eigen::MatrixXd& symmetric) {
    return min_eigenvalue(symmetric) > 0.0;
}

}  // namespace ncs::linalg
