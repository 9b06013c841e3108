#include "ncs/linalg.hpp"

#include "ncs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace ncs::linalg {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols)
        throw std::invalid_argument("unvec: size mismatch");
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("spectral_radius: matrix must be square");
    if (m.rows() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("spectral_radius: eigenvalue iteration did not converge", m);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("symmetric eigenvalues: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("symmetric eigenvalue iteration did not converge", m);
    return solver.eigenvalues();
}

}  // namespace

double max_eigenvalue(const Eigen::MatrixXd& symmetric) {
    return symmetric_eigenvalues(symmetric).maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
    return symmetric_eigenvalues(symmetric).minCoeff();
}

}  // namespace ncs::linalg
