#include "ncs/synthesis.hpp"

#include "ncs/errors.hpp"
#include "ncs/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ncs {

const char* to_string(SynthesisMethod method) {
    switch (method) {
        case SynthesisMethod::PaperPipeline: return "paper_pipeline";
        case SynthesisMethod::ZeroGainFallback: return "zero_gain_fallback";
        case SynthesisMethod::LeastSquaresFallback: return "least_squares_fallback";
        case SynthesisMethod::LqrFallback: return "lqr_fallback";
    }
    return "unknown";
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> solve_open_loop_inequality(
    const Eigen::MatrixXd& A_u, const ModeProbabilities& probs, double beta) {
    if (A_u.rows() != A_u.cols())
        throw std::invalid_argument("open-loop inequality: A_u must be square");
    if (!(beta > 0.0))
        throw std::invalid_argument("open-loop inequality: beta must be positive");

    const double contraction = probs.open_loop * std::pow(linalg::spectral_radius(A_u), 2);
    if (!(contraction < 1.0 - kSchurMargin))
        throw InfeasibleError(
            "open-loop inequality: pi_u * rho(A_u)^2 = " + std::to_string(contraction) +
                " >= 1; increase the selection probability p_j or reduce the loss probability q",
            contraction);

    const Eigen::Index d = A_u.rows();
    const Eigen::MatrixXd Au_t = A_u.transpose();
    // P_u = pi_u A_u' P_u A_u + Q with Q = pi_s beta A_u'A_u + I, vectorized.
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(d * d, d * d) -
                             probs.open_loop * linalg::kron(Au_t, Au_t);
    Eigen::MatrixXd Q = probs.closed_loop * beta * (Au_t * A_u) +
                        Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd solution = system.colPivHouseholderQr().solve(linalg::vec(Q));
    if (!solution.allFinite())
        throw NumericError("open-loop inequality: Stein solve produced non-finite entries",
                           system);

    Eigen::MatrixXd P_s = beta * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd P_u = linalg::symmetrize(linalg::unvec(solution, d, d));
    return {std::move(P_s), std::move(P_u)};
}

namespace {

struct GainInequality {
    Eigen::MatrixXd A, B, Ps_inv, P_hat;
    Eigen::LLT<Eigen::MatrixXd> P_hat_llt;

    Eigen::MatrixXd offset(const Eigen::MatrixXd& Y) const { return A * Ps_inv + B * Y; }

    // Largest eigenvalue of Z' P_hat^-1 Z - Ps^-1; strict feasibility means < 0.
    double margin(const Eigen::MatrixXd& Y) const {
        const Eigen::MatrixXd Z = offset(Y);
        return linalg::max_eigenvalue(
            linalg::symmetrize(Z.transpose() * P_hat_llt.solve(Z) - Ps_inv));
    }

    // Smallest eigenvalue and eigenvector of [[Ps^-1, Z'], [Z, P_hat]]; by the
    // Schur complement this block matrix is positive definite exactly when the
    // inequality holds strictly.
    std::pair<double, Eigen::VectorXd> block_floor(const Eigen::MatrixXd& Y) const {
        const Eigen::Index d = A.rows();
        const Eigen::MatrixXd Z = offset(Y);
        Eigen::MatrixXd S(2 * d, 2 * d);
        S.topLeftCorner(d, d) = Ps_inv;
        S.topRightCorner(d, d) = Z.transpose();
        S.bottomLeftCorner(d, d) = Z;
        S.bottomRightCorner(d, d) = P_hat;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
        if (solver.info() != Eigen::Success)
            throw NumericError("gain inequality: block eigendecomposition failed", S);
        return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
    }
};

}  // namespace

Eigen::MatrixXd solve_gain_inequality(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& P_s, const Eigen::MatrixXd& P_u,
                                      const ModeProbabilities& probs) {
    const Eigen::Index d = A.rows();
    if (A.cols() != d || B.rows() != d)
        throw std::invalid_argument("gain inequality: incompatible A/B dimensions");

    const Eigen::MatrixXd Ps = linalg::symmetrize(P_s);
    const Eigen::MatrixXd Pu = linalg::symmetrize(P_u);
    if (!linalg::is_positive_definite(Ps))
        throw std::invalid_argument("gain inequality: P_s is not positive definite");
    if (!linalg::is_positive_definite(Pu))
        throw std::invalid_argument("gain inequality: P_u is not positive definite");

    GainInequality problem;
    problem.A = A;
    problem.B = B;
    problem.Ps_inv = Ps.llt().solve(Eigen::MatrixXd::Identity(d, d));
    problem.P_hat = probs.closed_loop * Ps + probs.open_loop * Pu;
    problem.P_hat_llt.compute(problem.P_hat);
    if (problem.P_hat_llt.info() != Eigen::Success)
        throw NumericError("gain inequality: P_hat is not positive definite", problem.P_hat);

    const Eigen::MatrixXd B_pinv = B.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::MatrixXd Y = -B_pinv * A * problem.Ps_inv;

    double margin = problem.margin(Y);
    double best_margin = margin;
    if (margin < -kDefinitenessTol) return Y;

    constexpr int kMaxIterations = 500;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        auto [floor, eigvec] = problem.block_floor(Y);
        const Eigen::VectorXd v1 = eigvec.head(d);
        const Eigen::VectorXd v2 = eigvec.tail(d);
        // d(lambda_min)/dY of the block matrix at the eigenpair.
        const Eigen::MatrixXd gradient = 2.0 * (B.transpose() * v2) * v1.transpose();

        double step = 1.0;
        bool moved = false;
        while (step > 1e-12) {
            Eigen::MatrixXd trial = Y + step * gradient;
            if (problem.block_floor(trial).first > floor) {
                Y = std::move(trial);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        margin = problem.margin(Y);
        best_margin = std::min(best_margin, margin);
        if (margin < -kDefinitenessTol) return Y;
        if (!moved) break;  // line search stalled
    }
    throw InfeasibleError("gain inequality: no strictly feasible Y found; best largest "
                          "eigenvalue reached was " + std::to_string(best_margin),
                          best_margin);
}

std::optional<Eigen::MatrixXd> lossy_lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                              double closed_loop_probability) {
    const Eigen::Index d = A.rows();
    const Eigen::Index m = B.cols();
    const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd Im = Eigen::MatrixXd::Identity(m, m);

    Eigen::MatrixXd P = Id;
    constexpr int kMaxIterations = 20000;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Eigen::MatrixXd BtP = B.transpose() * P;
        const Eigen::MatrixXd gain_term =
            (Im + BtP * B).ldlt().solve(BtP * A);
        Eigen::MatrixXd next = linalg::symmetrize(
            A.transpose() * P * A + Id -
            closed_loop_probability * A.transpose() * P * B * gain_term);
        const double delta = (next - P).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
        P = std::move(next);
        if (!P.allFinite() || P.cwiseAbs().maxCoeff() > 1e14) return std::nullopt;
        if (delta < 1e-11 * scale) {
            const Eigen::MatrixXd BtP2 = B.transpose() * P;
            return Eigen::MatrixXd(-(Im + BtP2 * B).ldlt().solve(BtP2 * A));
        }
    }
    return std::nullopt;
}

SynthesisResult synthesize(const Plant& plant, const ModeProbabilities& probs,
                           const std::vector<double>& beta_schedule) {
    if (beta_schedule.empty())
        throw std::invalid_argument("synthesize: beta schedule is empty");
    const Eigen::MatrixXd& A = plant.A;
    const Eigen::MatrixXd& B = plant.B;
    const Eigen::Index d = A.rows();
    const Eigen::Index m = B.cols();

    SynthesisResult best;
    best.radius = std::numeric_limits<double>::infinity();
    bool have_candidate = false;

    auto gate = [&](Eigen::MatrixXd K, SynthesisMethod method, Eigen::MatrixXd Y,
                    Eigen::MatrixXd P_s, Eigen::MatrixXd P_u) -> std::optional<SynthesisResult> {
        StabilityDecision decision =
            check_stochastic_stability(ModePair{A + B * K, A}, probs);
        if (decision.stable) {
            SynthesisResult result;
            result.K = std::move(K);
            result.Y = std::move(Y);
            result.method = method;
            result.verified = true;
            result.radius = decision.radius;
            if (P_s.size() > 0) {
                result.P_s = std::move(P_s);
                result.P_u = std::move(P_u);
            } else if (decision.certificate) {
                result.P_s = decision.certificate->P_s;
                result.P_u = decision.certificate->P_u;
            }
            return result;
        }
        if (decision.radius < best.radius || !have_candidate) {
            best = SynthesisResult{};
            best.K = std::move(K);
            best.method = method;
            best.verified = false;
            best.radius = decision.radius;
            have_candidate = true;
        }
        return std::nullopt;
    };

    // Pipeline sweep. The open-loop solvability test does not depend on beta,
    // so its failure skips the whole sweep.
    try {
        for (double beta : beta_schedule) {
            auto [P_s, P_u] = solve_open_loop_inequality(A, probs, beta);
            Eigen::MatrixXd Y;
            try {
                Y = solve_gain_inequality(A, B, P_s, P_u, probs);
            } catch (const InfeasibleError&) {
                continue;
            }
            Eigen::MatrixXd K = Y * P_s;
            if (auto result = gate(std::move(K), SynthesisMethod::PaperPipeline, std::move(Y),
                                   std::move(P_s), std::move(P_u)))
                return *result;
        }
    } catch (const InfeasibleError&) {
        // pi_u rho(A_u)^2 >= 1: fall through to the fallback gains.
    }

    const Eigen::MatrixXd none;
    if (linalg::spectral_radius(A) < 1.0 - kSchurMargin) {
        if (auto result = gate(Eigen::MatrixXd::Zero(m, d), SynthesisMethod::ZeroGainFallback,
                               none, none, none))
            return *result;
    }
    {
        Eigen::MatrixXd K = -B.completeOrthogonalDecomposition().pseudoInverse() * A;
        if (auto result = gate(std::move(K), SynthesisMethod::LeastSquaresFallback,
                               none, none, none))
            return *result;
    }
    if (auto K = lossy_lqr_gain(A, B, probs.closed_loop)) {
        if (auto result = gate(std::move(*K), SynthesisMethod::LqrFallback, none, none, none))
            return *result;
    }

    if (!have_candidate) {
        // Every candidate threw before reaching verification; report the zero
        // gain with the open-loop radius as the diagnostic.
        best.K = Eigen::MatrixXd::Zero(m, d);
        best.method = SynthesisMethod::ZeroGainFallback;
        best.radius = second_moment_lift(ModePair{A, A}, probs).radius;
    }
    return best;
}

}  // namespace ncs
