#pragma once

#include "ncs/model.hpp"
#include "ncs/stability.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ncs {

enum class SynthesisMethod {
    PaperPipeline,         // K = Y P_s from the two-inequality pipeline
    ZeroGainFallback,      // K = 0 (only offered when A is already Schur)
    LeastSquaresFallback,  // K = -pinv(B) A
    LqrFallback,           // loss-aware Riccati gain, unit weights
};

const char* to_string(SynthesisMethod method);

struct SynthesisResult {
    Eigen::MatrixXd K;
    Eigen::MatrixXd Y;    // populated only by the pipeline (there K = Y * P_s)
    Eigen::MatrixXd P_s;  // pipeline: the inequality witnesses; fallbacks: the
    Eigen::MatrixXd P_u;  // certificate matrices of the verified gain
    SynthesisMethod method = SynthesisMethod::PaperPipeline;
    bool verified = false;
    double radius = 0.0;  // second-moment radius achieved by K
};

inline const std::vector<double> kDefaultBetaSchedule{1.0, 10.0, 100.0, 1000.0};

/// Open-loop inequality A_u' P_hat A_u - P_u < 0 with P_s pinned to beta I:
/// solves the Stein equation
///   P_u = pi_u A_u' P_u A_u + pi_s beta A_u' A_u + I,
/// whose residual is exactly -I. Solvable iff pi_u rho(A_u)^2 < 1; throws
/// InfeasibleError carrying that product otherwise.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> solve_open_loop_inequality(
    const Eigen::MatrixXd& A_u, const ModeProbabilities& probs, double beta);

/// Gain inequality in Y:
///   (A Ps^-1 + B Y)' P_hat^-1 (A Ps^-1 + B Y) - Ps^-1 < 0.
/// Starts from the least-squares point Y0 = -pinv(B) A Ps^-1; if that is not
/// strictly feasible, ascends the smallest eigenvalue of the block matrix
/// [[Ps^-1, Z'], [Z, P_hat]] (backtracking line search, <= 500 steps). Throws
/// InfeasibleError carrying the best largest-eigenvalue reached on failure.
Eigen::MatrixXd solve_gain_inequality(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& P_s, const Eigen::MatrixXd& P_u,
                                      const ModeProbabilities& probs);

/// Full design for one plant: sweep the pipeline over beta_schedule, then try
/// fallback gains (zero gain when A is Schur, least squares, loss-aware
/// Riccati). Every candidate is gated by check_stochastic_stability; the first
/// stable one is returned with verified = true. When all candidates fail the
/// best-radius candidate comes back with verified = false.
SynthesisResult synthesize(const Plant& plant, const ModeProbabilities& probs,
                           const std::vector<double>& beta_schedule = kDefaultBetaSchedule);

/// Unit-weight infinite-horizon Riccati gain for a control input that is
/// applied only with probability `closed_loop_probability` (and replaced by 0
/// otherwise). Reduces to the standard discrete LQR gain at probability 1.
/// Returns nothing when the fixed-point iteration diverges.
std::optional<Eigen::MatrixXd> lossy_lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                              double closed_loop_probability);

}  // namespace ncs
