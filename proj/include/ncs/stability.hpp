#pragma once

#include "ncs/model.hpp"

#include <optional>
#include <vector>

namespace ncs {

// Stability margin on the second-moment spectral radius: radii inside
// [1 - kStabilityMargin, 1 + kStabilityMargin] are reported as marginal.
inline constexpr double kStabilityMargin = 1e-9;
// A symmetric matrix counts as negative definite when its largest eigenvalue
// clears zero by this much.
inline constexpr double kDefinitenessTol = 1e-12;

/// Mean-square propagator pi_s (A_s (x) A_s) + pi_u (A_u (x) A_u) of the
/// two-mode jump system with i.i.d. switching, plus its spectral radius.
/// Radius < 1 is equivalent to stochastic stability of the plant.
struct SecondMomentLift {
    Eigen::MatrixXd lifted;  // d^2 x d^2
    double radius = 0.0;
};

/// Witness for the coupled inequalities A_k' P_hat A_k - P_k < 0 with
/// P_hat = pi_s P_s + pi_u P_u (k ranging over the two modes).
struct StabilityCertificate {
    Eigen::MatrixXd P_s;
    Eigen::MatrixXd P_u;
    Eigen::MatrixXd P_hat;
    Eigen::MatrixXd residual_s;  // A_s' P_hat A_s - P_s
    Eigen::MatrixXd residual_u;  // A_u' P_hat A_u - P_u
    double second_moment_radius = 0.0;
};

struct StabilityDecision {
    bool stable = false;
    bool marginal = false;  // radius within kStabilityMargin of 1
    double radius = 0.0;
    std::optional<StabilityCertificate> certificate;  // present iff stable
};

struct CertificateCheck {
    Eigen::MatrixXd residual_s;
    Eigen::MatrixXd residual_u;
    bool valid = false;
};

SecondMomentLift second_moment_lift(const ModePair& modes, const ModeProbabilities& probs);

/// Stable iff the second-moment radius is < 1 - kStabilityMargin. A stable
/// verdict always carries a certificate that was re-verified before return;
/// an unstable one reports the radius as the diagnostic.
StabilityDecision check_stochastic_stability(const ModePair& modes,
                                             const ModeProbabilities& probs);

/// Constructive witness: solves
///   (I - pi_s A_s'(x)A_s' - pi_u A_u'(x)A_u') vec(P_hat) = vec(I)
/// and sets P_k = A_k' P_hat A_k + I, so both residuals equal -I up to solve
/// accuracy and pi_s P_s + pi_u P_u = P_hat by construction. Requires
/// radius < 1; throws InfeasibleError otherwise.
StabilityCertificate build_certificate(const ModePair& modes, const ModeProbabilities& probs);

/// Residuals A_k' P_hat A_k - P_k for caller-supplied P_s, P_u (symmetrized
/// internally; must be positive definite, else std::invalid_argument naming
/// the offending matrix). valid iff both residuals are negative definite.
CertificateCheck verify_certificate(const ModePair& modes, const ModeProbabilities& probs,
                                    const Eigen::MatrixXd& P_s, const Eigen::MatrixXd& P_u);

struct PlantStability {
    int plant_index = 0;
    ModeProbabilities probs;
    StabilityDecision decision;
};

struct NcsAnalysis {
    std::vector<PlantStability> plants;
    bool all_stable = false;
};

/// check_stochastic_stability per plant with its partition-induced mode
/// probabilities; all_stable is the conjunction. Per-plant failures are
/// rethrown with the plant index prepended.
NcsAnalysis analyze_ncs(const NcsModel& model);

}  // namespace ncs
