#include "ncs/stability.hpp"

#include "ncs/errors.hpp"
#include "ncs/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ncs {

namespace {

void require_probabilities(const ModeProbabilities& probs) {
    if (!(probs.closed_loop >= 0.0 && probs.closed_loop <= 1.0) ||
        !(probs.open_loop >= 0.0 && probs.open_loop <= 1.0) ||
        std::abs(probs.closed_loop + probs.open_loop - 1.0) > kProbabilitySumTol)
        throw std::invalid_argument("mode probabilities must be in [0,1] and sum to 1");
}

void require_mode_dims(const ModePair& modes) {
    if (modes.closed_loop.rows() != modes.closed_loop.cols() ||
        modes.open_loop.rows() != modes.open_loop.cols())
        throw std::invalid_argument("mode matrices must be square");
    if (modes.closed_loop.rows() != modes.open_loop.rows())
        throw std::invalid_argument("closed-loop and open-loop matrices differ in size");
}

}  // namespace

SecondMomentLift second_moment_lift(const ModePair& modes, const ModeProbabilities& probs) {
    require_mode_dims(modes);
    require_probabilities(probs);

    SecondMomentLift lift;
    lift.lifted = probs.closed_loop * linalg::kron(modes.closed_loop, modes.closed_loop) +
                  probs.open_loop * linalg::kron(modes.open_loop, modes.open_loop);
    lift.radius = linalg::spectral_radius(lift.lifted);
    return lift;
}

StabilityCertificate build_certificate(const ModePair& modes, const ModeProbabilities& probs) {
    require_mode_dims(modes);
    require_probabilities(probs);

    const Eigen::Index d = modes.closed_loop.rows();
    SecondMomentLift lift = second_moment_lift(modes, probs);
    if (!(lift.radius < 1.0))
        throw InfeasibleError("certificate construction: second-moment radius " +
                                  std::to_string(lift.radius) +
                                  " >= 1, the coupled inequalities are infeasible",
                              lift.radius);

    // vec(A' X A) = (A' (x) A') vec(X), so the fixed point
    //   P_hat = pi_s A_s' P_hat A_s + pi_u A_u' P_hat A_u + I
    // becomes one dense linear solve in the stacked unknowns.
    const Eigen::MatrixXd As_t = modes.closed_loop.transpose();
    const Eigen::MatrixXd Au_t = modes.open_loop.transpose();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(d * d, d * d) -
                             probs.closed_loop * linalg::kron(As_t, As_t) -
                             probs.open_loop * linalg::kron(Au_t, Au_t);
    Eigen::VectorXd rhs = linalg::vec(Eigen::MatrixXd::Identity(d, d));
    Eigen::VectorXd solution = system.colPivHouseholderQr().solve(rhs);
    if (!solution.allFinite())
        throw NumericError("certificate construction: linear solve produced non-finite entries",
                           system);

    StabilityCertificate cert;
    cert.second_moment_radius = lift.radius;
    cert.P_hat = linalg::symmetrize(linalg::unvec(solution, d, d));
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    cert.P_s = linalg::symmetrize(As_t * cert.P_hat * modes.closed_loop) + identity;
    cert.P_u = linalg::symmetrize(Au_t * cert.P_hat * modes.open_loop) + identity;
    cert.residual_s = linalg::symmetrize(As_t * cert.P_hat * modes.closed_loop - cert.P_s);
    cert.residual_u = linalg::symmetrize(Au_t * cert.P_hat * modes.open_loop - cert.P_u);
    return cert;
}

CertificateCheck verify_certificate(const ModePair& modes, const ModeProbabilities& probs,
                                    const Eigen::MatrixXd& P_s, const Eigen::MatrixXd& P_u) {
    require_mode_dims(modes);
    require_probabilities(probs);
    const Eigen::Index d = modes.closed_loop.rows();
    if (P_s.rows() != d || P_s.cols() != d || P_u.rows() != d || P_u.cols() != d)
        throw std::invalid_argument("certificate matrices do not match the plant dimension");

    const Eigen::MatrixXd Ps = linalg::symmetrize(P_s);
    const Eigen::MatrixXd Pu = linalg::symmetrize(P_u);
    if (!linalg::is_positive_definite(Ps))
        throw std::invalid_argument("P_s is not positive definite");
    if (!linalg::is_positive_definite(Pu))
        throw std::invalid_argument("P_u is not positive definite");

    const Eigen::MatrixXd P_hat = probs.closed_loop * Ps + probs.open_loop * Pu;

    CertificateCheck check;
    check.residual_s = linalg::symmetrize(
        modes.closed_loop.transpose() * P_hat * modes.closed_loop - Ps);
    check.residual_u = linalg::symmetrize(
        modes.open_loop.transpose() * P_hat * modes.open_loop - Pu);
    check.valid = linalg::max_eigenvalue(check.residual_s) < -kDefinitenessTol &&
                  linalg::max_eigenvalue(check.residual_u) < -kDefinitenessTol;
    return check;
}

StabilityDecision check_stochastic_stability(const ModePair& modes,
                                             const ModeProbabilities& probs) {
    SecondMomentLift lift = second_moment_lift(modes, probs);

    StabilityDecision decision;
    decision.radius = lift.radius;
    decision.marginal = std::abs(lift.radius - 1.0) <= kStabilityMargin;
    decision.stable = lift.radius < 1.0 - kStabilityMargin;
    if (!decision.stable) return decision;

    StabilityCertificate cert = build_certificate(modes, probs);
    CertificateCheck check = verify_certificate(modes, probs, cert.P_s, cert.P_u);
    if (!check.valid)
        throw NumericError(
            "constructed certificate failed verification (radius " +
                std::to_string(lift.radius) + ")",
            cert.P_hat);
    decision.certificate = std::move(cert);
    return decision;
}

NcsAnalysis analyze_ncs(const NcsModel& model) {
    NcsAnalysis analysis;
    analysis.all_stable = true;
    analysis.plants.reserve(model.plants.size());
    for (const Plant& plant : model.plants) {
        try {
            PlantStability entry;
            entry.plant_index = plant.index;
            entry.probs = mode_probabilities(model.partition, plant.index,
                                             model.network.loss_probability);
            entry.decision = check_stochastic_stability(mode_matrices(plant), entry.probs);
            analysis.all_stable = analysis.all_stable && entry.decision.stable;
            analysis.plants.push_back(std::move(entry));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("plant " + std::to_string(plant.index) + ": " + e.what(),
                                  e.value());
        } catch (const NumericError& e) {
            throw NumericError("plant " + std::to_string(plant.index) + ": " + e.what(),
                               e.offending_matrix());
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            if (what.rfind("plant ", 0) == 0) throw;
            throw std::invalid_argument("plant " + std::to_string(plant.index) + ": " + what);
        }
    }
    return analysis;
}

}  // namespace ncs
