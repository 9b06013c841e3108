#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace ncs {

// Thresholds shared across the analysis code. A matrix counts as Schur only
// when its spectral radius clears the unit circle by kSchurMargin.
inline constexpr double kSchurMargin = 1e-9;
inline constexpr double kProbabilitySumTol = 1e-9;

/// One discrete-time linear plant x(t+1) = A x(t) + B u(t) with an optional
/// state-feedback gain u = K x. Indices are 1-based everywhere.
struct Plant {
    int index = 1;
    Eigen::MatrixXd A;                 // d x d
    Eigen::MatrixXd B;                 // d x m
    std::optional<Eigen::MatrixXd> K;  // m x d

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return B.cols(); }
};

/// Closed-loop (A + B K) and open-loop (A) system matrices of one plant.
struct ModePair {
    Eigen::MatrixXd closed_loop;
    Eigen::MatrixXd open_loop;
};

/// Shared medium: at most `capacity` plants communicate per step and a packet
/// in flight is dropped with probability `loss_probability`.
struct NetworkConfig {
    int capacity = 1;
    double loss_probability = 0.0;
};

/// Access groups with selection probabilities: at each step group j gets the
/// network with probability p_j. Plant indices are 1-based.
struct Partition {
    std::vector<std::vector<int>> sets;
    std::vector<double> probabilities;

    int set_count() const { return static_cast<int>(sets.size()); }
};

struct NcsModel {
    std::vector<Plant> plants;
    NetworkConfig network;
    Partition partition;

    int plant_count() const { return static_cast<int>(plants.size()); }
    const Plant& plant(int index) const { return plants.at(static_cast<size_t>(index - 1)); }
};

/// Per-step probability that a plant runs closed loop (scheduled and packet
/// delivered, p_j (1 - q)) vs open loop. The two always sum to one exactly.
struct ModeProbabilities {
    double closed_loop = 0.0;
    double open_loop = 1.0;
};

struct AssumptionReport {
    bool open_loop_unstable = false;
    bool closed_loop_schur = false;
};

struct PartitionViolation {
    std::string condition;  // one of "C1".."C4"
    std::string message;
};

/// Check the admissibility conditions of an access partition:
///   C1  every set has at most `capacity` members,
///   C2  sets are pairwise disjoint,
///   C3  the sets cover all plants 1..plant_count,
///   C4  probabilities lie strictly inside (0,1) and sum to 1 (tol 1e-9).
/// Returns one entry per violated condition (empty means admissible).
/// Malformed input (empty set, repeated index inside a set, index outside
/// 1..plant_count, size mismatch) throws std::invalid_argument instead.
std::vector<PartitionViolation> validate_partition(const Partition& partition,
                                                   int plant_count, int capacity);

/// Spectral-radius test of the standing assumption: A unstable, A + B K Schur.
/// Requires a gain; throws std::invalid_argument telling the caller to run
/// synthesis first when K is missing.
AssumptionReport check_assumption(const Plant& plant);

/// A + B K and A. Requires a gain of shape m x d.
ModePair mode_matrices(const Plant& plant);

/// Closed-loop probability p_j (1 - q) for the unique set containing the
/// plant, and its complement. Throws when the plant is not in exactly one set
/// or when loss_probability is outside [0, 1).
ModeProbabilities mode_probabilities(const Partition& partition, int plant_index,
                                     double loss_probability);

/// Full structural validation of a model (plant dimensions, 0 < M < N,
/// 0 <= q < 1, partition admissible). Throws std::invalid_argument with a
/// path-style message on the first failure.
void validate_model(const NcsModel& model);

}  // namespace ncs
