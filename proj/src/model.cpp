#include "ncs/model.hpp"

#include "ncs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ncs {

namespace {

std::string set_to_string(const std::vector<int>& s) {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "}";
    return os.str();
}

}  // namespace

std::vector<PartitionViolation> validate_partition(const Partition& partition,
                                                   int plant_count, int capacity) {
    if (plant_count < 1)
        throw std::invalid_argument("validate_partition: plant count must be positive");
    if (capacity < 1)
        throw std::invalid_argument("validate_partition: capacity must be positive");
    if (partition.sets.size() != partition.probabilities.size())
        throw std::invalid_argument(
            "validate_partition: sets and probabilities have different lengths");
    if (partition.sets.empty())
        throw std::invalid_argument("validate_partition: partition has no sets");

    for (size_t j = 0; j < partition.sets.size(); ++j) {
        const auto& s = partition.sets[j];
        if (s.empty())
            throw std::invalid_argument("validate_partition: set " + std::to_string(j + 1) +
                                        " is empty");
        std::set<int> seen;
        for (int idx : s) {
            if (idx < 1 || idx > plant_count)
                throw std::invalid_argument("validate_partition: set " + std::to_string(j + 1) +
                                            " references plant index " + std::to_string(idx) +
                                            " outside 1.." + std::to_string(plant_count));
            if (!seen.insert(idx).second)
                throw std::invalid_argument("validate_partition: set " + std::to_string(j + 1) +
                                            " repeats plant index " + std::to_string(idx));
        }
        if (!std::isfinite(partition.probabilities[j]))
            throw std::invalid_argument("validate_partition: probability " +
                                        std::to_string(j + 1) + " is not finite");
    }

    std::vector<PartitionViolation> report;

    // C1: set sizes bounded by the network capacity.
    for (size_t j = 0; j < partition.sets.size(); ++j) {
        if (static_cast<int>(partition.sets[j].size()) > capacity) {
            report.push_back({"C1", "set " + std::to_string(j + 1) + " " +
                                        set_to_string(partition.sets[j]) + " has " +
                                        std::to_string(partition.sets[j].size()) +
                                        " members, capacity is " + std::to_string(capacity)});
            break;
        }
    }

    // C2: pairwise disjoint.
    {
        std::set<int> seen;
        for (const auto& s : partition.sets) {
            bool clash = false;
            for (int idx : s)
                if (!seen.insert(idx).second) clash = true;
            if (clash) {
                report.push_back({"C2", "sets are not pairwise disjoint"});
                break;
            }
        }
    }

    // C3: union covers every plant.
    {
        std::set<int> all;
        for (const auto& s : partition.sets) all.insert(s.begin(), s.end());
        std::vector<int> missing;
        for (int i = 1; i <= plant_count; ++i)
            if (!all.count(i)) missing.push_back(i);
        if (!missing.empty())
            report.push_back({"C3", "plants " + set_to_string(missing) + " are in no set"});
    }

    // C4: probabilities strictly inside (0,1) summing to 1.
    {
        bool open_interval_ok = true;
        for (size_t j = 0; j < partition.probabilities.size(); ++j) {
            double p = partition.probabilities[j];
            if (!(p > 0.0 && p < 1.0)) {
                report.push_back({"C4", "probability " + std::to_string(j + 1) + " = " +
                                            std::to_string(p) +
                                            " is outside the open interval (0,1)"});
                open_interval_ok = false;
                break;
            }
        }
        if (open_interval_ok) {
            double sum = std::accumulate(partition.probabilities.begin(),
                                         partition.probabilities.end(), 0.0);
            if (std::abs(sum - 1.0) > kProbabilitySumTol)
                report.push_back({"C4", "probabilities sum to " + std::to_string(sum) +
                                            ", expected 1"});
        }
    }

    return report;
}

AssumptionReport check_assumption(const Plant& plant) {
    if (!plant.K)
        throw std::invalid_argument("plant " + std::to_string(plant.index) +
                                    " has no gain K; synthesize one first");
    ModePair modes = mode_matrices(plant);
    AssumptionReport report;
    report.open_loop_unstable = linalg::spectral_radius(modes.open_loop) >= 1.0 - kSchurMargin;
    report.closed_loop_schur = linalg::spectral_radius(modes.closed_loop) < 1.0 - kSchurMargin;
    return report;
}

ModePair mode_matrices(const Plant& plant) {
    if (plant.A.rows() != plant.A.cols())
        throw std::invalid_argument("plant " + std::to_string(plant.index) + ": A is not square");
    if (plant.B.rows() != plant.A.rows())
        throw std::invalid_argument("plant " + std::to_string(plant.index) +
                                    ": B row count does not match A");
    if (!plant.K)
        throw std::invalid_argument("plant " + std::to_string(plant.index) +
                                    " has no gain K; synthesize one first");
    const Eigen::MatrixXd& K = *plant.K;
    if (K.rows() != plant.B.cols() || K.cols() != plant.A.rows())
        throw std::invalid_argument("plant " + std::to_string(plant.index) + ": gain K is " +
                                    std::to_string(K.rows()) + "x" + std::to_string(K.cols()) +
                                    ", expected " + std::to_string(plant.B.cols()) + "x" +
                                    std::to_string(plant.A.rows()));
    return ModePair{plant.A + plant.B * K, plant.A};
}

ModeProbabilities mode_probabilities(const Partition& partition, int plant_index,
                                     double loss_probability) {
    if (!(loss_probability >= 0.0 && loss_probability < 1.0))
        throw std::invalid_argument("loss probability " + std::to_string(loss_probability) +
                                    " is outside [0, 1)");
    int hits = 0;
    double p = 0.0;
    for (size_t j = 0; j < partition.sets.size(); ++j) {
        if (std::find(partition.sets[j].begin(), partition.sets[j].end(), plant_index) !=
            partition.sets[j].end()) {
            ++hits;
            p = partition.probabilities[j];
        }
    }
    if (hits == 0)
        throw std::invalid_argument("plant " + std::to_string(plant_index) +
                                    " appears in no partition set");
    if (hits > 1)
        throw std::invalid_argument("plant " + std::to_string(plant_index) +
                                    " appears in more than one partition set");
    ModeProbabilities probs;
    probs.closed_loop = p * (1.0 - loss_probability);
    probs.open_loop = 1.0 - probs.closed_loop;
    return probs;
}

void validate_model(const NcsModel& model) {
    const int n = model.plant_count();
    if (n < 2)
        throw std::invalid_argument("plants: a model needs at least 2 plants, got " +
                                    std::to_string(n));
    for (int i = 0; i < n; ++i) {
        const Plant& plant = model.plants[static_cast<size_t>(i)];
        const std::string where = "plants[" + std::to_string(i + 1) + "]";
        if (plant.A.rows() == 0 || plant.A.rows() != plant.A.cols())
            throw std::invalid_argument(where + ".A: must be square and nonempty");
        if (plant.B.rows() != plant.A.rows() || plant.B.cols() < 1)
            throw std::invalid_argument(where + ".B: row count mismatch with A");
        if (plant.K && (plant.K->rows() != plant.B.cols() || plant.K->cols() != plant.A.rows()))
            throw std::invalid_argument(where + ".K: must be " + std::to_string(plant.B.cols()) +
                                        "x" + std::to_string(plant.A.rows()));
        if (plant.index != i + 1)
            throw std::invalid_argument(where + ": index must equal position, got " +
                                        std::to_string(plant.index));
    }
    if (!(model.network.capacity > 0 && model.network.capacity < n))
        throw std::invalid_argument("network.capacity: 0 < M < N violated (M = " +
                                    std::to_string(model.network.capacity) +
                                    ", N = " + std::to_string(n) + ")");
    if (!(model.network.loss_probability >= 0.0 && model.network.loss_probability < 1.0))
        throw std::invalid_argument("network.loss_probability: must lie in [0, 1)");

    auto violations = validate_partition(model.partition, n, model.network.capacity);
    if (!violations.empty()) {
        std::string msg;
        for (size_t i = 0; i < violations.size(); ++i) {
            const std::string path =
                violations[i].condition == "C4" ? "partition.probabilities" : "partition.sets";
            msg += (i ? "; " : "") + path + ": " + violations[i].condition + " violated (" +
                   violations[i].message + ")";
        }
        throw std::invalid_argument(msg);
    }
}

}  // namespace ncs
