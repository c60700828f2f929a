#pragma once

// Probabilistic measures over a finite weighted operational profile:
// misclassification rate (pfd), explanation-inconsistency rate, and the
// three-part ledger of the generalisation error.

#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"

#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace cbi {

inline constexpr double kWeightSumTolerance = 1e-9;

struct ProfileEntry
{
    std::string point_id;
    double weight = 0.0;
};

/// Probability of each input being selected in operation.
class OperationalProfile
{
public:
    OperationalProfile() = default;

    explicit OperationalProfile(std::vector<ProfileEntry> entries) : entries_(std::move(entries))
    {
        std::unordered_set<std::string> seen;
        detail::CompensatedSum total;
        for (const auto& e : entries_) {
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
                throw InvalidDataset("profile weight of '" + e.point_id + "' is negative or not finite");
            }
            if (!seen.insert(e.point_id).second) {
                throw InvalidDataset("duplicate point id '" + e.point_id + "'");
            }
            total.add(e.weight);
        }
        if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
            throw InvalidDataset("profile weights sum to " + std::to_string(total.value()) + ", expected 1");
        }
    }

    [[nodiscard]] const std::vector<ProfileEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<ProfileEntry> entries_;
};

struct MeasuredItem
{
    std::string point_id;
    double weight = 0.0;
    /// 1{f_N(x) != f(x)} for pfd, explanation inconsistency for interpretability.
    bool disagree = false;
};

class MeasuredDataset
{
public:
    MeasuredDataset() = default;

    /// Throws InvalidDataset unless the weights form an operational profile.
    explicit MeasuredDataset(std::vector<MeasuredItem> items) : items_(std::move(items))
    {
        std::vector<ProfileEntry> entries;
        entries.reserve(items_.size());
        for (const auto& it : items_) {
            entries.push_back({it.point_id, it.weight});
        }
        OperationalProfile check(std::move(entries));
    }

    [[nodiscard]] const std::vector<MeasuredItem>& items() const noexcept { return items_; }

private:
    std::vector<MeasuredItem> items_;
};

namespace detail {

[[nodiscard]] inline double flagged_mass(const MeasuredDataset& data)
{
    CompensatedSum acc;
    for (const auto& it : data.items()) {
        if (it.disagree) {
            acc.add(it.weight);
        }
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

} // namespace detail

/// Operational-profile weighted misclassification rate.
[[nodiscard]] inline double empirical_pfd(const MeasuredDataset& data)
{
    return detail::flagged_mass(data);
}

/// Same arithmetic as empirical_pfd; `disagree` marks inconsistent explanations.
[[nodiscard]] inline double interpretability_measure(const MeasuredDataset& data)
{
    return detail::flagged_mass(data);
}

/// Asserted estimates of the three error components, each tagged with the
/// lifecycle stage that produced it.
struct ErrorDecomposition
{
    double bayes_error = 0.0;
    double approximation_error = 0.0;
    double estimation_error = 0.0;
    std::string bayes_provenance;
    std::string approximation_provenance;
    std::string estimation_provenance;
};

inline void validate(const ErrorDecomposition& d)
{
    const std::pair<const char*, double> parts[] = {
        {"bayes_error", d.bayes_error},
        {"approximation_error", d.approximation_error},
        {"estimation_error", d.estimation_error},
    };
    for (const auto& [name, v] : parts) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InvalidDecomposition(std::string(name) + " must be a non-negative probability");
        }
    }
    if (d.bayes_error + d.approximation_error + d.estimation_error > 1.0 + kWeightSumTolerance) {
        throw InvalidDecomposition("error components sum above 1");
    }
}

[[nodiscard]] inline double total_error(const ErrorDecomposition& d)
{
    validate(d);
    return std::min(1.0, d.bayes_error + d.approximation_error + d.estimation_error);
}

} // namespace cbi
