#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vsal/raster.hpp"

namespace vsal {

struct ConfusionCounts {
    std::int64_t tp{0};
    std::int64_t fp{0};
    std::int64_t fn{0};
    std::int64_t tn{0};
};

// Per-threshold low-salience recall entry.
struct LsRecallEntry {
    double threshold{0.0};
    std::optional<double> value;  // unset when g_t is empty
    std::int64_t g_t_size{0};
    std::int64_t tp{0};
    std::int64_t fn{0};
};

struct MetricsReport {
    ConfusionCounts counts;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> dice;
    std::vector<LsRecallEntry> lsrecall;
    std::int64_t unscored_pixels{0};  // |ground truth| - |valid LVS pixels|
};

// Pixelwise tallies of prediction against ground truth. Throws
// std::invalid_argument on size mismatch.
ConfusionCounts confusion_counts(const BinaryMask& ground_truth, const BinaryMask& prediction);

// Ratio metrics; unset when the denominator is zero.
std::optional<double> recall(const ConfusionCounts& c);
std::optional<double> precision(const ConfusionCounts& c);
std::optional<double> dice(const ConfusionCounts& c);

// G_t: valid pixels whose value is <= threshold.
BinaryMask low_salience_subset(const ScalarField& lvs, double threshold);

// Recall restricted to g_t. Unset value when g_t is empty.
LsRecallEntry lsrecall(const BinaryMask& g_t, const BinaryMask& prediction, double threshold);

// One entry per threshold, in the given order. The default sweep is
// 0.05, 0.10, ..., 1.00.
std::vector<LsRecallEntry> lsrecall_curve(const ScalarField& lvs, const BinaryMask& prediction,
                                          std::span<const double> thresholds);

std::vector<double> default_thresholds();

// Report over one sample: plain metrics against the full ground truth plus
// the low-salience sweep.
MetricsReport compute_metrics(const BinaryMask& ground_truth, const BinaryMask& prediction,
                              const ScalarField& lvs, std::span<const double> thresholds);

// Pearson correlation between image intensity and LVS value over the valid
// pixels. Unset when fewer than two valid pixels or either series has zero
// variance.
std::optional<double> intensity_lvs_correlation(const GrayImage& image, const ScalarField& lvs);

}  // namespace vsal
