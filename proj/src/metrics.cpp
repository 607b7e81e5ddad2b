#include "vsal/metrics.hpp"

#include <cmath>

namespace vsal {

ConfusionCounts confusion_counts(const BinaryMask& ground_truth, const BinaryMask& prediction) {
    if (ground_truth.width() != prediction.width() ||
        ground_truth.height() != prediction.height())
        throw std::invalid_argument("confusion_counts: mask size mismatch");
    ConfusionCounts c;
    for (int r = 0; r < ground_truth.height(); ++r) {
        for (int col = 0; col < ground_truth.width(); ++col) {
            const bool g = ground_truth.at(r, col);
            const bool p = prediction.at(r, col);
            if (g && p)
                ++c.tp;
            else if (g && !p)
                ++c.fn;
            else if (!g && p)
                ++c.fp;
            else
                ++c.tn;
        }
    }
    return c;
}

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

std::optional<double> precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

std::optional<double> dice(const ConfusionCounts& c) {
    return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
}

BinaryMask low_salience_subset(const ScalarField& lvs, double threshold) {
    BinaryMask out(lvs.width(), lvs.height());
    for (int r = 0; r < lvs.height(); ++r)
        for (int c = 0; c < lvs.width(); ++c)
            out.set(r, c, lvs.valid(r, c) && lvs.value(r, c) <= threshold);
    return out;
}

LsRecallEntry lsrecall(const BinaryMask& g_t, const BinaryMask& prediction, double threshold) {
    if (g_t.width() != prediction.width() || g_t.height() != prediction.height())
        throw std::invalid_argument("lsrecall: mask size mismatch");
    LsRecallEntry entry;
    entry.threshold = threshold;
    for (int r = 0; r < g_t.height(); ++r) {
        for (int c = 0; c < g_t.width(); ++c) {
            if (!g_t.at(r, c)) continue;
            if (prediction.at(r, c))
                ++entry.tp;
            else
                ++entry.fn;
        }
    }
    entry.g_t_size = entry.tp + entry.fn;
    if (entry.g_t_size > 0)
        entry.value = static_cast<double>(entry.tp) / static_cast<double>(entry.g_t_size);
    return entry;
}

std::vector<LsRecallEntry> lsrecall_curve(const ScalarField& lvs, const BinaryMask& prediction,
                                          std::span<const double> thresholds) {
    std::vector<LsRecallEntry> out;
    out.reserve(thresholds.size());
    for (double t : thresholds)
        out.push_back(lsrecall(low_salience_subset(lvs, t), prediction, t));
    return out;
}

std::vector<double> default_thresholds() {
    std::vector<double> out;
    for (int i = 1; i <= 20; ++i) out.push_back(i / 20.0);
    return out;
}

MetricsReport compute_metrics(const BinaryMask& ground_truth, const BinaryMask& prediction,
                              const ScalarField& lvs, std::span<const double> thresholds) {
    if (ground_truth.width() != lvs.width() || ground_truth.height() != lvs.height())
        throw std::invalid_argument("compute_metrics: field size mismatch");
    MetricsReport report;
    report.counts = confusion_counts(ground_truth, prediction);
    report.recall = recall(report.counts);
    report.precision = precision(report.counts);
    report.dice = dice(report.counts);
    report.lsrecall = lsrecall_curve(lvs, prediction, thresholds);
    report.unscored_pixels = ground_truth.count() - lvs.valid_count();
    return report;
}

std::optional<double> intensity_lvs_correlation(const GrayImage& image, const ScalarField& lvs) {
    if (image.width() != lvs.width() || image.height() != lvs.height())
        throw std::invalid_argument("intensity_lvs_correlation: size mismatch");
    std::int64_t n = 0;
    double mean_x = 0.0, mean_y = 0.0;
    for (int r = 0; r < lvs.height(); ++r) {
        for (int c = 0; c < lvs.width(); ++c) {
            if (!lvs.valid(r, c)) continue;
            ++n;
            mean_x += image.at(r, c);
            mean_y += lvs.value(r, c);
        }
    }
    if (n < 2) return std::nullopt;
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int r = 0; r < lvs.height(); ++r) {
        for (int c = 0; c < lvs.width(); ++c) {
            if (!lvs.valid(r, c)) continue;
            const double dx = image.at(r, c) - mean_x;
            const double dy = lvs.value(r, c) - mean_y;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace vsal
