#include "nanosim/detector.hpp"

#include "nanosim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nanosim {

namespace {

double median_in_place(std::vector<double>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

// Fills unusable evaluation points from the nearest usable ones (linear in between).
void fill_gaps(std::vector<double>& values, const std::vector<bool>& ok) {
    std::size_t prev = values.size();
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!ok[j]) continue;
        if (prev == values.size()) {
            for (std::size_t i = 0; i < j; ++i) values[i] = values[j];
        } else {
            for (std::size_t i = prev + 1; i < j; ++i) {
                const double t = static_cast<double>(i - prev) / static_cast<double>(j - prev);
                values[i] = values[prev] + t * (values[j] - values[prev]);
            }
        }
        prev = j;
    }
    if (prev == values.size()) return;  // nothing usable; leave as computed
    for (std::size_t i = prev + 1; i < values.size(); ++i) values[i] = values[prev];
}

std::vector<DetectionRecord> detect(std::span<const double> signal, const BaselineEstimate& est, double k) {
    const std::size_t n = signal.size();
    auto drop = [&](std::size_t i) {
        // Floor keeps exactly-flat baselines from triggering on rounding residue.
        return std::max(k * est.sigma[i], 1e-9 * (1.0 + std::fabs(est.baseline[i])));
    };

    std::vector<DetectionRecord> out;
    std::size_t i = 0;
    while (i < n) {
        if (!(signal[i] < est.baseline[i] - drop(i))) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        double run_min = signal[i];
        std::size_t min_at = i;
        while (run_end < n && signal[run_end] < est.baseline[run_end] - drop(run_end)) {
            if (signal[run_end] < run_min) {
                run_min = signal[run_end];
                min_at = run_end;
            }
            ++run_end;
        }
        const double amplitude = est.baseline[min_at] - run_min;
        auto below_half = [&](std::size_t j) { return signal[j] < est.baseline[j] - 0.5 * amplitude; };

        // Half-depth span containing the run minimum.
        std::size_t start = min_at;
        while (start > 0 && below_half(start - 1)) --start;
        std::size_t end = min_at + 1;
        while (end < n && below_half(end)) ++end;
        // Trigger samples past the half-depth span (an RC tail, say) are skipped
        // but do not stretch the reported boundaries.

        if (!out.empty() && start <= static_cast<std::size_t>(out.back().end)) {
            auto& prev = out.back();
            prev.end = static_cast<std::int64_t>(std::max<std::size_t>(end, static_cast<std::size_t>(prev.end)));
            prev.width = prev.end - prev.start;
            prev.amplitude = std::max(*prev.amplitude, amplitude);
        } else {
            out.push_back({static_cast<std::int64_t>(start), static_cast<std::int64_t>(end),
                           static_cast<std::int64_t>(end - start), amplitude});
        }
        i = std::max(end, run_end);
    }
    return out;
}

}  // namespace

BaselineEstimate moving_baseline(std::span<const double> signal, std::size_t window, const BaselineOptions& options) {
    const std::size_t n = signal.size();
    const std::size_t hop = std::max<std::size_t>(1, window / 8);
    const std::size_t half = window / 2;
    const auto* exclude = options.exclude;

    std::vector<std::size_t> centers;
    for (std::size_t c = 0; c < n; c += hop) centers.push_back(c);
    if (centers.back() != n - 1) centers.push_back(n - 1);

    std::vector<double> med(centers.size()), sig(centers.size());
    std::vector<bool> usable(centers.size(), true);
    std::vector<double> scratch;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const std::size_t lo = centers[j] > half ? centers[j] - half : 0;
        const std::size_t hi = std::min(n, centers[j] + half + 1);
        scratch.clear();
        for (std::size_t i = lo; i < hi; ++i)
            if (!exclude || !(*exclude)[i]) scratch.push_back(signal[i]);
        if (scratch.size() * 4 < hi - lo) {
            usable[j] = false;
            scratch.assign(signal.begin() + static_cast<std::ptrdiff_t>(lo),
                           signal.begin() + static_cast<std::ptrdiff_t>(hi));
        }
        med[j] = median_in_place(scratch);
        for (double& v : scratch) v = std::fabs(v - med[j]);
        sig[j] = 1.4826 * median_in_place(scratch);
    }
    fill_gaps(med, usable);
    fill_gaps(sig, usable);

    if (options.dip_guard) {
        // Windows straddling event edges see a bimodal sample and an inflated MAD.
        // Most windows are event-free, so their typical sigma bounds the rest.
        std::vector<double> tmp = sig;
        const double typical = median_in_place(tmp);
        for (double& v : sig) v = std::min(v, 1.5 * typical);

        const std::size_t reach = std::max<std::size_t>(1, window / hop);
        std::vector<double> med_env = med, sig_env = sig;
        auto argmax = [&](std::size_t lo, std::size_t hi) {
            return static_cast<std::size_t>(std::max_element(med.begin() + static_cast<std::ptrdiff_t>(lo),
                                                             med.begin() + static_cast<std::ptrdiff_t>(hi)) -
                                            med.begin());
        };
        for (std::size_t j = 0; j < med.size(); ++j) {
            const std::size_t left = argmax(j > reach ? j - reach : 0, j + 1);
            const std::size_t right = argmax(j, std::min(med.size(), j + reach + 1));
            const std::size_t src = med[left] < med[right] ? left : right;
            if (med[src] - med[j] > 2.0 * sig[src]) {
                med_env[j] = med[src];
                sig_env[j] = sig[src];
            }
        }
        med.swap(med_env);
        sig.swap(sig_env);
    }

    BaselineEstimate est;
    est.baseline.resize(n);
    est.sigma.resize(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (j + 1 < centers.size() && centers[j + 1] <= i) ++j;
        if (j + 1 == centers.size() || centers[j] == i) {
            est.baseline[i] = med[j];
            est.sigma[i] = sig[j];
            continue;
        }
        const double t = static_cast<double>(i - centers[j]) / static_cast<double>(centers[j + 1] - centers[j]);
        est.baseline[i] = med[j] + t * (med[j + 1] - med[j]);
        est.sigma[i] = sig[j] + t * (sig[j + 1] - sig[j]);
    }
    return est;
}

std::vector<DetectionRecord> threshold_detector(std::span<const double> signal, std::size_t window, double k) {
    if (window < 8) throw ConfigError("window", "must be >= 8");
    if (window >= signal.size()) throw ConfigError("window", "must be shorter than the signal");
    if (!(k > 0.0)) throw ConfigError("k", "must be > 0");

    BaselineOptions options;
    options.dip_guard = true;
    auto found = detect(signal, moving_baseline(signal, window, options), k);

    std::vector<bool> mask(signal.size());
    options.exclude = &mask;
    for (int pass = 0; pass < 2; ++pass) {
        std::fill(mask.begin(), mask.end(), false);
        for (const auto& d : found) {
            // Pad by half the event width so slow edges stay out of the statistics.
            const auto pad = d.width / 2 + 1;
            const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(0, d.start - pad));
            const auto hi = static_cast<std::size_t>(std::min<std::int64_t>(static_cast<std::int64_t>(signal.size()), d.end + pad));
            std::fill(mask.begin() + static_cast<std::ptrdiff_t>(lo), mask.begin() + static_cast<std::ptrdiff_t>(hi), true);
        }
        found = detect(signal, moving_baseline(signal, window, options), k);
    }
    return found;
}

}  // namespace nanosim
