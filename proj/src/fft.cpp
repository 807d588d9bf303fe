#include "nanosim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace nanosim::fft {
namespace {

// The FFTW planner is not reentrant; execution of a finished plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* ptr;
};

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {
        if (!plan_) throw std::runtime_error("fftw: plan creation failed");
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t bins = n / 2 + 1;
    FftwBuffer in(sizeof(double) * n);
    FftwBuffer out(sizeof(fftw_complex) * bins);
    auto* in_d = static_cast<double*>(in.ptr);
    auto* out_c = static_cast<fftw_complex*>(out.ptr);
    fftw_plan raw;
    {
        std::lock_guard lock(planner_mutex());
        raw = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_d, out_c, FFTW_ESTIMATE);
    }
    Plan plan(raw);
    std::copy(x.begin(), x.end(), in_d);
    plan.execute();
    std::vector<std::complex<double>> result(bins);
    for (std::size_t k = 0; k < bins; ++k) result[k] = {out_c[k][0], out_c[k][1]};
    return result;
}

std::vector<double> inverse(std::span<const std::complex<double>> bins, std::size_t n) {
    if (n == 0) return {};
    if (bins.size() != n / 2 + 1) throw std::invalid_argument("fft::inverse: bin count does not match length");
    FftwBuffer in(sizeof(fftw_complex) * bins.size());
    FftwBuffer out(sizeof(double) * n);
    auto* in_c = static_cast<fftw_complex*>(in.ptr);
    auto* out_d = static_cast<double*>(out.ptr);
    fftw_plan raw;
    {
        std::lock_guard lock(planner_mutex());
        raw = fftw_plan_dft_c2r_1d(static_cast<int>(n), in_c, out_d, FFTW_ESTIMATE);
    }
    Plan plan(raw);
    // c2r destroys its input, so the copy happens after planning.
    for (std::size_t k = 0; k < bins.size(); ++k) {
        in_c[k][0] = bins[k].real();
        in_c[k][1] = bins[k].imag();
    }
    plan.execute();
    const double scale = 1.0 / static_cast<double>(n);
    std::vector<double> result(out_d, out_d + n);
    for (double& v : result) v *= scale;
    return result;
}

std::size_t smooth_size(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

}  // namespace nanosim::fft
