#include "gtsfde/fft.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

#include <fftw3.h>

namespace gtsfde::fft {

namespace {

// The FFTW planner is not reentrant; executing a plan on its own buffers is.
// Plans are cached per thread so concurrent runs never share buffers.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    std::size_t n = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd{}, bwd{};

    explicit PlanPair(std::size_t size) : n(size) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = fftw_alloc_complex(n);
        fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~PlanPair() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
};

PlanPair& plan_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<PlanPair>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PlanPair>(n);
    return *slot;
}

}  // namespace

void forward(std::span<std::complex<double>> data) {
    auto& plan = plan_for(data.size());
    auto* buf = reinterpret_cast<std::complex<double>*>(plan.buf);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(plan.fwd);
    std::copy(buf, buf + data.size(), data.begin());
}

void inverse(std::span<std::complex<double>> data) {
    auto& plan = plan_for(data.size());
    auto* buf = reinterpret_cast<std::complex<double>*>(plan.buf);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(plan.bwd);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = buf[i] * scale;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace gtsfde::fft
