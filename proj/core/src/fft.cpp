#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <tuple>

namespace intercept::dsp::detail {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

// Grow-only SIMD-aligned buffer. Every buffer comes from fftw_malloc, so a
// plan made on one can execute on any other through the new-array interface.
template <typename T>
class Buffer {
public:
    std::span<T> view(std::size_t n) {
        if (n > capacity_) {
            data_.reset(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
            if (!data_) {
                throw std::bad_alloc();
            }
            capacity_ = n;
        }
        return {data_.get(), n};
    }

private:
    std::unique_ptr<T, FftwFree> data_;
    std::size_t capacity_ = 0;
};

struct Workspace {
    Buffer<double> real;
    Buffer<Complex> time;
    Buffer<Complex> freq;
};

Workspace& workspace() {
    thread_local Workspace w;
    return w;
}

fftw_complex* raw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

enum class Kind { Forward, Inverse, RealForward, RealInverse };

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are cached for the life of the process. FFTW_ESTIMATE leaves the
// arrays untouched while planning, so the caller's buffers can be used.
class PlanCache {
public:
    fftw_plan get(std::size_t n, Kind kind, void* in, void* out) {
        const std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(n, kind);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        const int len = static_cast<int>(n);
        fftw_plan plan = nullptr;
        switch (kind) {
            case Kind::Forward:
            case Kind::Inverse:
                plan = fftw_plan_dft_1d(len, static_cast<fftw_complex*>(in), static_cast<fftw_complex*>(out),
                                        kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
                break;
            case Kind::RealForward:
                plan = fftw_plan_dft_r2c_1d(len, static_cast<double*>(in), static_cast<fftw_complex*>(out),
                                            FFTW_ESTIMATE);
                break;
            case Kind::RealInverse:
                plan = fftw_plan_dft_c2r_1d(len, static_cast<fftw_complex*>(in), static_cast<double*>(out),
                                            FFTW_ESTIMATE);
                break;
        }
        if (plan == nullptr) {
            throw std::bad_alloc();
        }
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, Kind>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

std::span<Complex> forward(std::span<const double> x) {
    auto& w = workspace();
    const auto in = w.time.view(x.size());
    const auto out = w.freq.view(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        in[i] = Complex{x[i], 0.0};
    }
    fftw_execute_dft(cache().get(x.size(), Kind::Forward, in.data(), out.data()), raw(in.data()), raw(out.data()));
    return out;
}

std::span<const Complex> inverse(std::span<const Complex> bins) {
    auto& w = workspace();
    const auto out = w.time.view(bins.size());
    auto* in = const_cast<Complex*>(bins.data());
    fftw_execute_dft(cache().get(bins.size(), Kind::Inverse, in, out.data()), raw(in), raw(out.data()));
    return out;
}

std::span<Complex> forward_half(std::span<const double> x) {
    auto& w = workspace();
    const auto in = w.real.view(x.size());
    const auto out = w.freq.view(x.size() / 2 + 1);
    std::copy(x.begin(), x.end(), in.begin());
    fftw_execute_dft_r2c(cache().get(x.size(), Kind::RealForward, in.data(), out.data()), in.data(),
                         raw(out.data()));
    return out;
}

std::span<const double> inverse_half(std::span<Complex> bins, std::size_t n) {
    auto& w = workspace();
    const auto out = w.real.view(n);
    fftw_execute_dft_c2r(cache().get(n, Kind::RealInverse, bins.data(), out.data()), raw(bins.data()), out.data());
    return out;
}

}  // namespace intercept::dsp::detail
