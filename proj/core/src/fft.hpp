#pragma once

#include <complex>
#include <mutex>

#include <fftw3.h>

namespace roughpam::detail {

// FFTW's planner is not thread-safe; executing an existing plan is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Length-n real <-> half-complex transform between two owned, SIMD-aligned
// buffers, unnormalized: forward X_k = sum_j x_j e^{-2 pi i jk/n},
// backward x_j = sum_k X_k e^{2 pi i jk/n} (backward overwrites the spectrum).
class RealFft {
public:
    explicit RealFft(int n, unsigned flags = FFTW_ESTIMATE) : n_(n) {
        real_ = fftw_alloc_real(static_cast<std::size_t>(n));
        spec_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, flags);
        backward_ = fftw_plan_dft_c2r_1d(n, spec_, real_, flags);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(backward_);
        }
        fftw_free(real_);
        fftw_free(spec_);
    }

    int size() const { return n_; }
    int spectrum_size() const { return n_ / 2 + 1; }
    double* real() { return real_; }
    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }

    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

private:
    int n_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan forward_;
    fftw_plan backward_;
};

}  // namespace roughpam::detail
