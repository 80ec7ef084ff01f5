#pragma once

/*
 * Thin wrapper over FFTW for in-place N-dimensional transforms of a lattice
 * field with interleaved coin components (site-major, coin fastest).
 */

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace qwalk {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

// sign: FFTW_FORWARD (-1) applies sum_x e^{-i k.x}; FFTW_BACKWARD the inverse
// kernel. The backward transform is normalized by 1/nsites here.
inline void dft_inplace(std::vector<std::complex<double>>& data,
                        const std::vector<int>& shape, int ncomp, int sign) {
    std::size_t nsites = 1;
    for (int s : shape) nsites *= std::size_t(s);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_many_dft(int(shape.size()), shape.data(), ncomp, ptr, nullptr,
                                  ncomp, 1, ptr, nullptr, ncomp, 1, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (sign == FFTW_BACKWARD) {
        const double inv = 1.0 / double(nsites);
        for (auto& z : data) z *= inv;
    }
}

}  // namespace qwalk
