#include "gbevolve/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gbevolve::spectral {

namespace {

// fftw planner calls are not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE));
    }
    if (!plan) throw std::runtime_error("fftw: failed to create r2c plan");
    fftw_execute(plan.get());
    return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> coeffs, std::size_t n) {
    if (coeffs.size() != n / 2 + 1) throw std::invalid_argument("spectral::inverse: coefficient count mismatch");
    // c2r destroys its input
    std::vector<std::complex<double>> in(coeffs.begin(), coeffs.end());
    std::vector<double> out(n);
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                        out.data(), FFTW_ESTIMATE));
    }
    if (!plan) throw std::runtime_error("fftw: failed to create c2r plan");
    fftw_execute(plan.get());
    const double scale = 1.0 / static_cast<double>(n);
    std::ranges::for_each(out, [scale](double& v) { v *= scale; });
    return out;
}

}  // namespace gbevolve::spectral
