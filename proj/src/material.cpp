#include "casispec/material.hpp"

#include <bit>

#include "casispec/errors.hpp"

namespace casispec {

ModelMaterial::ModelMaterial(DielectricModel model) : model_(std::move(model)) {
    model_.validate();
}

StaticResponse ModelMaterial::static_response() const {
    if (model_.drude) return {true, 0.0};
    double eps0 = 1.0;
    for (const auto& osc : model_.oscillators)
        eps0 += osc.strength * osc.strength / (osc.resonance * osc.resonance);
    return {false, eps0};
}

ConstantMaterial::ConstantMaterial(double eps) : eps_(eps) {
    if (!(eps >= 1.0)) throw input_error("constant material: eps(i xi) must be >= 1");
}

TabulatedMaterial::TabulatedMaterial(TabulatedOptics data, double rel_tol)
    : data_(std::move(data)), rel_tol_(rel_tol) {
    data_.validate();
    if (data_.low_freq_extrapolation.plasma_frequency > 0.0)
        static_ = {true, 0.0};
    else
        static_ = {false, kk_static_limit(data_, rel_tol_)};
}

double TabulatedMaterial::eps_imag_axis(double xi) const {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(xi);
    {
        std::lock_guard lock(mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const double eps = kk_continuation(data_, xi, rel_tol_);
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, eps).first->second;
}

}  // namespace casispec
