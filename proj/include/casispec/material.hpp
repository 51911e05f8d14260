#pragma once

#include <cstdint>
#include <mutex>
#include <unordered_map>

#include "casispec/dielectric.hpp"

namespace casispec {

// Behaviour of an interface in the static (xi -> 0) limit of the Matsubara
// sum. Materials with free carriers give r_TM -> 1 there; pure dielectrics
// keep a finite static permittivity.
struct StaticResponse {
    bool conducting = false;
    double eps_static = 1.0;  // used only when !conducting
};

// Imaginary-axis dielectric response provider for the Lifshitz solver.
// Implementations must be safe to call concurrently.
class Material {
public:
    virtual ~Material() = default;
    virtual double eps_imag_axis(double xi) const = 0;  // xi > 0, returns eps(i xi) >= 1
    virtual StaticResponse static_response() const = 0;
};

class ModelMaterial final : public Material {
public:
    explicit ModelMaterial(DielectricModel model);
    double eps_imag_axis(double xi) const override { return eval_imag(model_, xi); }
    StaticResponse static_response() const override;
    const DielectricModel& model() const { return model_; }

private:
    DielectricModel model_;
};

// Fixed eps(i xi). eps = 1 is vacuum; a very large constant approximates an
// ideal metal.
class ConstantMaterial final : public Material {
public:
    explicit ConstantMaterial(double eps);
    double eps_imag_axis(double) const override { return eps_; }
    StaticResponse static_response() const override { return {false, eps_}; }

private:
    double eps_;
};

// Kramers-Kronig continuation of tabulated optics. Continuations are
// memoized per xi: Matsubara frequencies repeat across separations and each
// continuation costs an integral.
class TabulatedMaterial final : public Material {
public:
    explicit TabulatedMaterial(TabulatedOptics data, double rel_tol = 1e-6);
    double eps_imag_axis(double xi) const override;
    StaticResponse static_response() const override { return static_; }
    const TabulatedOptics& data() const { return data_; }

private:
    TabulatedOptics data_;
    double rel_tol_;
    StaticResponse static_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace casispec
