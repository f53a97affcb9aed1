#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "energylab/diffusion.hpp"

namespace energylab {

struct MixtureComponent {
    double weight = 1.0;
    Vector mean;
    double variance = 1.0;  // isotropic

    friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Isotropic Gaussian mixture over R^N with closed-form posterior under the
/// variance-preserving forward process. Stands in for a trained noise predictor.
class GaussianMixtureScoreModel {
public:
    // Weights must be positive and sum to 1 within 1e-12.
    explicit GaussianMixtureScoreModel(std::vector<MixtureComponent> components);

    std::size_t dim() const { return dim_; }
    const std::vector<MixtureComponent>& components() const { return components_; }

private:
    std::vector<MixtureComponent> components_;
    std::size_t dim_ = 0;
};

/// The two branches classifier-free guidance combines.
struct ConditionalPair {
    GaussianMixtureScoreModel cond;
    GaussianMixtureScoreModel uncond;
};

/// A data distribution plus the component(s) the "prompt" selects.
/// Weights are relative; they are normalised when the models are built.
struct ScenarioSpec {
    std::string name;
    std::size_t dim = 0;
    std::vector<MixtureComponent> components;
    std::vector<std::size_t> target;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// Posterior probability of each component given x_t. Sums to 1.
Vector responsibilities(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                        double alpha_bar_t);

// E[x0 | x_t]; requires 0 < alpha_bar_t <= 1.
Vector posterior_x0_mean(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                         double alpha_bar_t);

// E[eps | x_t] = (x_t - sqrt(ab) E[x0|x_t]) / sqrt(1 - ab); requires 0 < alpha_bar_t < 1.
Vector epsilon_hat(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                   double alpha_bar_t);

// cond keeps only the target components (renormalised); uncond is the full mixture.
ConditionalPair make_conditional_pair(const ScenarioSpec& scenario);

}  // namespace energylab
