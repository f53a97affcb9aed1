#include "energylab/score_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "energylab/errors.hpp"

namespace energylab {

namespace {

void check_alpha_bar(double alpha_bar_t, bool allow_one) {
    const bool ok = alpha_bar_t > 0.0 && (allow_one ? alpha_bar_t <= 1.0 : alpha_bar_t < 1.0);
    if (!ok) {
        throw InvalidRange("alpha_bar_t = " + std::to_string(alpha_bar_t) +
                           (allow_one ? " outside (0, 1]" : " outside (0, 1)"));
    }
}

void check_dim(const GaussianMixtureScoreModel& model, std::span<const double> x_t) {
    if (x_t.size() != model.dim()) {
        throw DimensionMismatch("latent has " + std::to_string(x_t.size()) +
                                " elements, model dimension is " + std::to_string(model.dim()));
    }
}

// Marginal variance of component k at x_t: ab * var_k + (1 - ab).
double marginal_variance(const MixtureComponent& c, double alpha_bar_t) {
    return alpha_bar_t * c.variance + (1.0 - alpha_bar_t);
}

}  // namespace

GaussianMixtureScoreModel::GaussianMixtureScoreModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw InvalidRange("mixture needs at least one component");
    dim_ = components_.front().mean.size();
    if (dim_ == 0) throw DimensionMismatch("mixture dimension must be positive");

    double total = 0.0;
    for (const auto& c : components_) {
        if (c.mean.size() != dim_) {
            throw DimensionMismatch("all component means must have length " +
                                    std::to_string(dim_));
        }
        if (!(c.weight > 0.0)) throw InvalidRange("component weights must be positive");
        if (!(c.variance > 0.0)) throw InvalidRange("component variances must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidRange("component weights sum to " + std::to_string(total) + ", expected 1");
    }
}

Vector responsibilities(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                        double alpha_bar_t) {
    check_alpha_bar(alpha_bar_t, true);
    check_dim(model, x_t);

    const auto& comps = model.components();
    const double signal = std::sqrt(alpha_bar_t);
    const double n = static_cast<double>(model.dim());

    Vector log_w(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const double var = marginal_variance(comps[k], alpha_bar_t);
        double sq = 0.0;
        for (std::size_t i = 0; i < x_t.size(); ++i) {
            const double d = x_t[i] - signal * comps[k].mean[i];
            sq += d * d;
        }
        log_w[k] = std::log(comps[k].weight) - 0.5 * n * std::log(var) - 0.5 * sq / var;
    }

    const double peak = *std::max_element(log_w.begin(), log_w.end());
    double total = 0.0;
    for (auto& v : log_w) {
        v = std::exp(v - peak);
        total += v;
    }
    for (auto& v : log_w) v /= total;
    return log_w;
}

Vector posterior_x0_mean(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                         double alpha_bar_t) {
    const Vector resp = responsibilities(model, x_t, alpha_bar_t);
    const auto& comps = model.components();
    const double signal = std::sqrt(alpha_bar_t);

    Vector out(x_t.size(), 0.0);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (resp[k] == 0.0) continue;
        // Gaussian conjugacy: mu_k + gain * (x_t - sqrt(ab) mu_k)
        const double gain = signal * comps[k].variance / marginal_variance(comps[k], alpha_bar_t);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double mu = comps[k].mean[i];
            out[i] += resp[k] * (mu + gain * (x_t[i] - signal * mu));
        }
    }
    return out;
}

Vector epsilon_hat(const GaussianMixtureScoreModel& model, std::span<const double> x_t,
                   double alpha_bar_t) {
    check_alpha_bar(alpha_bar_t, false);
    const Vector x0 = posterior_x0_mean(model, x_t, alpha_bar_t);
    const double signal = std::sqrt(alpha_bar_t);
    const double sigma = std::sqrt(1.0 - alpha_bar_t);

    Vector eps(x_t.size());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = (x_t[i] - signal * x0[i]) / sigma;
    return eps;
}

ConditionalPair make_conditional_pair(const ScenarioSpec& scenario) {
    if (scenario.components.empty()) {
        throw InvalidRange("scenario '" + scenario.name + "' has no components");
    }
    if (scenario.target.empty()) {
        throw InvalidRange("scenario '" + scenario.name + "' has no conditioning target");
    }
    for (const auto& c : scenario.components) {
        if (scenario.dim != 0 && c.mean.size() != scenario.dim) {
            throw DimensionMismatch("scenario '" + scenario.name + "': component mean length " +
                                    std::to_string(c.mean.size()) + " != dim " +
                                    std::to_string(scenario.dim));
        }
    }

    auto normalised = [](std::vector<MixtureComponent> comps) {
        double total = 0.0;
        for (const auto& c : comps) {
            if (!(c.weight > 0.0)) throw InvalidRange("component weights must be positive");
            total += c.weight;
        }
        for (auto& c : comps) c.weight /= total;
        // Absorb rounding into the last weight.
        double resum = 0.0;
        for (const auto& c : comps) resum += c.weight;
        comps.back().weight += 1.0 - resum;
        return comps;
    };

    std::vector<MixtureComponent> cond;
    for (std::size_t idx : scenario.target) {
        if (idx >= scenario.components.size()) {
            throw InvalidRange("scenario '" + scenario.name + "': unknown target component " +
                               std::to_string(idx));
        }
        cond.push_back(scenario.components[idx]);
    }

    return ConditionalPair{GaussianMixtureScoreModel(normalised(std::move(cond))),
                           GaussianMixtureScoreModel(normalised(scenario.components))};
}

}  // namespace energylab
