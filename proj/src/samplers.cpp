#include "energylab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "energylab/errors.hpp"
#include "energylab/log.hpp"

namespace energylab {

std::string to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::ddim: return "ddim";
        case SamplerKind::euler_ancestral: return "euler_ancestral";
        case SamplerKind::dpmpp_2m: return "dpmpp_2m";
    }
    return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
    for (auto kind : kAllSamplers) {
        if (to_string(kind) == name) return kind;
    }
    throw InvalidRange("unknown sampler '" + std::string(name) +
                       "' (expected ddim, euler_ancestral or dpmpp_2m)");
}

EnergyTrajectory RunRecord::energies() const {
    EnergyTrajectory out;
    out.energies.reserve(trajectory.size());
    for (const auto& row : trajectory) out.energies.push_back(row.energy);
    return out;
}

namespace {

void check_step_args(std::span<const double> x_t, std::span<const double> eps_hat,
                     double alpha_bar_t, double alpha_bar_next) {
    if (x_t.size() != eps_hat.size()) throw DimensionMismatch("latent and eps_hat differ in length");
    if (!(alpha_bar_t > 0.0 && alpha_bar_t < 1.0)) {
        throw InvalidRange("alpha_bar_t outside (0, 1)");
    }
    if (!(alpha_bar_next > 0.0 && alpha_bar_next <= 1.0)) {
        throw InvalidRange("alpha_bar_next outside (0, 1]");
    }
}

}  // namespace

Vector ddim_step(std::span<const double> x_t, std::span<const double> eps_hat, double alpha_bar_t,
                 double alpha_bar_next) {
    check_step_args(x_t, eps_hat, alpha_bar_t, alpha_bar_next);
    if (alpha_bar_next == alpha_bar_t) return Vector(x_t.begin(), x_t.end());

    const double a_t = std::sqrt(alpha_bar_t);
    const double s_t = std::sqrt(1.0 - alpha_bar_t);
    const double a_n = std::sqrt(alpha_bar_next);
    const double s_n = std::sqrt(1.0 - alpha_bar_next);

    Vector out(x_t.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x0 = (x_t[i] - s_t * eps_hat[i]) / a_t;
        out[i] = a_n * x0 + s_n * eps_hat[i];
    }
    return out;
}

Vector euler_ancestral_step(std::span<const double> x_t, std::span<const double> eps_hat,
                            double alpha_bar_t, double alpha_bar_next,
                            std::span<const double> z) {
    check_step_args(x_t, eps_hat, alpha_bar_t, alpha_bar_next);
    if (z.size() != x_t.size()) throw DimensionMismatch("ancestral noise differs in length");

    double var_up = ((1.0 - alpha_bar_next) / (1.0 - alpha_bar_t)) *
                    (1.0 - alpha_bar_t / alpha_bar_next);
    if (var_up < 0.0) {
        if (var_up < -1e-12) {
            std::ostringstream msg;
            msg << "euler_ancestral: negative sigma_up^2 " << var_up << " clamped to 0";
            log_warning(msg.str());
        }
        var_up = 0.0;
    }
    double radicand = 1.0 - alpha_bar_next - var_up;
    if (radicand < 0.0) {
        if (radicand < -1e-12) {
            std::ostringstream msg;
            msg << "euler_ancestral: negative direction radicand " << radicand << " clamped to 0";
            log_warning(msg.str());
        }
        radicand = 0.0;
    }

    const double a_t = std::sqrt(alpha_bar_t);
    const double s_t = std::sqrt(1.0 - alpha_bar_t);
    const double a_n = std::sqrt(alpha_bar_next);
    const double dir = std::sqrt(radicand);
    const double sigma_up = std::sqrt(var_up);

    Vector out(x_t.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x0 = (x_t[i] - s_t * eps_hat[i]) / a_t;
        out[i] = a_n * x0 + dir * eps_hat[i] + sigma_up * z[i];
    }
    return out;
}

double half_log_snr(double alpha_bar) {
    if (!(alpha_bar > 0.0 && alpha_bar < 1.0)) throw InvalidRange("half_log_snr: alpha_bar outside (0, 1)");
    return 0.5 * (std::log(alpha_bar) - std::log1p(-alpha_bar));
}

Vector dpmpp_2m_step(std::span<const double> x_prev, std::span<const double> x0_pred_curr,
                     std::optional<std::span<const double>> x0_pred_prev,
                     const LambdaTriplet& lambdas, double alpha_curr, double sigma_prev,
                     double sigma_curr) {
    if (x_prev.size() != x0_pred_curr.size() ||
        (x0_pred_prev && x0_pred_prev->size() != x_prev.size())) {
        throw DimensionMismatch("dpmpp_2m_step: vector lengths differ");
    }
    if (!std::isfinite(lambdas.prev) || !std::isfinite(lambdas.curr) ||
        (lambdas.prev2 && !std::isfinite(*lambdas.prev2))) {
        throw InvalidRange("dpmpp_2m_step: lambda values must be finite");
    }
    if (!(sigma_prev > 0.0)) throw InvalidRange("dpmpp_2m_step: sigma_prev must be positive");

    const double h = lambdas.curr - lambdas.prev;
    if (h == 0.0) throw NumericalError("dpmpp_2m_step: degenerate step (h == 0)");

    const double ratio = sigma_curr / sigma_prev;
    const double coeff = alpha_curr * std::expm1(-h);

    Vector out(x_prev.size());
    if (!x0_pred_prev) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = ratio * x_prev[i] - coeff * x0_pred_curr[i];
        }
        return out;
    }
    if (!lambdas.prev2) throw InvalidRange("dpmpp_2m_step: multistep update needs lambda_prev2");

    const double r = (lambdas.prev - *lambdas.prev2) / h;
    const double w_prev = 1.0 / (2.0 * r);
    const double w_curr = 1.0 + w_prev;
    const auto& older = *x0_pred_prev;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = w_curr * x0_pred_curr[i] - w_prev * older[i];
        out[i] = ratio * x_prev[i] - coeff * d;
    }
    return out;
}

namespace {

Vector draw_normal(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

void require_finite(double e, int step) {
    if (!std::isfinite(e)) {
        throw NumericalError("non-finite energy " + std::to_string(e) + " at step " +
                             std::to_string(step));
    }
}

}  // namespace

RunRecord run_sampler(const ConditionalPair& pair, const NoiseSchedule& schedule,
                      const TimestepGrid& grid, const GuidanceSchedule& guidance,
                      SamplerKind sampler, const EnergyControl& energy_ctrl, std::uint64_t seed) {
    if (pair.cond.dim() != pair.uncond.dim()) {
        throw DimensionMismatch("conditional and unconditional models differ in dimension");
    }
    if (grid.steps < 1 || grid.indices.size() != static_cast<std::size_t>(grid.steps)) {
        throw InvalidRange("timestep grid is empty or inconsistent");
    }
    validate(guidance);
    energy_ctrl.validate();

    const int steps = grid.steps;
    const std::size_t n = pair.cond.dim();
    std::mt19937_64 rng(seed);

    RunRecord record;
    record.sampler = sampler;
    record.guidance = guidance;
    record.seed = seed;
    record.trajectory.reserve(static_cast<std::size_t>(steps) + 1);

    Vector x = draw_normal(rng, n);
    const double e0 = energy(x);
    require_finite(e0, 0);
    record.trajectory.push_back(
        {0, grid.indices.front(), evaluate_schedule(guidance, 0.0, steps), e0, false, false});

    int refresh_step = -1;
    if (energy_ctrl.refresh_enabled && steps >= 2) {
        const auto target = std::lround(energy_ctrl.refresh_fraction * steps);
        refresh_step = static_cast<int>(std::clamp<long>(target, 1, steps - 1));
    }

    // DPM++ 2M history.
    std::optional<Vector> x0_prev;
    std::optional<double> lambda_prev2;

    for (int k = 0; k < steps; ++k) {
        const int t = grid.indices[static_cast<std::size_t>(k)];
        const int t_next = (k + 1 < steps) ? grid.indices[static_cast<std::size_t>(k + 1)] : -1;
        const double ab_t = schedule.alpha_bar_at(t);
        const double ab_next = schedule.alpha_bar_at(t_next);

        const double s = evaluate_schedule(guidance, static_cast<double>(k), steps);
        const Vector eps = combine_cfg(epsilon_hat(pair.cond, x, ab_t),
                                       epsilon_hat(pair.uncond, x, ab_t), s);

        switch (sampler) {
            case SamplerKind::ddim:
                x = ddim_step(x, eps, ab_t, ab_next);
                break;
            case SamplerKind::euler_ancestral: {
                const Vector z = draw_normal(rng, n);
                x = euler_ancestral_step(x, eps, ab_t, ab_next, z);
                break;
            }
            case SamplerKind::dpmpp_2m: {
                const double a_t = std::sqrt(ab_t);
                const double s_t = std::sqrt(1.0 - ab_t);
                Vector x0(n);
                for (std::size_t i = 0; i < n; ++i) x0[i] = (x[i] - s_t * eps[i]) / a_t;
                const double lambda_t = half_log_snr(ab_t);
                if (t_next == -1) {
                    // sigma reaches zero at the clean boundary; the update collapses to x0.
                    x = x0;
                } else {
                    const LambdaTriplet lambdas{x0_prev ? lambda_prev2 : std::nullopt, lambda_t,
                                                half_log_snr(ab_next)};
                    std::optional<std::span<const double>> older;
                    if (x0_prev) older = std::span<const double>(*x0_prev);
                    x = dpmpp_2m_step(x, x0, older, lambdas, std::sqrt(ab_next), s_t,
                                      std::sqrt(1.0 - ab_next));
                }
                x0_prev = std::move(x0);
                lambda_prev2 = lambda_t;
                break;
            }
        }

        StepRecord row{k + 1, t_next, s, 0.0, false, false};
        if (k + 1 == refresh_step) {
            const Vector z = draw_normal(rng, n);
            x = noise_refresh(x, ab_next, z, energy_ctrl.refresh_blend);
            row.refreshed = true;
        }
        if (energy_ctrl.clipping_enabled) {
            const double e_max =
                energy_ctrl.adaptive_threshold
                    ? adaptive_threshold(energy_ctrl.e_base, energy_ctrl.gamma,
                                         static_cast<double>(steps - (k + 1)), steps)
                    : energy_ctrl.e_base;
            auto clip = clip_energy(x, e_max, energy_ctrl.clip_mode);
            x = std::move(clip.x);
            row.clipped = clip.clipped;
        }
        row.energy = energy(x);
        require_finite(row.energy, k + 1);
        record.trajectory.push_back(row);
    }

    record.final_sample = std::move(x);
    return record;
}

}  // namespace energylab
