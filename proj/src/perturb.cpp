#include "hcd/perturb.hpp"

#include <cmath>

namespace hcd {

namespace {

constexpr double kStationaryEps = 1e-20;
constexpr double kUniformInitAmplitude = 1e-3;

Tensor initial_delta(const PerturbConfig& cfg, const Shape4& shape) {
  if (cfg.init == InitKind::zero) return Tensor(shape);
  Rng rng(cfg.seed);
  Tensor d = random_uniform(rng, shape, -kUniformInitAmplitude,
                            kUniformInitAmplitude);
  return project(d, cfg);
}

// Shared PGD loop. grad_fn returns loss and gradient at the perturbed
// input; loss_fn evaluates the loss alone for the trailing trace entry.
template <typename GradFn, typename LossFn>
OptRun run_loop(const Tensor& base, const PerturbConfig& cfg, GradFn&& grad_fn,
                LossFn&& loss_fn) {
  validate(cfg);
  Tensor delta = initial_delta(cfg, base.shape());
  OptRun run;
  run.loss_trace.reserve(cfg.iters + 1);
  run.delta_norm_trace.reserve(cfg.iters + 1);
  run.delta_norm_trace.push_back(l2_norm(delta));
  for (int t = 0; t < cfg.iters; ++t) {
    LossGrad lg = grad_fn(add(base, delta));
    run.loss_trace.push_back(lg.value);
    StepResult sr = step(delta, lg.grad, cfg);
    if (sr.stationary) ++run.stationary_steps;
    delta = std::move(sr.delta);
    run.delta_norm_trace.push_back(l2_norm(delta));
  }
  Tensor perturbed = add(base, delta);
  run.loss_trace.push_back(loss_fn(perturbed));
  run.final_delta = std::move(delta);
  run.final_input =
      cfg.pixel_clamp ? clamp(perturbed, 0.0, 1.0) : std::move(perturbed);
  return run;
}

}  // namespace

void validate(const PerturbConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw_usage("perturb: epsilon must be finite and positive");
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha))
    throw_usage("perturb: alpha must be finite and positive");
  if (cfg.iters < 0) throw_usage("perturb: iters must be >= 0");
}

double effective_radius(const PerturbConfig& cfg, Eigen::Index numel) {
  if (cfg.radius_mode == RadiusMode::absolute) return cfg.epsilon;
  return cfg.epsilon * std::sqrt(static_cast<double>(numel));
}

Tensor project(const Tensor& delta, const PerturbConfig& cfg) {
  if (cfg.norm == NormKind::linf)
    return clamp(delta, -cfg.epsilon, cfg.epsilon);
  const double radius = effective_radius(cfg, delta.size());
  const double n = l2_norm(delta);
  if (n <= radius) return delta;
  return scale(delta, radius / n);
}

StepResult step(const Tensor& delta, const Tensor& grad,
                const PerturbConfig& cfg) {
  if (!(delta.shape() == grad.shape()))
    throw_data("step: delta/grad shape mismatch");
  const double gnorm = l2_norm(grad);
  if (gnorm < kStationaryEps) return StepResult{delta, true};
  const double sign = cfg.direction == Direction::descend ? -1.0 : 1.0;
  Tensor moved(delta.shape(),
               delta.array() + (sign * cfg.alpha / gnorm) * grad.array());
  return StepResult{project(moved, cfg), false};
}

nlohmann::json to_json(const OptRun& run) {
  return nlohmann::json{
      {"loss_trace", run.loss_trace},
      {"delta_norm_trace", run.delta_norm_trace},
      {"stationary_steps", run.stationary_steps},
      {"final_delta_l2", run.final_delta.size() ? l2_norm(run.final_delta)
                                                : 0.0},
  };
}

OptRun optimize_lr(const ModelChain& chain, const Tensor& x,
                   const Tensor& y_ref, const PerturbConfig& cfg) {
  return run_loop(
      x, cfg,
      [&](const Tensor& xd) { return grad_input(chain, xd, y_ref, cfg.loss); },
      [&](const Tensor& xd) {
        return loss_value(cfg.loss, upscale_forward(chain, xd).output, y_ref);
      });
}

OptRun optimize_hr(const ModelChain& chain, const Tensor& y,
                   const PerturbConfig& cfg) {
  if (y.shape().h % chain.scale != 0 || y.shape().w % chain.scale != 0)
    throw_data("optimize_hr: image dims must be divisible by the scale");
  return run_loop(
      y, cfg,
      [&](const Tensor& yd) {
        return grad_input_full(chain, yd, y, cfg.loss);
      },
      [&](const Tensor& yd) {
        return loss_value(
            cfg.loss, upscale_forward(chain, downscale(chain, yd)).output, y);
      });
}

}  // namespace hcd
