#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hcd/model.hpp"
#include "hcd/tensor.hpp"

namespace hcd {

enum class NormKind { l2, linf };
enum class Direction { descend, ascend };
enum class RadiusMode { absolute, per_element_scaled };
enum class InitKind { zero, uniform_small };

// Perturbation run parameters. Defaults follow the rescaling setup this
// project targets: epsilon 0.3 (scaled-radius convention, see
// effective_radius), step size 20/255, 15 iterations, l2 ball, descent.
struct PerturbConfig {
  double epsilon = 0.3;
  double alpha = 20.0 / 255.0;
  int iters = 15;
  NormKind norm = NormKind::l2;
  Direction direction = Direction::descend;
  RadiusMode radius_mode = RadiusMode::per_element_scaled;
  bool pixel_clamp = true;  // clamp x + delta to [0,1] for the final output
  InitKind init = InitKind::zero;
  uint64_t seed = 0;
  LossKind loss = LossKind::mse;
};

void validate(const PerturbConfig& cfg);

// l2 ball radius: epsilon itself in absolute mode, epsilon * sqrt(#elements)
// in per-element-scaled mode (so epsilon reads as an RMS per-element bound).
double effective_radius(const PerturbConfig& cfg, Eigen::Index numel);

// Ball projection. l2: radial shrink onto the sphere when outside (interior
// points are returned unchanged, bit-exact). linf: per-element clamp to
// [-epsilon, +epsilon].
Tensor project(const Tensor& delta, const PerturbConfig& cfg);

struct StepResult {
  Tensor delta;
  bool stationary = false;  // gradient norm below 1e-20; delta unchanged
};

// One normalized-gradient step followed by projection:
// delta' = project(delta -/+ alpha * grad / ||grad||_2).
StepResult step(const Tensor& delta, const Tensor& grad,
                const PerturbConfig& cfg);

// Trace of a single perturbation solve. loss_trace[0] is the loss at the
// initial perturbation; both traces have iters + 1 entries.
struct OptRun {
  std::vector<double> loss_trace;
  std::vector<double> delta_norm_trace;
  Tensor final_delta;
  Tensor final_input;
  int stationary_steps = 0;
};

nlohmann::json to_json(const OptRun& run);

// Collaborative (or adversarial, per cfg.direction) perturbation of the
// LR input x against the fixed chain; the reference stays y_ref.
OptRun optimize_lr(const ModelChain& chain, const Tensor& x,
                   const Tensor& y_ref, const PerturbConfig& cfg);

// Same loop in the HR domain: perturbs y before the downscaler, with the
// original y as the reconstruction target throughout.
OptRun optimize_hr(const ModelChain& chain, const Tensor& y,
                   const PerturbConfig& cfg);

}  // namespace hcd
