#include "grm3d/loss.hpp"

#include <cmath>
#include <string>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

void check_same(const TensorMap& a, const TensorMap& b, const char* what) {
  if (a.channels() != b.channels() || !a.same_plane_shape(b))
    throw ShapeError(std::string("loss: shape mismatch in ") + what);
}

}  // namespace

DataMapSet make_loss_targets(const DataMapSet& gt, DepthEncoding encoding) {
  gt.validate();
  DataMapSet out = gt;
  out.feature.reset();
  if (encoding == DepthEncoding::delta_inverse) out.depth = apply_delta(gt.depth);
  return out;
}

double mse(const TensorMap& pred, const TensorMap& target) {
  check_same(pred, target, "heat");
  const auto p = pred.values();
  const auto t = target.values();
  if (p.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(p.size());
}

double masked_l1(const TensorMap& pred, const TensorMap& target, const TensorMap& mask) {
  check_same(pred, target, "masked term");
  if (mask.channels() != 1 || !mask.same_plane_shape(pred)) throw ShapeError("loss: mask must be (1,H,W)");
  const auto m = mask.plane(0);
  std::size_t active = 0;
  for (float v : m) active += v != 0.0f ? 1 : 0;
  if (active == 0 || pred.channels() == 0) return 0.0;
  double sum = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    const auto p = pred.plane(c);
    const auto t = target.plane(c);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] != 0.0f) sum += std::abs(static_cast<double>(p[i]) - static_cast<double>(t[i]));
  }
  return sum / (static_cast<double>(active) * pred.channels());
}

LossBreakdown total_loss(const DataMapSet& initial, const DataMapSet& refined, const DataMapSet& targets,
                         const TensorMap& mask, const LossWeights& w) {
  if (!(w.alpha > 0.0) || !(w.beta > 0.0)) throw PreconditionError("loss: alpha and beta must be positive");
  initial.validate();
  refined.validate();
  targets.validate();
  LossBreakdown b;
  for (const DataMapSet* pred : {&initial, &refined}) {
    b.heat += mse(pred->heat, targets.heat);
    b.scale += masked_l1(pred->scale, targets.scale, mask);
    b.depth += masked_l1(apply_delta(pred->depth), targets.depth, mask);
    b.offset += masked_l1(pred->offset3d, targets.offset3d, mask);
  }
  b.total = b.heat + w.alpha * b.scale + w.beta * b.depth + b.offset;
  return b;
}

}  // namespace grm3d
