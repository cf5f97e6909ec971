#pragma once

#include "grm3d/synth.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

struct LossWeights {
  double alpha = 0.1;  // scale term
  double beta = 0.1;   // depth term
};

struct LossBreakdown {
  double heat = 0.0;
  double scale = 0.0;
  double depth = 0.0;
  double offset = 0.0;
  double total = 0.0;
};

/// Ground truth in the form the loss compares against: depth holds raw depths.
/// Maps rendered with delta_inverse encoding are decoded through apply_delta.
DataMapSet make_loss_targets(const DataMapSet& gt, DepthEncoding encoding);

/// Mean squared error over every element.
double mse(const TensorMap& pred, const TensorMap& target);

/// Mean absolute error over the pixels where mask (1,H,W) is nonzero, averaged
/// over channels too. 0 when the mask is empty.
double masked_l1(const TensorMap& pred, const TensorMap& target, const TensorMap& mask);

/// Heat is MSE; scale, depth and offsets are masked L1. Every term is summed
/// over the initial and refined predictions. Prediction depth passes through
/// the delta transform before comparison.
LossBreakdown total_loss(const DataMapSet& initial, const DataMapSet& refined, const DataMapSet& targets,
                         const TensorMap& mask, const LossWeights& weights = {});

}  // namespace grm3d
