/*
 * Copyright 2026 The uxai Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>
#include <vector>

#include "uxai/model.hpp"

namespace uxai::model {

// A model of the same architecture with every blob set to zero. Used as the
// gradient container for training.
Model zeros_like(const Model& model);

// Training-mode forward (batch-statistics BN) and backward pass. Writes the
// gradient of the mean cross-entropy into the trainable blobs of `grads`,
// folds the batch statistics into the running BN stats of `model` with the
// given momentum, and returns the loss.
double forward_backward(Model& model, Model& grads, const tensor::Tensor& batch,
                        std::span<const int> labels, double bn_momentum = 0.1);

// SGD with heavy-ball momentum and L2 weight decay on trainable blobs.
class Sgd {
 public:
  Sgd(const Model& model, double momentum, double weight_decay);

  void step(Model& model, const Model& grads, double lr);

 private:
  double momentum_;
  double weight_decay_;
  std::vector<std::vector<float>> velocity_;
};

// Half-cosine decay from base_lr at step 0 to 0 at total_steps.
double cosine_lr(double base_lr, long step, long total_steps);

}  // namespace uxai::model
