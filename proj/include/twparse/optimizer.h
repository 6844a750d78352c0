#ifndef TWPARSE_OPTIMIZER_H
#define TWPARSE_OPTIMIZER_H

#include "twparse/model.h"

namespace twparse {

struct SgdConfig {
  double lr = 0.1;
  double decay = 0.05;  // lr_epoch = lr / (1 + decay * epoch)
  double clip = 5.0;    // global gradient norm threshold, <= 0 disables
};

// Plain SGD with global gradient-norm clipping.
class SgdTrainer {
 public:
  SgdTrainer(ModelParams& model, SgdConfig config)
      : model_(model), config_(config), lr_(config.lr) {}

  // Applies one step from the accumulated gradients and zeroes them.
  // Throws NonFiniteGradient (leaving parameters untouched) on NaN/Inf.
  void update();

  void new_epoch() {
    ++epoch_;
    lr_ = config_.lr / (1.0 + config_.decay * epoch_);
  }

  double lr() const { return lr_; }

 private:
  ModelParams& model_;
  SgdConfig config_;
  double lr_;
  int epoch_ = 0;
};

}  // namespace twparse

#endif
