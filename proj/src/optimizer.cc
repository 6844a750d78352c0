#include "twparse/optimizer.h"

#include <cmath>

namespace twparse {

void SgdTrainer::update() {
  double sq = 0.0;
  for (Parameter* p : model_.params()) {
    if (!p->trainable) continue;
    if (p->lookup) {
      for (int r : p->touched) {
        const double* row = &p->grad.v[static_cast<size_t>(r) * p->grad.cols];
        for (int j = 0; j < p->grad.cols; ++j) {
          if (!std::isfinite(row[j]))
            throw NonFiniteGradient(p->name, "non-finite gradient in tensor " + p->name);
          sq += row[j] * row[j];
        }
      }
    } else {
      for (double g : p->grad.v) {
        if (!std::isfinite(g))
          throw NonFiniteGradient(p->name, "non-finite gradient in tensor " + p->name);
        sq += g * g;
      }
    }
  }

  double scale = lr_;
  if (config_.clip > 0.0) {
    double norm = std::sqrt(sq);
    if (norm > config_.clip) scale = lr_ * (config_.clip / norm);
  }

  for (Parameter* p : model_.params()) {
    if (!p->trainable) continue;
    if (p->lookup) {
      for (int r : p->touched) {
        double* val = &p->value.v[static_cast<size_t>(r) * p->value.cols];
        const double* row = &p->grad.v[static_cast<size_t>(r) * p->grad.cols];
        for (int j = 0; j < p->value.cols; ++j) val[j] -= scale * row[j];
      }
    } else {
      for (size_t i = 0; i < p->value.size(); ++i) p->value.v[i] -= scale * p->grad.v[i];
    }
    p->zero_grad();
  }
}

}  // namespace twparse
