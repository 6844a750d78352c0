#ifndef TWPARSE_GRADCHECK_H
#define TWPARSE_GRADCHECK_H

#include <functional>

#include "twparse/model.h"
#include "twparse/rng.h"

namespace twparse {

// Runs `loss` once, then the backward-accumulated analytic gradient; the
// closure must rebuild its graph on every call, call Graph::backward exactly
// when `want_grad` is set, and return the loss value.
//
// Returns the max over a random sample of at least `min_coords` trainable
// coordinates of |analytic - central difference| / max(1e-8, |analytic| + |numeric|).
double finite_diff_check(ModelParams& params,
                         const std::function<double(bool want_grad)>& loss,
                         double epsilon, int min_coords, Rng& rng);

}  // namespace twparse

#endif
