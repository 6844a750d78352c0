#include "twparse/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace twparse {

double finite_diff_check(ModelParams& params,
                         const std::function<double(bool)>& loss,
                         double epsilon, int min_coords, Rng& rng) {
  if (epsilon < 1e-6 || epsilon > 1e-3)
    throw std::logic_error("finite_diff_check: epsilon outside [1e-6, 1e-3]");

  params.zero_grads();
  loss(true);

  struct Coord {
    Parameter* p;
    size_t i;
  };
  std::vector<Coord> all;
  for (Parameter* p : params.params()) {
    if (!p->trainable) continue;
    for (size_t i = 0; i < p->value.size(); ++i) all.push_back({p, i});
  }
  if (all.empty()) return 0.0;

  std::vector<Coord> sample;
  if (static_cast<int>(all.size()) <= min_coords) {
    sample = all;
  } else {
    rng.shuffle(all);
    sample.assign(all.begin(), all.begin() + min_coords);
  }

  double max_err = 0.0;
  for (const Coord& c : sample) {
    double analytic = c.p->grad.v[c.i];
    double saved = c.p->value.v[c.i];
    c.p->value.v[c.i] = saved + epsilon;
    double up = loss(false);
    c.p->value.v[c.i] = saved - epsilon;
    double down = loss(false);
    c.p->value.v[c.i] = saved;
    double numeric = (up - down) / (2.0 * epsilon);
    double err = std::abs(analytic - numeric) /
                 std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    max_err = std::max(max_err, err);
  }
  params.zero_grads();
  return max_err;
}

}  // namespace twparse
