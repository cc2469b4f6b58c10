#include <algorithm>
#include <cmath>

#include "trajstitch/errors.hpp"
#include "trajstitch/masked_window.hpp"

namespace trajstitch {

int MaskedWindow::observed_count() const {
  return static_cast<int>(std::count(observed.begin(), observed.end(), true));
}

void MaskedWindow::validate() const {
  if (static_cast<int>(observed.size()) != horizon()) throw SchemaError("mask length differs from window horizon");
  if (observed_count() == 0) throw SchemaError("masked window has no observed position");
  for (int i = 0; i < horizon(); ++i) {
    if (observed[static_cast<std::size_t>(i)] && !values.row(i).allFinite()) {
      throw SchemaError("observed window position holds a non-finite value");
    }
  }
}

std::vector<bool> training_mask_from_intervals(int horizon, int first_begin, int first_length,
                                               int second_length) {
  const int second_begin = horizon - second_length;
  if (horizon < 4 || first_begin < 1 || first_length < 1 || second_length < 1 ||
      first_begin + first_length >= second_begin) {
    throw ConfigError("invalid training mask intervals");
  }
  std::vector<bool> observed(static_cast<std::size_t>(horizon), true);
  for (int i = first_begin; i < first_begin + first_length; ++i) observed[static_cast<std::size_t>(i)] = false;
  for (int i = second_begin; i < horizon; ++i) observed[static_cast<std::size_t>(i)] = false;
  return observed;
}

std::vector<bool> make_training_mask(int horizon, Rng& rng) {
  if (horizon < 4) throw ConfigError("training mask needs horizon >= 4");
  const int half = horizon / 2;
  // Tail interval, leaving room for position 0, one interval cell and a gap.
  const int second_length = uniform_int(rng, 1, std::min(half, horizon - 3));
  const int first_length = uniform_int(rng, 1, std::min(half, horizon - second_length - 2));
  const int first_begin = uniform_int(rng, 1, horizon - second_length - first_length - 1);
  return training_mask_from_intervals(horizon, first_begin, first_length, second_length);
}

}  // namespace trajstitch
