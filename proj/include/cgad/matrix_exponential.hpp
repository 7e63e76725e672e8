#pragma once

#include "cgad/types.hpp"

namespace cgad {

/// Dense matrix exponential by scaling-and-squaring with a 30-term Taylor
/// series on the scaled matrix (1-norm brought below 1). Absolute accuracy
/// is far below 1e-12 for inputs with ||M||_1 <= 10.
Matrix matrix_exponential(const Matrix& m);

} // namespace cgad
