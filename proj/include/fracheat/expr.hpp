#pragma once

#include <string>

#include "fracheat/fields.hpp"

namespace fracheat {

// Arithmetic over t, x1..xN (x for x1), r = |x|, pi, with + - * / ^, parentheses,
// and sin cos tan exp log sqrt abs step(s) (1 for s >= 0) and bump(s) (exp(-1/(1-s^2)) on |s| < 1).
Expr parse_expression(const std::string &src, int space_dim);

} // namespace fracheat
