#pragma once

#include <string>

#include "covham/expr.hpp"

namespace covham {

// Stable, diff-friendly plain-text rendering of (canonical) expressions.
std::string render(const Expr& e);
std::string render(const Atom& a);
std::string render(const Index& i);

}  // namespace covham
