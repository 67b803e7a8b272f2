#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "overlapq/ifs.hpp"

namespace overlapq {

/// Named example systems:
///   erdos           rho = (sqrt(5)-1)/2, b = (0, 1-rho), p = (1/2, 1/2)
///   cantor          rho = 1/3, b = (0, 2/3), p = (1/2, 1/2)
///   lebesgue        rho = 1/2, b = (0, 1/2), p = (1/2, 1/2)
///   threefold       x/3 + 2i/3 (i = 0..3) rescaled to x/3 + 2i/9, p = (1,3,3,1)/8
///   lambda-cantor:m rho = 1/3, b = (0, (1-3^-m)/3, 2/3), uniform p
///   counterexample  rho = 1/3, b = (0, 1/9, 2/3), uniform p
///   roychowdhury    x/3, x/3 + 1, x/3 + 3 rescaled to the unit hull, uniform p
IfsSpec preset(std::string_view name);

std::vector<std::string> preset_names();

}  // namespace overlapq
