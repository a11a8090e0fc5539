#pragma once

#include <string>
#include <string_view>

#include "switchkit/distributions.hpp"

namespace switchkit {

/**
 * Parse a distribution spec:
 *
 *   exp(rate=1)
 *   gamma(shape=2,scale=2)
 *   compound(r=2,divisor=exp(rate=2))
 *   table(path.csv)          // CSV density with a `t,value` header
 *
 * Whitespace between tokens is ignored. Throws std::invalid_argument with
 * the offending position on malformed input.
 */
SwitchingDistribution parse_distribution(std::string_view spec, int talbot_nodes = 32);

}  // namespace switchkit
