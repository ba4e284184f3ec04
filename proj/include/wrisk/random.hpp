#pragma once

#include <random>

namespace wrisk {

using Rng = std::mt19937_64;

} // namespace wrisk
