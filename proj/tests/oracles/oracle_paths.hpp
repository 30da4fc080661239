#pragma once

#include "trajsim/baseline.hpp"

namespace oracle {

/// Minimum cumulative distance over every monotone warping path, found by
/// explicit path enumeration (no table, exponential).
double dtw_enumerate(const trajsim::PointSeq& a, const trajsim::PointSeq& b);

/// Minimum over all monotone couplings of the maximum paired distance.
double frechet_enumerate(const trajsim::PointSeq& a, const trajsim::PointSeq& b);

}  // namespace oracle
