#pragma once

#include "crosscurv/sampling.hpp"

namespace crosscurv::testing {
using namespace crosscurv::sampling;
}  // namespace crosscurv::testing
