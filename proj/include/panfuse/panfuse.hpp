#pragma once

#include "core.hpp"
#include "fusion.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "resample.hpp"
#include "wavelet.hpp"
