#pragma once

// Umbrella header for the whole library.

#include "cmlc/bayes.hpp"
#include "cmlc/common.hpp"
#include "cmlc/dataset.hpp"
#include "cmlc/integral.hpp"
#include "cmlc/io.hpp"
#include "cmlc/loss.hpp"
#include "cmlc/measure.hpp"
#include "cmlc/sweep.hpp"
