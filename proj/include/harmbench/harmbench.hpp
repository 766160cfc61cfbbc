#pragma once

#include "harmbench/anatomy.hpp"
#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"
#include "harmbench/harness.hpp"
#include "harmbench/nifti.hpp"
#include "harmbench/reference_metrics.hpp"
#include "harmbench/stats.hpp"
#include "harmbench/synth.hpp"
#include "harmbench/volume.hpp"
#include "harmbench/wasserstein.hpp"
