#pragma once

#include "xorlab/rng.hpp"
#include "xorlab/gf2.hpp"
#include "xorlab/chip_count.hpp"
#include "xorlab/thresholds.hpp"
#include "xorlab/instance.hpp"
#include "xorlab/instancegen.hpp"
#include "xorlab/peeler.hpp"
#include "xorlab/interval.hpp"
#include "xorlab/parallel.hpp"
#include "xorlab/certifier.hpp"
#include "xorlab/labharness.hpp"
#include "xorlab/plot.hpp"
