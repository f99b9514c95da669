#pragma once

#include "moran/bigint.hpp"
#include "moran/dimension.hpp"
#include "moran/estimate.hpp"
#include "moran/expansion.hpp"
#include "moran/integer_moran.hpp"
#include "moran/io.hpp"
#include "moran/measure.hpp"
#include "moran/mixed_radix.hpp"
#include "moran/parallel.hpp"
#include "moran/sequence.hpp"
#include "moran/shifts.hpp"
#include "moran/spectrum.hpp"
#include "moran/system.hpp"
#include "moran/thinning.hpp"
#include "moran/tree_mapping.hpp"
#include "moran/verify.hpp"
