#pragma once

#include "cohom/errors.hpp"
#include "cohom/group.hpp"
#include "cohom/measure.hpp"
#include "cohom/repspace.hpp"
#include "cohom/cocycle.hpp"
#include "cohom/decomp.hpp"
#include "cohom/exact.hpp"
#include "cohom/scenario.hpp"
#include "cohom/properties.hpp"
#include "cohom/pipeline.hpp"
