#pragma once

#include "gqclock/clock_model.hpp"
#include "gqclock/error.hpp"
#include "gqclock/estimation.hpp"
#include "gqclock/format.hpp"
#include "gqclock/io.hpp"
#include "gqclock/metrology.hpp"
#include "gqclock/protocol.hpp"
#include "gqclock/qops.hpp"
#include "gqclock/sweep.hpp"
#include "gqclock/units.hpp"
