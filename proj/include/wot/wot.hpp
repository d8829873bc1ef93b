#pragma once

#include "wot/common.hpp"
#include "wot/constants.hpp"
#include "wot/cost.hpp"
#include "wot/hopflax.hpp"
#include "wot/inequalities.hpp"
#include "wot/io.hpp"
#include "wot/measure.hpp"
#include "wot/transport.hpp"
