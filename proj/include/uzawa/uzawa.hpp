#pragma once

#include "uzawa/bgp.hpp"
#include "uzawa/characteristics.hpp"
#include "uzawa/config.hpp"
#include "uzawa/dual.hpp"
#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/production.hpp"
#include "uzawa/scenario.hpp"
#include "uzawa/timescale.hpp"
