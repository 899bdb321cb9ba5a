#pragma once

#include "migplan/error.hpp"
#include "migplan/model.hpp"
#include "migplan/economics.hpp"
#include "migplan/expectimax.hpp"
#include "migplan/oracle.hpp"
#include "migplan/scenario_io.hpp"
