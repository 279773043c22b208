#pragma once

#include "cluscov/generator.hpp"
#include "cluscov/json_io.hpp"
#include "cluscov/lp.hpp"
#include "cluscov/mcpc.hpp"
#include "cluscov/mkpc.hpp"
#include "cluscov/model.hpp"
#include "cluscov/oracle.hpp"
#include "cluscov/pipage.hpp"
#include "cluscov/rational.hpp"
