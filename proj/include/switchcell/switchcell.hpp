#pragma once

#include "switchcell/error.hpp"
#include "switchcell/rational.hpp"
#include "switchcell/network.hpp"
#include "switchcell/switching_parameter.hpp"
#include "switchcell/cell_complex.hpp"
#include "switchcell/dynamics.hpp"
#include "switchcell/cfs.hpp"
#include "switchcell/equilibria.hpp"
#include "switchcell/stability.hpp"
#include "switchcell/sigmoid.hpp"
#include "switchcell/oracle.hpp"
#include "switchcell/report.hpp"
