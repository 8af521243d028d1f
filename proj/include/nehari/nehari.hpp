// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nehari/numeric.hpp"
#include "nehari/roots.hpp"
#include "nehari/phi.hpp"
#include "nehari/hypotheses.hpp"
#include "nehari/grid.hpp"
#include "nehari/weights.hpp"
#include "nehari/sobolev.hpp"
#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/thresholds.hpp"
#include "nehari/gradcheck.hpp"
#include "nehari/solver.hpp"
#include "nehari/config.hpp"
#include "nehari/report.hpp"
#include "nehari/cli.hpp"
