#pragma once

// Umbrella header. Individual modules can be included on their own; the
// CLI front end (cli.hpp) is left out because it pulls in CLI11.

#include "abbsim/abb.hpp"
#include "abbsim/activity.hpp"
#include "abbsim/anchors.hpp"
#include "abbsim/calibrate.hpp"
#include "abbsim/config.hpp"
#include "abbsim/device.hpp"
#include "abbsim/modes.hpp"
#include "abbsim/report.hpp"
#include "abbsim/rng.hpp"
#include "abbsim/shmoo.hpp"
#include "abbsim/sram.hpp"
#include "abbsim/trace.hpp"
#include "abbsim/types.hpp"
