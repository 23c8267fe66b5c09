#pragma once

#include "vmc/baselines.hpp"
#include "vmc/energy.hpp"
#include "vmc/errors.hpp"
#include "vmc/experiment.hpp"
#include "vmc/fileio.hpp"
#include "vmc/kernel.hpp"
#include "vmc/metrics.hpp"
#include "vmc/placement.hpp"
#include "vmc/policy.hpp"
#include "vmc/random.hpp"
#include "vmc/save_policy.hpp"
#include "vmc/trace_io.hpp"
#include "vmc/types.hpp"
#include "vmc/workload.hpp"
