#pragma once

// Umbrella header.

#include "hdcb/agents.hpp"
#include "hdcb/cli.hpp"
#include "hdcb/config.hpp"
#include "hdcb/csv.hpp"
#include "hdcb/encoding.hpp"
#include "hdcb/environments.hpp"
#include "hdcb/harness.hpp"
#include "hdcb/hd_policies.hpp"
#include "hdcb/hypervector.hpp"
#include "hdcb/linear_policies.hpp"
#include "hdcb/policy.hpp"
#include "hdcb/svg.hpp"
#include "hdcb/version.hpp"
