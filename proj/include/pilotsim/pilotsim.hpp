// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pilotsim/channel.hpp"
#include "pilotsim/config.hpp"
#include "pilotsim/errors.hpp"
#include "pilotsim/estimation.hpp"
#include "pilotsim/harness.hpp"
#include "pilotsim/metrics.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/precoding.hpp"
#include "pilotsim/random.hpp"
#include "pilotsim/results.hpp"
#include "pilotsim/scenario.hpp"
