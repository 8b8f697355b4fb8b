// SPDX-License-Identifier: Apache-2.0
// Umbrella header.
#pragma once

#include "singloc/core.hpp"
#include "singloc/metric.hpp"
#include "singloc/geodesic.hpp"
#include "singloc/closed_set.hpp"
#include "singloc/grid_field.hpp"
#include "singloc/field.hpp"
#include "singloc/fgeod.hpp"
#include "singloc/singular.hpp"
#include "singloc/clarke.hpp"
#include "singloc/scenario.hpp"
#include "singloc/io.hpp"
#include "singloc/verify.hpp"
