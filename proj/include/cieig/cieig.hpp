// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cieig/contour.hpp"
#include "cieig/experiment.hpp"
#include "cieig/gallery.hpp"
#include "cieig/matrix_function.hpp"
#include "cieig/moments.hpp"
#include "cieig/oracle.hpp"
#include "cieig/solver.hpp"
