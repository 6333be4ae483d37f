// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include "irscf/channel.hpp"
#include "irscf/config.hpp"
#include "irscf/fp_core.hpp"
#include "irscf/irs_opt.hpp"
#include "irscf/linalg.hpp"
#include "irscf/model.hpp"
#include "irscf/pipeline.hpp"
#include "irscf/random.hpp"
#include "irscf/tx_opt.hpp"
