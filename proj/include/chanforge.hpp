// SPDX-License-Identifier: Apache-2.0
//
// chanforge: generative modelling of non-stationary dynamic radio channels
// Copyright (C) 2026 The chanforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Umbrella header.

#ifndef CHANFORGE_HPP
#define CHANFORGE_HPP

#include "chanforge/core.hpp"
#include "chanforge/dataset.hpp"
#include "chanforge/dataset_io.hpp"
#include "chanforge/simkit.hpp"
#include "chanforge/preprocess.hpp"
#include "chanforge/stats.hpp"
#include "chanforge/nn.hpp"
#include "chanforge/model.hpp"
#include "chanforge/losses.hpp"
#include "chanforge/train_config.hpp"
#include "chanforge/checkpoint.hpp"
#include "chanforge/train.hpp"
#include "chanforge/raster.hpp"
#include "chanforge/evalreport.hpp"

#endif // CHANFORGE_HPP
