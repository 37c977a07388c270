// SPDX-License-Identifier: Apache-2.0
//
// rmtstap: random-matrix-theory corrected space-time adaptive processing
// Copyright (C) 2026 The rmtstap Authors
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


#pragma once

#include "harness.hpp"
#include "numerics.hpp"
#include "reduced_dim.hpp"
#include "rmt_estimator.hpp"
#include "sampling.hpp"
#include "scene.hpp"
#include "stap_core.hpp"
