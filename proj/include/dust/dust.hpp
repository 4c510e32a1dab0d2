/*
 * Copyright 2026 The dustkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "dust/calibration.hpp"
#include "dust/corpus_io.hpp"
#include "dust/edit_distance.hpp"
#include "dust/error.hpp"
#include "dust/parallel.hpp"
#include "dust/rational.hpp"
#include "dust/simulate.hpp"
#include "dust/tokenize.hpp"
#include "dust/uncertainty.hpp"
