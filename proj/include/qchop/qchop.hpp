// Copyright 2026 The qchop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qchop/common.hpp"
#include "qchop/encoders.hpp"
#include "qchop/evolve.hpp"
#include "qchop/hamiltonians.hpp"
#include "qchop/hilbert.hpp"
#include "qchop/instance_io.hpp"
#include "qchop/metrics.hpp"
#include "qchop/polynomial.hpp"
#include "qchop/problem.hpp"
#include "qchop/random.hpp"
#include "qchop/report_io.hpp"
#include "qchop/sweep.hpp"
