// Copyright 2026 The qnphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNPHASE_QNPHASE_HPP
#define QNPHASE_QNPHASE_HPP

#include "qnphase/hilbert.hpp"
#include "qnphase/random.hpp"
#include "qnphase/network.hpp"
#include "qnphase/evolution.hpp"
#include "qnphase/resources.hpp"
#include "qnphase/measurement.hpp"
#include "qnphase/readout.hpp"
#include "qnphase/metrics.hpp"
#include "qnphase/response.hpp"
#include "qnphase/config.hpp"
#include "qnphase/harness.hpp"
#include "qnphase/io.hpp"
#include "qnphase/validation.hpp"

#endif // QNPHASE_QNPHASE_HPP
