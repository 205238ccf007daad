// Copyright 2026 The qlab Authors
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

#include "qlab/core/error.hpp"
#include "qlab/core/hilbert.hpp"
#include "qlab/core/linalg.hpp"
#include "qlab/core/ode.hpp"
#include "qlab/core/pulse.hpp"
#include "qlab/core/state.hpp"
#include "qlab/core/types.hpp"

#include "qlab/cavity.hpp"
#include "qlab/cv.hpp"
#include "qlab/entanglement.hpp"
#include "qlab/iontrap.hpp"
#include "qlab/light_memory.hpp"
#include "qlab/neutral_gates.hpp"
#include "qlab/qubit_protocols.hpp"
#include "qlab/repeater.hpp"
