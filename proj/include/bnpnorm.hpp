// Copyright 2026 The bnpnorm Authors
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

// Umbrella header.

#pragma once

#include "bnpnorm/commands.hpp"
#include "bnpnorm/csv.hpp"
#include "bnpnorm/dirichlet.hpp"
#include "bnpnorm/distance.hpp"
#include "bnpnorm/errors.hpp"
#include "bnpnorm/laws.hpp"
#include "bnpnorm/mahalanobis.hpp"
#include "bnpnorm/parallel.hpp"
#include "bnpnorm/rbtest.hpp"
#include "bnpnorm/report.hpp"
#include "bnpnorm/rng.hpp"
#include "bnpnorm/simgen.hpp"
#include "bnpnorm/specialfn.hpp"
