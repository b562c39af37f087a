// Copyright 2026 The isotns Authors
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

#include "isotns/channels.hpp"
#include "isotns/common.hpp"
#include "isotns/exact.hpp"
#include "isotns/frontier.hpp"
#include "isotns/io.hpp"
#include "isotns/lattice.hpp"
#include "isotns/percolation.hpp"
#include "isotns/random.hpp"
#include "isotns/sampler.hpp"
#include "isotns/site.hpp"
#include "isotns/tensor.hpp"
