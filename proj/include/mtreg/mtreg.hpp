// Copyright 2026 The mtreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTREG_MTREG_HPP
#define MTREG_MTREG_HPP

#include "mtreg/adaptation.hpp"
#include "mtreg/baselines.hpp"
#include "mtreg/common.hpp"
#include "mtreg/data.hpp"
#include "mtreg/experiment.hpp"
#include "mtreg/feature_decomposition.hpp"
#include "mtreg/features.hpp"
#include "mtreg/io.hpp"
#include "mtreg/multitask.hpp"
#include "mtreg/oracle.hpp"
#include "mtreg/prior.hpp"
#include "mtreg/rng.hpp"
#include "mtreg/synthetic.hpp"

#endif  // MTREG_MTREG_HPP
