/* Copyright (c) 2026 The symkernels Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include "symk/bench.hpp"
#include "symk/checkpoint.hpp"
#include "symk/conv.hpp"
#include "symk/data.hpp"
#include "symk/layers.hpp"
#include "symk/network.hpp"
#include "symk/optim.hpp"
#include "symk/random.hpp"
#include "symk/symmetry.hpp"
#include "symk/tensor.hpp"
#include "symk/train.hpp"
#include "symk/transforms.hpp"
