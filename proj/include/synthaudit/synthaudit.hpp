// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "synthaudit/baselines.hpp"
#include "synthaudit/discretize.hpp"
#include "synthaudit/error.hpp"
#include "synthaudit/fidelity.hpp"
#include "synthaudit/harness.hpp"
#include "synthaudit/ingest.hpp"
#include "synthaudit/privacy.hpp"
#include "synthaudit/random.hpp"
#include "synthaudit/report_io.hpp"
#include "synthaudit/table.hpp"
