// Copyright 2026 The Nomina Authors
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

#ifndef NOMINA_NOMINA_HPP
#define NOMINA_NOMINA_HPP

#include "nomina/csv.hpp"
#include "nomina/errors.hpp"
#include "nomina/eval.hpp"
#include "nomina/ingest.hpp"
#include "nomina/matcher.hpp"
#include "nomina/model.hpp"
#include "nomina/normalize.hpp"
#include "nomina/parallel.hpp"
#include "nomina/pipeline.hpp"
#include "nomina/report.hpp"
#include "nomina/synth.hpp"
#include "nomina/version.hpp"

#endif  // NOMINA_NOMINA_HPP
