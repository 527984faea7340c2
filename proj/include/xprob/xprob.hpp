// Copyright 2026 The Authors.
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

#ifndef XPROB_XPROB_HPP_
#define XPROB_XPROB_HPP_

#include "xprob/baseline.hpp"
#include "xprob/blackbox.hpp"
#include "xprob/corpus.hpp"
#include "xprob/editor.hpp"
#include "xprob/evaluation.hpp"
#include "xprob/explanation.hpp"
#include "xprob/harness.hpp"
#include "xprob/neighborhood.hpp"
#include "xprob/ngram.hpp"
#include "xprob/pipeline.hpp"
#include "xprob/subprocess.hpp"
#include "xprob/surrogate.hpp"
#include "xprob/text.hpp"

#endif  // XPROB_XPROB_HPP_
