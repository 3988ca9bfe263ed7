// Copyright 2026 The hforge Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace hforge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define HFORGE_DEFINE_ERROR(Name)             \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  }

HFORGE_DEFINE_ERROR(HermiticityError);
HFORGE_DEFINE_ERROR(UnitarityError);
HFORGE_DEFINE_ERROR(DimensionError);
HFORGE_DEFINE_ERROR(ProjectorError);
HFORGE_DEFINE_ERROR(NotCyclicError);
HFORGE_DEFINE_ERROR(DegeneracyError);
HFORGE_DEFINE_ERROR(FrameError);
HFORGE_DEFINE_ERROR(SequenceError);
HFORGE_DEFINE_ERROR(DivisionError);
HFORGE_DEFINE_ERROR(NoSolutionError);
HFORGE_DEFINE_ERROR(ConstraintError);
HFORGE_DEFINE_ERROR(CyclicityError);
HFORGE_DEFINE_ERROR(PulseShapeError);
HFORGE_DEFINE_ERROR(SegmentChainError);
HFORGE_DEFINE_ERROR(ReducibleError);
HFORGE_DEFINE_ERROR(CommensurabilityError);
HFORGE_DEFINE_ERROR(LeakageError);
HFORGE_DEFINE_ERROR(ModelError);
HFORGE_DEFINE_ERROR(ConfigError);

#undef HFORGE_DEFINE_ERROR

}  // namespace hforge
