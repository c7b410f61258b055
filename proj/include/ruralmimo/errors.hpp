// SPDX-License-Identifier: Apache-2.0
//
// ruralmimo - link-level simulation and coverage planning for high-tower
// massive MIMO base stations
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace ruralmimo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid or inconsistent user-supplied configuration; maps to exit code 2
struct ConfigError : Error {
    using Error::Error;
};

// malformed input file; carries the offending line where known
struct ParseError : Error {
    using Error::Error;
};

struct InconsistentDimensions : Error {
    using Error::Error;
};

struct DistanceBelowValidity : Error {
    using Error::Error;
};

struct DegenerateGains : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct EmptyPool : Error {
    using Error::Error;
};

// feasibility failures; map to exit code 4
struct TargetUnreachable : Error {
    using Error::Error;
};

struct NoFeasibleEirp : Error {
    using Error::Error;
};

struct OutOfBounds : Error {
    using Error::Error;
};

}
