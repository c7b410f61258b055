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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ruralmimo {

std::uint64_t fnv1a64(std::string_view data);

/// "fnv1a:" followed by 16 lowercase hex digits.
std::string digest(std::string_view data);

/// Provenance block embedded in every output so a result can be traced
/// back to the exact configuration and seed that produced it.
struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string payload_digest;
    std::vector<std::string> warnings;
};

std::string manifest_json(const RunManifest& manifest);

/// Prepend "# manifest {...}" to a CSV payload. The payload digest covers
/// every byte after the first newline of the returned text.
std::string wrap_csv(RunManifest manifest, const std::string& payload);

/// Wrap a JSON result as {"manifest": ..., "result": ...}. The payload
/// digest covers the canonical serialization of the result value.
std::string wrap_json(RunManifest manifest, const std::string& result_json);

struct VerifyReport {
    bool ok = false;
    std::string message;
    RunManifest manifest;
};

/// Recompute the payload digest of a wrapped output and compare it with
/// the embedded manifest. When config_text is nonempty its digest is
/// checked against the manifest as well.
VerifyReport verify_output(const std::string& text, const std::string& config_text = "");

}
