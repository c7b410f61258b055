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

#include "ruralmimo/manifest.hpp"

#include <cstdio>

#include <json.hpp>

#include "ruralmimo/errors.hpp"

namespace ruralmimo {

namespace {

using nlohmann::json;

RunManifest manifest_from_json(const json& value) {
    RunManifest manifest;
    manifest.command = value.at("command").get<std::string>();
    manifest.version = value.at("version").get<std::string>();
    manifest.seed = value.at("seed").get<std::uint64_t>();
    manifest.config_digest = value.at("config_digest").get<std::string>();
    manifest.payload_digest = value.at("payload_digest").get<std::string>();
    for (const auto& warning : value.at("warnings"))
        manifest.warnings.push_back(warning.get<std::string>());
    return manifest;
}

json manifest_to_json(const RunManifest& manifest) {
    return json{{"command", manifest.command},
                {"version", manifest.version},
                {"seed", manifest.seed},
                {"config_digest", manifest.config_digest},
                {"payload_digest", manifest.payload_digest},
                {"warnings", manifest.warnings}};
}

VerifyReport check(RunManifest manifest, const std::string& payload_digest,
                   const std::string& config_text) {
    VerifyReport report;
    report.manifest = std::move(manifest);
    if (payload_digest != report.manifest.payload_digest) {
        report.message = "payload digest mismatch: manifest has " +
                         report.manifest.payload_digest + ", payload hashes to " + payload_digest;
        return report;
    }
    if (!config_text.empty()) {
        const std::string config_digest = digest(config_text);
        if (config_digest != report.manifest.config_digest) {
            report.message = "config digest mismatch: manifest has " +
                             report.manifest.config_digest + ", config hashes to " + config_digest;
            return report;
        }
    }
    report.ok = true;
    report.message = "ok";
    return report;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const char byte : data) {
        hash ^= static_cast<unsigned char>(byte);
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string digest(std::string_view data) {
    char buffer[24];
    std::snprintf(buffer, sizeof(buffer), "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buffer;
}

std::string manifest_json(const RunManifest& manifest) {
    return manifest_to_json(manifest).dump();
}

std::string wrap_csv(RunManifest manifest, const std::string& payload) {
    manifest.payload_digest = digest(payload);
    return "# manifest " + manifest_json(manifest) + "\n" + payload;
}

std::string wrap_json(RunManifest manifest, const std::string& result_json) {
    json result;
    try {
        result = json::parse(result_json);
    } catch (const json::exception& error) {
        throw ParseError(std::string("wrap_json: result is not valid JSON: ") + error.what());
    }
    manifest.payload_digest = digest(result.dump());
    const json wrapped{{"manifest", manifest_to_json(manifest)}, {"result", result}};
    return wrapped.dump(2) + "\n";
}

VerifyReport verify_output(const std::string& text, const std::string& config_text) {
    size_t start = text.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) throw ParseError("verify: empty output");

    if (text[start] == '#') {
        const size_t newline = text.find('\n', start);
        const std::string first_line =
            text.substr(start, newline == std::string::npos ? std::string::npos : newline - start);
        const std::string prefix = "# manifest ";
        if (first_line.rfind(prefix, 0) != 0)
            throw ParseError("verify: first line is a comment but not a manifest");
        RunManifest manifest;
        try {
            manifest = manifest_from_json(json::parse(first_line.substr(prefix.size())));
        } catch (const json::exception& error) {
            throw ParseError(std::string("verify: bad manifest JSON: ") + error.what());
        }
        const std::string payload = newline == std::string::npos ? "" : text.substr(newline + 1);
        return check(std::move(manifest), digest(payload), config_text);
    }

    if (text[start] == '{') {
        json wrapped;
        try {
            wrapped = json::parse(text);
        } catch (const json::exception& error) {
            throw ParseError(std::string("verify: bad JSON output: ") + error.what());
        }
        if (!wrapped.contains("manifest") || !wrapped.contains("result"))
            throw ParseError("verify: JSON output lacks manifest or result");
        RunManifest manifest;
        try {
            manifest = manifest_from_json(wrapped["manifest"]);
        } catch (const json::exception& error) {
            throw ParseError(std::string("verify: bad manifest block: ") + error.what());
        }
        return check(std::move(manifest), digest(wrapped["result"].dump()), config_text);
    }
    throw ParseError("verify: output is neither a manifest-led CSV nor a JSON document");
}

}
