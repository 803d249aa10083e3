// Reproducibility header embedded in every output file: JSON object with the
// command, parameters, tool version, optional seed and a UTC timestamp.
// CSV files carry it as a single leading "# " comment line; JSON reports as a
// "manifest" member.  Floats print with 17 significant digits throughout so
// values round-trip bit-exactly.
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace fjp {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct RunManifest {
    std::string command;
    nlohmann::json params;  // command-specific flags
    std::string tool_version = kToolVersion;
    std::optional<std::uint64_t> seed;
    std::string timestamp;  // ISO-8601 UTC

    static std::string now_utc() {
        auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return buf;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"command", command},
                         {"params", params},
                         {"tool_version", tool_version},
                         {"schema_version", kSchemaVersion},
                         {"timestamp", timestamp}};
        if (seed) j["seed"] = *seed;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.params = j.at("params");
        m.tool_version = j.at("tool_version").get<std::string>();
        m.timestamp = j.at("timestamp").get<std::string>();
        if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
        return m;
    }

    std::string csv_header() const { return "# " + to_json().dump(); }
};

}  // namespace fjp
