#pragma once

#include "thermoctl/protocols.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace thermoctl {

inline constexpr const char* kProtocolSchema = "thermoctl.protocol";
inline constexpr int kProtocolSchemaVersion = 1;

// A protocol together with the inverse temperature its maps were declared at
// and, optionally, the pair it starts from.
struct ProtocolDocument {
    double beta;
    std::optional<Pair> initial;
    Protocol protocol;
};

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json protocol_to_json(const ProtocolDocument& doc);

// Throws ValidationError on schema violations and whatever the constructors
// of the decoded objects throw.
ProtocolDocument protocol_from_json(const nlohmann::json& j);

ProtocolDocument load_protocol(const std::string& path);

}  // namespace thermoctl
