// JSON document conversions shared by the publisher, CLI and HTTP service.
#pragma once

#include <string>

#include <json.hpp>

#include "hcp/account.hpp"
#include "hcp/scheme.hpp"

namespace hcp {

using Json = nlohmann::ordered_json;

Json params_to_json(const SchemeParams& p);
/// Validates the parameters; throws InputError on missing fields or invalid values.
SchemeParams params_from_json(const Json& j);

Json clause_to_json(const Clause& c);
/// Validates width, range and distinctness against params.
Clause clause_from_json(const Json& j, const SchemeParams& p);

/// A password challenge as an array of clauses.
Json challenge_to_json(const PasswordChallenge& ch);
PasswordChallenge challenge_from_json(const Json& j, const SchemeParams& p, std::string label = {});

/// Secret mapping file: {version: 1, n, d, digits}.
Json mapping_to_json(const SecretMapping& sigma);
SecretMapping mapping_from_json(const Json& j);

Json account_to_json(const AccountRecord& rec);
AccountRecord account_from_json(const Json& j);

/// Stable document text: objects indented by two spaces, arrays of scalars on
/// one line, nested arrays one element per line; trailing newline.
std::string format_document(const Json& j);

/// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);
/// Writes a whole file (truncating); throws InputError on failure.
void write_file(const std::string& path, const std::string& contents);
/// Parses JSON text; malformed text becomes InputError.
Json parse_json(const std::string& text);

}  // namespace hcp
