#include "hcp/io.hpp"

#include <fstream>
#include <sstream>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

template <typename T>
T get_field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

Json params_to_json(const SchemeParams& p) {
    return Json{{"d", p.d}, {"k1", p.k1}, {"k2", p.k2}, {"n", p.n}, {"t", p.t}};
}

SchemeParams params_from_json(const Json& j) {
    SchemeParams p;
    p.d = get_field<unsigned>(j, "d");
    p.k1 = get_field<unsigned>(j, "k1");
    p.k2 = get_field<unsigned>(j, "k2");
    p.n = get_field<unsigned>(j, "n");
    p.t = get_field<unsigned>(j, "t");
    p.validate();
    return p;
}

Json clause_to_json(const Clause& c) {
    Json arr = Json::array();
    for (Index i : c.indices) arr.push_back(i);
    return arr;
}

Clause clause_from_json(const Json& j, const SchemeParams& p) {
    if (!j.is_array()) throw InputError("clause must be an array of indices");
    Clause c;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError("clause entries must be non-negative integers");
        c.indices.push_back(static_cast<Index>(v.get<long long>()));
    }
    validate_clause(p, c);
    return c;
}

Json challenge_to_json(const PasswordChallenge& ch) {
    Json arr = Json::array();
    for (const auto& c : ch.clauses) arr.push_back(clause_to_json(c));
    return arr;
}

PasswordChallenge challenge_from_json(const Json& j, const SchemeParams& p, std::string label) {
    if (!j.is_array()) throw InputError("password challenge must be an array of clauses");
    PasswordChallenge ch;
    ch.label = std::move(label);
    for (const auto& c : j) ch.clauses.push_back(clause_from_json(c, p));
    if (ch.clauses.size() != p.t) throw InputError("password challenge must contain exactly t clauses");
    return ch;
}

Json mapping_to_json(const SecretMapping& sigma) {
    return Json{{"version", 1}, {"n", sigma.size()}, {"d", sigma.d}, {"digits", digits_to_string(sigma.digits)}};
}

SecretMapping mapping_from_json(const Json& j) {
    if (get_field<int>(j, "version") != 1) throw InputError("unsupported mapping file version");
    SecretMapping sigma;
    sigma.d = get_field<unsigned>(j, "d");
    if (sigma.d < 1 || sigma.d > 36) throw InputError("mapping file alphabet must lie in [1, 36]");
    auto n = get_field<std::size_t>(j, "n");
    sigma.digits = digits_from_string(get_field<std::string>(j, "digits"), sigma.d);
    if (sigma.digits.size() != n) throw InputError("mapping digit count does not match n");
    return sigma;
}

Json account_to_json(const AccountRecord& rec) {
    return Json{{"version", 1},
                {"account_id", rec.account_id},
                {"params", params_to_json(rec.params)},
                {"challenge", challenge_to_json(rec.challenge)},
                {"algorithm", rec.algorithm},
                {"salt", to_hex(rec.salt)},
                {"digest", to_hex(rec.digest)}};
}

AccountRecord account_from_json(const Json& j) {
    if (get_field<int>(j, "version") != 1) throw InputError("unsupported account record version");
    AccountRecord rec;
    rec.account_id = get_field<std::string>(j, "account_id");
    rec.params = params_from_json(get_field<Json>(j, "params"));
    rec.challenge = challenge_from_json(get_field<Json>(j, "challenge"), rec.params, rec.account_id);
    rec.algorithm = get_field<std::string>(j, "algorithm");
    rec.salt = from_hex(get_field<std::string>(j, "salt"));
    rec.digest = from_hex(get_field<std::string>(j, "digest"));
    return rec;
}

namespace {

bool is_scalar_array(const Json& j) {
    for (const auto& v : j)
        if (v.is_structured()) return false;
    return true;
}

void format_value(const Json& j, int depth, std::string& out) {
    const std::string pad(2 * (depth + 1), ' '), close_pad(2 * depth, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            format_value(it.value(), depth + 1, out);
        }
        out += "\n" + close_pad + "}";
    } else if (j.is_array() && !is_scalar_array(j)) {
        out += "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            format_value(v, depth + 1, out);
        }
        out += "\n" + close_pad + "]";
    } else if (j.is_array()) {
        out += "[";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ", ";
            first = false;
            out += v.dump();
        }
        out += "]";
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string format_document(const Json& j) {
    std::string out;
    format_value(j, 0, out);
    out += "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    out << contents;
    if (!out) throw InputError("write failed for " + path);
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace hcp
