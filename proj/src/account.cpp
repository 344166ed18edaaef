#include "hcp/account.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <charconv>

#include "hcp/errors.hpp"

namespace hcp {

namespace {

constexpr std::uint32_t kSerializationVersion = 1;
constexpr std::size_t kDigestBytes = 32;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Parses "<prefix><number>" fields of an algorithm id such as "scrypt-n16384-r8-p1".
std::uint64_t field(const std::string& id, const std::string& key) {
    auto pos = id.find("-" + key);
    if (pos == std::string::npos) throw InputError("hash algorithm id lacks parameter '" + key + "': " + id);
    const char* begin = id.data() + pos + 1 + key.size();
    const char* end = id.data() + id.size();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin || (ptr != end && *ptr != '-'))
        throw InputError("malformed hash algorithm id: " + id);
    return v;
}

}  // namespace

std::vector<std::uint8_t> slow_hash(const std::string& algorithm, const std::vector<std::uint8_t>& salt,
                                    const std::vector<std::uint8_t>& message) {
    std::vector<std::uint8_t> out(kDigestBytes);
    const char* pass = reinterpret_cast<const char*>(message.data());
    if (algorithm.rfind("scrypt-", 0) == 0) {
        std::uint64_t N = field(algorithm, "n"), r = field(algorithm, "r"), p = field(algorithm, "p");
        if (N < 2 || (N & (N - 1)) != 0 || r == 0 || p == 0) throw InputError("invalid scrypt parameters");
        std::uint64_t maxmem = 128 * r * N + 128 * r * p + (1u << 20);
        if (EVP_PBE_scrypt(pass, message.size(), salt.data(), salt.size(), N, r, p, maxmem, out.data(),
                           out.size()) != 1)
            throw InputError("scrypt evaluation failed for " + algorithm);
    } else if (algorithm.rfind("pbkdf2-sha256-", 0) == 0) {
        std::uint64_t iter = field(algorithm, "i");
        if (iter == 0 || iter > 0x7fffffff) throw InputError("invalid PBKDF2 iteration count");
        if (PKCS5_PBKDF2_HMAC(pass, static_cast<int>(message.size()), salt.data(), static_cast<int>(salt.size()),
                              static_cast<int>(iter), EVP_sha256(), static_cast<int>(out.size()), out.data()) != 1)
            throw InputError("PBKDF2 evaluation failed");
    } else {
        throw InputError("unknown hash algorithm: " + algorithm);
    }
    return out;
}

std::vector<std::uint8_t> canonical_serialization(const SchemeParams& p, const PasswordChallenge& challenge,
                                                  const std::vector<Digit>& response) {
    std::vector<std::uint8_t> out;
    put_u32(out, kSerializationVersion);
    for (unsigned v : {p.d, p.k1, p.k2, p.n, p.t}) put_u32(out, v);
    for (const auto& c : challenge.clauses)
        for (Index idx : c.indices) put_u32(out, idx);
    for (Digit x : response) out.push_back(x);
    return out;
}

AccountRecord create_account(const SecretMapping& sigma, const SchemeParams& params, const std::string& account_id,
                             Rng& rng, const HashConfig& cfg) {
    params.validate();
    AccountRecord rec;
    rec.account_id = account_id;
    rec.params = params;
    rec.challenge = gen_password_challenge(params, rng, account_id);
    rec.algorithm = cfg.algorithm;
    rec.salt.resize(cfg.salt_bytes);
    for (auto& b : rec.salt) b = static_cast<std::uint8_t>(rng.uniform(256));
    auto response = respond(params, sigma, rec.challenge);
    rec.digest = slow_hash(rec.algorithm, rec.salt, canonical_serialization(params, rec.challenge, response));
    return rec;
}

bool verify(const AccountRecord& record, const std::vector<Digit>& response) {
    if (response.size() != record.challenge.clauses.size()) throw InputError("response length must equal t");
    for (Digit x : response)
        if (x >= record.params.d) throw InputError("response digit outside Z_d");
    auto digest =
        slow_hash(record.algorithm, record.salt, canonical_serialization(record.params, record.challenge, response));
    return digest.size() == record.digest.size() &&
           CRYPTO_memcmp(digest.data(), record.digest.data(), digest.size()) == 0;
}

std::vector<std::uint8_t> seed_commitment(std::uint64_t seed, const std::string& algorithm) {
    static const std::string kSalt = "hcp-seed-commitment";
    std::vector<std::uint8_t> salt(kSalt.begin(), kSalt.end());
    std::vector<std::uint8_t> msg;
    for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    return slow_hash(algorithm, salt, msg);
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 15]);
    }
    return s;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    if (hex.size() % 2) throw InputError("hex string has odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InputError("invalid hex character");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) * 16 + nibble(hex[2 * i + 1]));
    return out;
}

}  // namespace hcp
