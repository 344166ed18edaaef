// Account creation and verification with a pluggable slow hash.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcp/scheme.hpp"

namespace hcp {

/// Slow-hash configuration; the algorithm id fully determines the function.
///   "scrypt-n<N>-r<r>-p<p>"   OpenSSL scrypt, 32-byte output (default N=16384, r=8, p=1)
///   "pbkdf2-sha256-i<iter>"   OpenSSL PBKDF2-HMAC-SHA256, 32-byte output
struct HashConfig {
    std::string algorithm = "scrypt-n16384-r8-p1";
    std::size_t salt_bytes = 16;
};

/// Digest of `message` under `algorithm` with `salt`. Throws InputError on unknown ids.
std::vector<std::uint8_t> slow_hash(const std::string& algorithm, const std::vector<std::uint8_t>& salt,
                                    const std::vector<std::uint8_t>& message);

/// Canonical digest input: u32le version, d, k1, k2, n, t, every clause index
/// in order (u32le), then the response digits as single bytes.
std::vector<std::uint8_t> canonical_serialization(const SchemeParams& params, const PasswordChallenge& challenge,
                                                  const std::vector<Digit>& response);

struct AccountRecord {
    std::string account_id;
    SchemeParams params;
    PasswordChallenge challenge;
    std::string algorithm;
    std::vector<std::uint8_t> salt;
    std::vector<std::uint8_t> digest;
};

AccountRecord create_account(const SecretMapping& sigma, const SchemeParams& params, const std::string& account_id,
                             Rng& rng, const HashConfig& cfg = {});
/// Recomputes the digest; malformed digits (wrong length or range) throw InputError.
bool verify(const AccountRecord& record, const std::vector<Digit>& response);

/// Commitment to a generation seed (fixed domain-separation salt).
std::vector<std::uint8_t> seed_commitment(std::uint64_t seed, const std::string& algorithm);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace hcp
