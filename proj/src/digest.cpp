#include "pmx/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace pmx {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), raw.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[raw[i] >> 4]);
        out.push_back(hex[raw[i] & 0xf]);
    }
    return out;
}

std::string commit_digest(std::string_view voter, std::string_view outcome,
                          std::string_view salt) {
    std::string preimage;
    preimage.reserve(outcome.size() + salt.size() + voter.size() + 2);
    preimage.append(outcome);
    preimage.push_back('|');
    preimage.append(salt);
    preimage.push_back('|');
    preimage.append(voter);
    return sha256_hex(preimage);
}

}  // namespace pmx
