#include "qgp/drbg.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace qgp {

namespace {
void aes256_ecb_block(const std::uint8_t* key, const std::uint8_t* in, std::uint8_t* out) {
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    int len = 0;
    EVP_EncryptInit_ex(ctx, EVP_aes_256_ecb(), nullptr, key, nullptr);
    EVP_CIPHER_CTX_set_padding(ctx, 0);
    EVP_EncryptUpdate(ctx, out, &len, in, 16);
    EVP_CIPHER_CTX_free(ctx);
}

void increment_be(std::uint8_t v[16]) {
    for (int j = 15; j >= 0; --j) {
        if (v[j] == 0xff) {
            v[j] = 0x00;
        } else {
            ++v[j];
            break;
        }
    }
}
}  // namespace

NistCtrDrbg::NistCtrDrbg(ByteView entropy_input, ByteView personalization) {
    if (entropy_input.size() != 48) {
        throw std::invalid_argument("NistCtrDrbg: entropy input must be 48 bytes");
    }
    std::uint8_t seed_material[48];
    std::memcpy(seed_material, entropy_input.data(), 48);
    if (!personalization.empty()) {
        if (personalization.size() != 48) {
            throw std::invalid_argument("NistCtrDrbg: personalization must be 48 bytes");
        }
        for (int i = 0; i < 48; ++i) seed_material[i] ^= personalization[i];
    }
    update(seed_material);
}

void NistCtrDrbg::update(const std::uint8_t* provided_data) {
    std::uint8_t temp[48];
    for (int i = 0; i < 3; ++i) {
        increment_be(v_.data());
        aes256_ecb_block(key_.data(), v_.data(), temp + 16 * i);
    }
    if (provided_data != nullptr) {
        for (int i = 0; i < 48; ++i) temp[i] ^= provided_data[i];
    }
    std::memcpy(key_.data(), temp, 32);
    std::memcpy(v_.data(), temp + 32, 16);
}

void NistCtrDrbg::generate(std::uint8_t* out, std::size_t len) {
    std::uint8_t block[16];
    std::size_t i = 0;
    while (len > 0) {
        increment_be(v_.data());
        aes256_ecb_block(key_.data(), v_.data(), block);
        std::size_t take = len > 15 ? 16 : len;
        std::memcpy(out + i, block, take);
        i += take;
        len -= take;
    }
    update(nullptr);
}

Bytes NistCtrDrbg::generate(std::size_t len) {
    Bytes out(len);
    generate(out.data(), len);
    return out;
}

}  // namespace qgp
