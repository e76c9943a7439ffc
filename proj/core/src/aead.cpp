#include "qgp/aead.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace qgp {

namespace {
struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr new_ctx() {
    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    return ctx;
}
}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView associated_data,
                ByteView plaintext) {
    auto ctx = new_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
        throw std::runtime_error("aead_seal: init failed");
    }
    int len = 0;
    if (!associated_data.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                          static_cast<int>(associated_data.size())) != 1) {
        throw std::runtime_error("aead_seal: aad failed");
    }
    Bytes out(plaintext.size() + kAeadTagLen);
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
        throw std::runtime_error("aead_seal: update failed");
    }
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + plaintext.size(), &fin) != 1) {
        throw std::runtime_error("aead_seal: final failed");
    }
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagLen,
                            out.data() + plaintext.size()) != 1) {
        throw std::runtime_error("aead_seal: tag failed");
    }
    return out;
}

std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               ByteView associated_data, ByteView ciphertext) {
    if (ciphertext.size() < kAeadTagLen) return std::nullopt;
    const std::size_t body_len = ciphertext.size() - kAeadTagLen;

    auto ctx = new_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1) {
        throw std::runtime_error("aead_open: init failed");
    }
    int len = 0;
    if (!associated_data.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, associated_data.data(),
                          static_cast<int>(associated_data.size())) != 1) {
        throw std::runtime_error("aead_open: aad failed");
    }
    Bytes out(body_len);
    if (body_len > 0 &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                          static_cast<int>(body_len)) != 1) {
        return std::nullopt;
    }
    Bytes tag(ciphertext.begin() + static_cast<std::ptrdiff_t>(body_len), ciphertext.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagLen, tag.data()) != 1) {
        throw std::runtime_error("aead_open: set tag failed");
    }
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body_len, &fin) != 1) {
        return std::nullopt;  // tag mismatch
    }
    return out;
}

}  // namespace qgp
