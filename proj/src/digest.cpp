#include "anobench/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <vector>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"

namespace anobench {

namespace {

std::string to_hex(const unsigned char* data, size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out(len * 2, '0');
    for (size_t i = 0; i < len; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0x0f];
    }
    return out;
}

struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

CtxPtr new_sha256_ctx() {
    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 context initialization failed");
    }
    return ctx;
}

std::string finish(CtxPtr ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
        throw IoError("SHA-256 finalization failed");
    }
    return to_hex(md.data(), len);
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    auto ctx = new_sha256_ctx();
    if (EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1) {
        throw IoError("SHA-256 update failed");
    }
    return finish(std::move(ctx));
}

std::string sha256_file(const std::string& path) {
    auto in = csv::open_input(path);
    auto ctx = new_sha256_ctx();
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::streamsize got = in.gcount();
        if (got > 0 &&
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(got)) != 1) {
            throw IoError("SHA-256 update failed for '" + path + "'");
        }
    }
    return finish(std::move(ctx));
}

}  // namespace anobench
