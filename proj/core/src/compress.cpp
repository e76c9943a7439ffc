#include "qgp/compress.hpp"

#include <zlib.h>

#include <stdexcept>

namespace qgp {

namespace {
// windowBits -15 selects the raw RFC 1951 stream, no header or checksum.
constexpr int kRawWindowBits = -15;
constexpr std::size_t kChunk = 64 * 1024;
}  // namespace

Bytes deflate_compress(ByteView data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, kRawWindowBits, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw std::runtime_error("deflateInit2 failed");
    }
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());

    Bytes out;
    int ret = Z_OK;
    do {
        std::size_t base = out.size();
        out.resize(base + kChunk);
        zs.next_out = out.data() + base;
        zs.avail_out = kChunk;
        ret = deflate(&zs, Z_FINISH);
        out.resize(base + (kChunk - zs.avail_out));
    } while (ret == Z_OK || ret == Z_BUF_ERROR);
    deflateEnd(&zs);
    if (ret != Z_STREAM_END) throw std::runtime_error("deflate failed");
    return out;
}

std::optional<Bytes> deflate_decompress(ByteView data) {
    z_stream zs{};
    if (inflateInit2(&zs, kRawWindowBits) != Z_OK) {
        throw std::runtime_error("inflateInit2 failed");
    }
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());

    Bytes out;
    int ret = Z_OK;
    do {
        std::size_t base = out.size();
        out.resize(base + kChunk);
        zs.next_out = out.data() + base;
        zs.avail_out = kChunk;
        ret = inflate(&zs, Z_NO_FLUSH);
        out.resize(base + (kChunk - zs.avail_out));
        if (ret == Z_NEED_DICT || ret == Z_DATA_ERROR || ret == Z_MEM_ERROR) {
            inflateEnd(&zs);
            return std::nullopt;
        }
    } while (ret != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
    inflateEnd(&zs);
    if (ret != Z_STREAM_END) return std::nullopt;  // truncated stream
    if (zs.avail_in != 0) return std::nullopt;     // trailing garbage
    return out;
}

}  // namespace qgp
