#pragma once

#include <optional>

#include "qgp/bytes.hpp"

namespace qgp {

/// Raw DEFLATE (RFC 1951), no zlib/gzip container.
Bytes deflate_compress(ByteView data);

/// Returns nullopt on a corrupted or truncated stream.
std::optional<Bytes> deflate_decompress(ByteView data);

}  // namespace qgp
