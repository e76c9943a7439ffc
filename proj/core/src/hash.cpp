#include "qgp/hash.hpp"

#include <openssl/sha.h>

#include "qgp/sha3.hpp"

namespace qgp {

Digest hash(ByteView message, HashAlgorithm algorithm) {
    Digest d{algorithm, {}};
    switch (algorithm) {
        case HashAlgorithm::Sha2_256:
            SHA256(message.data(), message.size(), d.bytes.data());
            break;
        case HashAlgorithm::Sha3_256:
            d.bytes = sha3_256(message);
            break;
    }
    return d;
}

}  // namespace qgp
