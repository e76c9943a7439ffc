#include "qgp/key_wire.hpp"

#include <json.hpp>

namespace qgp::keysvc {

using nlohmann::json;

Bytes frame(ByteView payload) {
    Bytes out;
    out.reserve(4 + payload.size());
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

namespace {

std::optional<KeyId> parse_key_id(const std::string& hex) {
    if (hex.size() != 32) return std::nullopt;
    for (char c : hex) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
    }
    KeyId id{};
    Bytes raw = hex_decode(hex);
    std::copy(raw.begin(), raw.end(), id.begin());
    return id;
}

}  // namespace

std::optional<KeyRequest> parse_request(ByteView payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    if (!doc.contains("op") || !doc["op"].is_string()) return std::nullopt;

    KeyRequest req;
    const std::string op = doc["op"].get<std::string>();
    if (op == "status") {
        req.op = Op::Status;
        return req;
    }

    if (!doc.contains("requester") || !doc["requester"].is_string()) return std::nullopt;
    req.requester = doc["requester"].get<std::string>();

    if (op == "get_key") {
        req.op = Op::GetKey;
        if (!doc.contains("peer") || !doc["peer"].is_string()) return std::nullopt;
        if (!doc.contains("size_bits") || !doc["size_bits"].is_number_unsigned()) {
            return std::nullopt;
        }
        req.peer = doc["peer"].get<std::string>();
        req.size_bits = doc["size_bits"].get<std::uint64_t>();
        return req;
    }
    if (op == "get_key_by_id") {
        req.op = Op::GetKeyById;
        if (!doc.contains("key_id") || !doc["key_id"].is_string()) return std::nullopt;
        auto id = parse_key_id(doc["key_id"].get<std::string>());
        if (!id.has_value()) return std::nullopt;
        req.key_id = *id;
        return req;
    }
    return std::nullopt;  // unknown op
}

Bytes encode_request(const KeyRequest& request) {
    json doc;
    switch (request.op) {
        case Op::Status:
            doc["op"] = "status";
            break;
        case Op::GetKey:
            doc["op"] = "get_key";
            doc["requester"] = request.requester;
            doc["peer"] = request.peer;
            doc["size_bits"] = request.size_bits;
            break;
        case Op::GetKeyById:
            doc["op"] = "get_key_by_id";
            doc["requester"] = request.requester;
            doc["key_id"] = hex_encode(ByteView(request.key_id.data(), request.key_id.size()));
            break;
    }
    std::string text = doc.dump();
    return Bytes(text.begin(), text.end());
}

Bytes encode_response(const KeyResponse& response) {
    json doc;
    doc["status"] = response.ok ? "ok" : "error";
    if (response.ok) {
        if (!response.key.empty()) {
            doc["key_id"] = hex_encode(ByteView(response.key_id.data(), response.key_id.size()));
            doc["key"] = base64_encode(response.key);
            doc["size_bits"] = response.size_bits;
        } else {
            doc["qber"] = response.qber;
            doc["stored_bits"] = response.stored_bits;
            doc["alarm"] = response.alarm;
        }
    } else {
        doc["code"] = error_code_name(response.code);
    }
    std::string text = doc.dump();
    return Bytes(text.begin(), text.end());
}

KeyResponse parse_response(ByteView payload) {
    json doc = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("status")) {
        throw std::runtime_error("key service: malformed response payload");
    }
    KeyResponse resp;
    resp.ok = doc["status"].get<std::string>() == "ok";
    if (!resp.ok) {
        std::string code = doc.value("code", "BAD_REQUEST");
        for (ErrorCode c : {ErrorCode::AlarmActive, ErrorCode::InsufficientKey,
                            ErrorCode::UnknownKeyId, ErrorCode::AlreadyConsumed,
                            ErrorCode::BadRequest}) {
            if (error_code_name(c) == code) resp.code = c;
        }
        return resp;
    }
    if (doc.contains("key")) {
        Bytes id = hex_decode(doc["key_id"].get<std::string>());
        std::copy(id.begin(), id.end(), resp.key_id.begin());
        resp.key = base64_decode(doc["key"].get<std::string>());
        resp.size_bits = doc.value("size_bits", std::uint64_t{0});
    } else {
        resp.qber = doc.value("qber", 0.0);
        resp.stored_bits = doc.value("stored_bits", std::uint64_t{0});
        resp.alarm = doc.value("alarm", false);
    }
    return resp;
}

}  // namespace qgp::keysvc
