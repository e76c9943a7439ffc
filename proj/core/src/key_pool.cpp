#include "qgp/key_pool.hpp"

#include <algorithm>

namespace qgp::keysvc {

std::string error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::None: return "NONE";
        case ErrorCode::AlarmActive: return "ALARM_ACTIVE";
        case ErrorCode::InsufficientKey: return "INSUFFICIENT_KEY";
        case ErrorCode::UnknownKeyId: return "UNKNOWN_KEY_ID";
        case ErrorCode::AlreadyConsumed: return "ALREADY_CONSUMED";
        case ErrorCode::BadRequest: return "BAD_REQUEST";
    }
    return "UNKNOWN";
}

Bytes clip_key_bits(const std::vector<std::uint8_t>& bits, std::uint64_t size_bits) {
    Bytes out((size_bits + 7) / 8, 0);
    for (std::uint64_t i = 0; i < size_bits; ++i) {
        out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1) << (i % 8));
    }
    return out;
}

bool KeyPool::ingest(const qkd::SessionKeyMaterial& material) {
    std::lock_guard lock(mutex_);
    if (entries_.contains(material.key_id)) return false;
    Entry entry;
    entry.key_bits = material.key_bits;
    entry.created_at = next_created_++;
    entries_.emplace(material.key_id, std::move(entry));
    last_qber_ = material.qber;
    return true;
}

void KeyPool::raise_alarm(double qber) {
    std::lock_guard lock(mutex_);
    alarm_ = true;
    last_qber_ = qber;
}

void KeyPool::clear_alarm() {
    std::lock_guard lock(mutex_);
    alarm_ = false;
}

std::uint64_t KeyPool::stored_bits() const {
    std::lock_guard lock(mutex_);
    std::uint64_t total = 0;
    for (const auto& [id, entry] : entries_) {
        if (entry.state != State::Consumed) total += entry.key_bits.size();
    }
    return total;
}

bool KeyPool::alarm() const {
    std::lock_guard lock(mutex_);
    return alarm_;
}

double KeyPool::last_qber() const {
    std::lock_guard lock(mutex_);
    return last_qber_;
}

KeyResponse KeyPool::serve(const KeyRequest& request) {
    std::lock_guard lock(mutex_);
    return serve_locked(request);
}

KeyResponse KeyPool::serve_locked(const KeyRequest& request) {
    KeyResponse resp;

    if (request.op == Op::Status) {
        resp.ok = true;
        resp.qber = last_qber_;
        resp.alarm = alarm_;
        for (const auto& [id, entry] : entries_) {
            if (entry.state != State::Consumed) resp.stored_bits += entry.key_bits.size();
        }
        return resp;
    }

    if (alarm_) {
        resp.code = ErrorCode::AlarmActive;
        return resp;
    }

    if (request.op == Op::GetKey) {
        if (request.size_bits == 0) {
            resp.code = ErrorCode::BadRequest;
            return resp;
        }
        // Oldest adequate entry wins, keeping allocation deterministic.
        Entry* best = nullptr;
        KeyId best_id{};
        for (auto& [id, entry] : entries_) {
            if (entry.state != State::Available) continue;
            if (entry.key_bits.size() < request.size_bits) continue;
            if (best == nullptr || entry.created_at < best->created_at) {
                best = &entry;
                best_id = id;
            }
        }
        if (best == nullptr) {
            resp.code = ErrorCode::InsufficientKey;
            return resp;
        }
        best->state = State::Reserved;
        best->requester = request.requester;
        best->peer = request.peer;
        best->served_bits = request.size_bits;
        resp.ok = true;
        resp.key_id = best_id;
        resp.size_bits = request.size_bits;
        resp.key = clip_key_bits(best->key_bits, request.size_bits);
        return resp;
    }

    // GetKeyById: the reserved peer collects the matched copy exactly once.
    auto it = entries_.find(request.key_id);
    if (it == entries_.end()) {
        resp.code = ErrorCode::UnknownKeyId;
        return resp;
    }
    Entry& entry = it->second;
    if (entry.state == State::Consumed) {
        resp.code = ErrorCode::AlreadyConsumed;
        return resp;
    }
    if (entry.state != State::Reserved || request.requester != entry.peer) {
        // Unreserved ids are not addressable; neither are third parties.
        resp.code = ErrorCode::UnknownKeyId;
        return resp;
    }
    entry.state = State::Consumed;
    resp.ok = true;
    resp.key_id = request.key_id;
    resp.size_bits = entry.served_bits;
    resp.key = clip_key_bits(entry.key_bits, entry.served_bits);
    return resp;
}

}  // namespace qgp::keysvc
