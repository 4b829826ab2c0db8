#include "minetrace/core/blob.hpp"

#include <algorithm>
#include <stdexcept>

#include "minetrace/core/error.hpp"
#include "minetrace/core/varint.hpp"

namespace minetrace {

namespace {

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::uint64_t varint()
    {
        const auto r = read_varint(data_.subspan(pos_));
        pos_ += r.length;
        return r.value;
    }

    HashDigest digest()
    {
        need(HashDigest::size);
        auto d = HashDigest::from_bytes(data_.subspan(pos_, HashDigest::size));
        pos_ += HashDigest::size;
        return d;
    }

    std::uint32_t u32le()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }

    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const
    {
        if (data_.size() - pos_ < n)
            throw MalformedBlob("truncated blob");
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

void put_u32le(std::uint8_t* out, std::uint32_t v) noexcept
{
    for (int i = 0; i < 4; ++i)
        out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

Bytes serialize_blob(const BlockHeaderBlob& header)
{
    if (header.tx_count == 0)
        throw std::invalid_argument("tx_count must include the Coinbase transaction");
    Bytes out;
    out.reserve(80);
    write_varint(out, header.major_version);
    write_varint(out, header.minor_version);
    write_varint(out, header.timestamp);
    out.insert(out.end(), header.prev_id.bytes.begin(), header.prev_id.bytes.end());
    const auto at = out.size();
    out.resize(at + 4);
    put_u32le(out.data() + at, header.nonce);
    out.insert(out.end(), header.merkle_root.bytes.begin(), header.merkle_root.bytes.end());
    write_varint(out, header.tx_count);
    return out;
}

BlockHeaderBlob parse_blob(ByteView bytes)
{
    Reader r(bytes);
    BlockHeaderBlob h;
    h.major_version = r.varint();
    h.minor_version = r.varint();
    h.timestamp = r.varint();
    h.prev_id = r.digest();
    h.nonce = r.u32le();
    h.merkle_root = r.digest();
    h.tx_count = r.varint();
    if (h.tx_count == 0)
        throw MalformedBlob("tx_count is zero");
    if (!r.at_end())
        throw MalformedBlob("trailing bytes after blob");
    return h;
}

std::size_t nonce_offset(ByteView blob)
{
    (void)parse_blob(blob);
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i)
        pos += read_varint(blob.subspan(pos)).length;
    return pos + HashDigest::size;
}

Bytes set_nonce(ByteView blob, std::uint32_t nonce)
{
    const auto at = nonce_offset(blob);
    Bytes out(blob.begin(), blob.end());
    put_u32le(out.data() + at, nonce);
    return out;
}

Bytes zero_nonce(ByteView blob)
{
    return set_nonce(blob, 0);
}

}  // namespace minetrace
