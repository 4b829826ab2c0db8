#include "minetrace/core/chain.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "minetrace/core/error.hpp"

namespace minetrace {

using nlohmann::json;

std::string to_snapshot_line(const ChainBlock& block)
{
    json tx = json::array();
    for (const auto& h : block.tx_hashes)
        tx.push_back(h.hex());
    json j = {
        {"height", block.height},
        {"block_hash", block.block_hash.hex()},
        {"prev_id", block.prev_id.hex()},
        {"timestamp", block.timestamp},
        {"difficulty", block.difficulty},
        {"reward_atomic_units", block.reward},
        {"tx_hashes", std::move(tx)},
    };
    if (block.header_blob)
        j["header_blob"] = to_hex(*block.header_blob);
    return j.dump();
}

ChainBlock chain_block_from_line(std::string_view line)
{
    try {
        const auto j = json::parse(line);
        ChainBlock b;
        b.height = j.at("height").get<std::uint64_t>();
        b.block_hash = HashDigest::from_hex(j.at("block_hash").get<std::string>());
        b.prev_id = HashDigest::from_hex(j.at("prev_id").get<std::string>());
        b.timestamp = j.at("timestamp").get<std::uint64_t>();
        b.difficulty = j.at("difficulty").get<std::uint64_t>();
        b.reward = j.at("reward_atomic_units").get<std::uint64_t>();
        for (const auto& h : j.at("tx_hashes"))
            b.tx_hashes.push_back(HashDigest::from_hex(h.get<std::string>()));
        if (b.tx_hashes.empty())
            throw SnapshotError("block " + std::to_string(b.height) + " has no transactions");
        if (b.difficulty == 0)
            throw SnapshotError("block " + std::to_string(b.height) + " has zero difficulty");
        if (auto it = j.find("header_blob"); it != j.end() && !it->is_null())
            b.header_blob = from_hex(it->get<std::string>());
        return b;
    } catch (const SnapshotError&) {
        throw;
    } catch (const std::exception& e) {
        throw SnapshotError(e.what());
    }
}

std::vector<ChainBlock> read_chain_snapshot(std::istream& in)
{
    std::vector<ChainBlock> chain;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            chain.push_back(chain_block_from_line(line));
        } catch (const SnapshotError& e) {
            throw SnapshotError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return chain;
}

void write_chain_snapshot(std::ostream& out, const std::vector<ChainBlock>& chain)
{
    for (const auto& b : chain)
        out << to_snapshot_line(b) << '\n';
}

}  // namespace minetrace
