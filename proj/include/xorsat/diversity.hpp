#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "cnf.hpp"

namespace xorsat {

// Pins the compressor behind every C(.) value. Reports echo it so numbers
// can be reproduced.
struct CompressorConfig {
    std::string algorithm = "deflate";
    int level = 9;

    bool operator==(const CompressorConfig&) const = default;
};

namespace detail {

// One reusable deflate context per (thread, level). deflateReset avoids the
// allocation-heavy init that dominates compress2 on short inputs, while the
// parameters stay exactly compress2's, so the output bytes are identical.
class Deflater {
public:
    explicit Deflater(int level) {
        strm_.zalloc = Z_NULL;
        strm_.zfree = Z_NULL;
        strm_.opaque = Z_NULL;
        if (deflateInit(&strm_, level) != Z_OK)
            throw std::runtime_error("deflateInit failed");
    }
    ~Deflater() { deflateEnd(&strm_); }
    Deflater(const Deflater&) = delete;
    Deflater& operator=(const Deflater&) = delete;

    std::size_t size(std::string_view bytes) {
        deflateReset(&strm_);
        const uLong bound = deflateBound(&strm_, static_cast<uLong>(bytes.size()));
        if (out_.size() < bound) out_.resize(bound);
        strm_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
        strm_.avail_in = static_cast<uInt>(bytes.size());
        strm_.next_out = out_.data();
        strm_.avail_out = static_cast<uInt>(out_.size());
        if (deflate(&strm_, Z_FINISH) != Z_STREAM_END)
            throw std::runtime_error("deflate failed");
        return static_cast<std::size_t>(strm_.total_out);
    }

private:
    z_stream strm_{};
    std::vector<Bytef> out_;
};

}  // namespace detail

// Byte length of the compressed input. Deterministic for a fixed
// (algorithm, level, input).
inline std::size_t compressed_size(std::string_view bytes, const CompressorConfig& cfg) {
    if (cfg.algorithm != "deflate")
        throw std::invalid_argument("unknown compressor algorithm: " + cfg.algorithm);
    if (cfg.level < 0 || cfg.level > 9)
        throw std::invalid_argument("compression level must be in [0, 9]");
    thread_local std::array<std::unique_ptr<detail::Deflater>, 10> contexts;
    auto& slot = contexts[static_cast<std::size_t>(cfg.level)];
    if (!slot) slot = std::make_unique<detail::Deflater>(cfg.level);
    return slot->size(bytes);
}

// Canonical multiset encoding: serialized lines sorted ascending and
// concatenated, the newline terminator acting as separator. Sorting makes
// every C(.) of a multiset independent of insertion order.
inline std::vector<std::string> canonical_lines(std::span<const Assignment> members) {
    std::vector<std::string> lines;
    lines.reserve(members.size());
    for (const Assignment& m : members) lines.push_back(serialize_assignment(m));
    std::sort(lines.begin(), lines.end());
    return lines;
}

inline std::string concat_lines(const std::vector<std::string>& lines) {
    std::size_t total = 0;
    for (const std::string& l : lines) total += l.size();
    std::string cat;
    cat.reserve(total);
    for (const std::string& l : lines) cat += l;
    return cat;
}

inline std::size_t c_of_set(std::span<const Assignment> members, const CompressorConfig& cfg) {
    if (members.empty()) throw std::invalid_argument("c_of_set: empty multiset");
    return compressed_size(concat_lines(canonical_lines(members)), cfg);
}

// Pairwise NCD: (C(xy) - min(C(x), C(y))) / max(C(x), C(y)), with xy the
// canonical sorted-order concatenation, so the result is symmetric exactly.
inline double ncd_pair(const Assignment& x, const Assignment& y, const CompressorConfig& cfg) {
    std::string lx = serialize_assignment(x);
    std::string ly = serialize_assignment(y);
    const std::size_t cx = compressed_size(lx, cfg);
    const std::size_t cy = compressed_size(ly, cfg);
    if (ly < lx) std::swap(lx, ly);
    const std::size_t cxy = compressed_size(lx + ly, cfg);
    const double mn = static_cast<double>(std::min(cx, cy));
    const double mx = static_cast<double>(std::max(cx, cy));
    if (mx == 0.0) return 0.0;
    return (static_cast<double>(cxy) - mn) / mx;
}

struct NcdInfo {
    double value = 0.0;
    bool degenerate = false;    // denominator was 0; value pinned to 0
    bool out_of_range = false;  // value above the 1.2 diagnostic threshold
};

// Multiset NCD: (C(X) - min_{s in X} C(s)) / max_{s in X} C(X \ {s}).
// |X| < 2 is defined as 0 (no diversity information yet).
inline NcdInfo ncd_set_info(std::span<const Assignment> members, const CompressorConfig& cfg) {
    NcdInfo info;
    if (members.size() < 2) return info;

    const std::vector<std::string> lines = canonical_lines(members);
    const std::size_t c_all = compressed_size(concat_lines(lines), cfg);

    std::size_t min_single = SIZE_MAX;
    for (const std::string& l : lines) min_single = std::min(min_single, compressed_size(l, cfg));

    std::size_t max_loo = 0;
    std::string buf;
    for (std::size_t skip = 0; skip < lines.size(); ++skip) {
        buf.clear();
        for (std::size_t j = 0; j < lines.size(); ++j)
            if (j != skip) buf += lines[j];
        max_loo = std::max(max_loo, compressed_size(buf, cfg));
    }

    if (max_loo == 0) {
        info.degenerate = true;
        return info;
    }
    info.value = (static_cast<double>(c_all) - static_cast<double>(min_single)) /
                 static_cast<double>(max_loo);
    info.out_of_range = info.value > 1.2;
    return info;
}

inline double ncd_set(std::span<const Assignment> members, const CompressorConfig& cfg) {
    return ncd_set_info(members, cfg).value;
}

struct Histogram {
    std::vector<double> edges;        // counts.size() + 1 entries, edges[0] == 0
    std::vector<std::size_t> counts;  // counts sum to the member count
};

// Per-member C(x) values bucketed into equal-width bins whose first edge is
// exactly 0.
inline Histogram cx_distribution(std::span<const Assignment> members,
                                 const CompressorConfig& cfg, int bins = 10) {
    if (members.empty()) throw std::invalid_argument("cx_distribution: empty suite");
    if (bins < 1) throw std::invalid_argument("cx_distribution: bins must be >= 1");

    std::vector<std::size_t> values;
    values.reserve(members.size());
    for (const Assignment& m : members)
        values.push_back(compressed_size(serialize_assignment(m), cfg));

    const std::size_t max_v = *std::max_element(values.begin(), values.end());
    const double width = max_v > 0 ? static_cast<double>(max_v) / bins : 1.0;

    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = width * i;
    h.edges[0] = 0.0;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (std::size_t v : values) {
        auto b = static_cast<std::size_t>(static_cast<double>(v) / width);
        if (b >= h.counts.size()) b = h.counts.size() - 1;  // v == max lands in the last bin
        ++h.counts[b];
    }
    return h;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_start,bin_end,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += format_number(h.edges[i]);
        out += ',';
        out += format_number(h.edges[i + 1]);
        out += ',';
        out += std::to_string(h.counts[i]);
        out += '\n';
    }
    return out;
}

}  // namespace xorsat
