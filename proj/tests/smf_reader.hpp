#pragma once

// Minimal Standard MIDI File reader used only by the tests, written against
// the file format rather than the library's writer.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace smf {

struct Event {
    std::uint64_t tick = 0; // absolute
    std::uint8_t status = 0;
    std::vector<std::uint8_t> data; // channel data, or meta payload
    std::uint8_t meta_type = 0;     // when status == 0xFF
};

struct File {
    int format = 0;
    int tracks = 0;
    int division = 0;
    std::vector<Event> events; // first track only
};

struct Note {
    int pitch = 0;
    int velocity = 0;
    std::uint64_t start = 0;
    std::uint64_t length = 0;
};

inline std::uint32_t read_be(const std::vector<std::uint8_t>& b, std::size_t& pos, int n)
{
    if (pos + n > b.size()) throw std::runtime_error("truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | b[pos++];
    return v;
}

inline std::uint32_t read_vlq(const std::vector<std::uint8_t>& b, std::size_t& pos)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        if (pos >= b.size()) throw std::runtime_error("truncated vlq");
        const auto byte = b[pos++];
        v = (v << 7) | (byte & 0x7F);
        if (!(byte & 0x80)) return v;
    }
    throw std::runtime_error("vlq longer than 4 bytes");
}

inline File parse(const std::vector<std::uint8_t>& b)
{
    std::size_t pos = 0;
    if (std::string(b.begin(), b.begin() + 4) != "MThd") throw std::runtime_error("no MThd");
    pos = 4;
    if (read_be(b, pos, 4) != 6) throw std::runtime_error("bad header length");
    File f;
    f.format = static_cast<int>(read_be(b, pos, 2));
    f.tracks = static_cast<int>(read_be(b, pos, 2));
    f.division = static_cast<int>(read_be(b, pos, 2));
    if (std::string(b.begin() + pos, b.begin() + pos + 4) != "MTrk") throw std::runtime_error("no MTrk");
    pos += 4;
    const std::size_t end = pos + read_be(b, pos, 4);
    if (end != b.size()) throw std::runtime_error("track length mismatch");

    std::uint64_t tick = 0;
    std::uint8_t running = 0;
    bool ended = false;
    while (pos < end) {
        if (ended) throw std::runtime_error("data after end of track");
        tick += read_vlq(b, pos);
        Event e;
        e.tick = tick;
        std::uint8_t status = b[pos];
        if (status & 0x80) {
            ++pos;
        } else {
            if (!running) throw std::runtime_error("running status without status");
            status = running;
        }
        e.status = status;
        if (status == 0xFF) {
            e.meta_type = b[pos++];
            const auto len = read_vlq(b, pos);
            e.data.assign(b.begin() + pos, b.begin() + pos + len);
            pos += len;
            ended = e.meta_type == 0x2F;
        } else if (status == 0xF0 || status == 0xF7) {
            const auto len = read_vlq(b, pos);
            pos += len;
        } else {
            running = status;
            const int hi = status & 0xF0;
            const int n = (hi == 0xC0 || hi == 0xD0) ? 1 : 2;
            e.data.assign(b.begin() + pos, b.begin() + pos + n);
            pos += n;
        }
        f.events.push_back(std::move(e));
    }
    if (!ended) throw std::runtime_error("missing end of track");
    return f;
}

inline std::vector<std::uint8_t> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Pairs note-ons with note-offs. Throws on a dangling or unmatched event.
inline std::vector<Note> notes(const File& f)
{
    std::vector<Note> out;
    std::map<int, std::size_t> open;
    for (const auto& e : f.events) {
        const int hi = e.status & 0xF0;
        if (hi != 0x80 && hi != 0x90) continue;
        const int key = e.data[0];
        const bool on = hi == 0x90 && e.data[1] > 0;
        if (on) {
            if (open.count(key)) throw std::runtime_error("overlapping note " + std::to_string(key));
            open[key] = out.size();
            out.push_back({key, e.data[1], e.tick, 0});
        } else {
            auto it = open.find(key);
            if (it == open.end()) throw std::runtime_error("note-off without note-on");
            out[it->second].length = e.tick - out[it->second].start;
            open.erase(it);
        }
    }
    if (!open.empty()) throw std::runtime_error("dangling note-on");
    return out;
}

inline std::uint64_t end_tick(const File& f) { return f.events.empty() ? 0 : f.events.back().tick; }

/// Tempo in microseconds per quarter from the first tempo meta event.
inline std::uint32_t tempo(const File& f)
{
    for (const auto& e : f.events) {
        if (e.status == 0xFF && e.meta_type == 0x51) {
            return (std::uint32_t(e.data[0]) << 16) | (std::uint32_t(e.data[1]) << 8) | e.data[2];
        }
    }
    return 500000;
}

} // namespace smf
