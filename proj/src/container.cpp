#include "playgen/container.hpp"

#include <cstring>
#include <fstream>

#include "playgen/core.hpp"

namespace playgen {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'B', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        write_u64(out, bits);
    }
}

void read_doubles(std::istream& in, std::vector<double>& v) {
    for (double& d : v) {
        const std::uint64_t bits = read_u64(in);
        std::memcpy(&d, &bits, 8);
    }
}

}  // namespace

std::int64_t ArrayBlob::element_count() const {
    std::int64_t n = 1;
    for (std::int64_t s : shape) {
        n *= s;
    }
    return n;
}

const ArrayBlob& Container::array(const std::string& name) const {
    for (const auto& a : arrays) {
        if (a.name == name) {
            return a;
        }
    }
    throw DataError("container is missing array '" + name + "'");
}

bool Container::has_array(const std::string& name) const {
    for (const auto& a : arrays) {
        if (a.name == name) {
            return true;
        }
    }
    return false;
}

void save_container(const std::string& path, const Container& c) {
    nlohmann::json header = c.header;
    nlohmann::json array_index = nlohmann::json::array();
    for (const auto& a : c.arrays) {
        if (a.element_count() != static_cast<std::int64_t>(a.data.size())) {
            throw DataError("array '" + a.name + "' shape does not match data size");
        }
        array_index.push_back({{"name", a.name}, {"shape", a.shape}});
    }
    header["__arrays__"] = array_index;
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open container for writing: " + path);
    }
    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u64(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& a : c.arrays) {
        write_doubles(out, a.data);
    }
    if (!out) {
        throw DataError("write failure on container: " + path);
    }
}

Container load_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open container: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError("bad container magic in " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw DataError("unsupported container version in " + path);
    }
    const std::uint64_t header_len = read_u64(in);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) {
        throw DataError("truncated container header in " + path);
    }

    Container c;
    nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
    if (header.is_discarded()) {
        throw DataError("corrupt container header in " + path);
    }
    const auto array_index = header.at("__arrays__");
    header.erase("__arrays__");
    c.header = std::move(header);

    for (const auto& entry : array_index) {
        ArrayBlob blob;
        blob.name = entry.at("name").get<std::string>();
        blob.shape = entry.at("shape").get<std::vector<std::int64_t>>();
        blob.data.resize(static_cast<std::size_t>(blob.element_count()));
        read_doubles(in, blob.data);
        if (!in) {
            throw DataError("truncated array '" + blob.name + "' in " + path);
        }
        c.arrays.push_back(std::move(blob));
    }
    return c;
}

}  // namespace playgen
