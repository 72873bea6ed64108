#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace playgen {

// Versioned on-disk container: a JSON header followed by named float64
// arrays, written little-endian. Round-trips load -> save -> load
// bit-identically because the header is re-serialized with sorted keys and
// shortest round-trip number formatting.
struct ArrayBlob {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<double> data;

    std::int64_t element_count() const;
};

struct Container {
    nlohmann::json header;
    std::vector<ArrayBlob> arrays;

    const ArrayBlob& array(const std::string& name) const;
    bool has_array(const std::string& name) const;
};

void save_container(const std::string& path, const Container& c);
Container load_container(const std::string& path);

}  // namespace playgen
