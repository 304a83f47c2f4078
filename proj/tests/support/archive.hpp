#pragma once

// Test-side ZIP handling, written separately from the library's reader and
// writer so fixtures and report checks do not share code with what they
// test. Stored entries only on the writing side; the reader walks local
// headers and inflates with zlib.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fixture {

std::uint32_t crc32(std::string_view data);

class StoredZip {
public:
    void add(std::string name, std::string data);
    std::string bytes() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Name -> contents, from local file headers. Throws std::runtime_error.
std::map<std::string, std::string> read_zip(std::string_view archive);

}  // namespace fixture
