#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace evfcr {

// Minimal CSV support: comma separated, optional double quoting, no
// embedded newlines. Enough for the trip/price/artifact formats.
std::vector<std::string> split_csv_line(const std::string& line);

class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Returns false at end of input. Skips blank lines.
    bool next(std::vector<std::string>& fields);
    std::size_t line_number() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

// Header-aware column lookup: index of `name`, or nullopt.
std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        const std::string& name);

// Shortest round-trip decimal representation (std::to_chars), so CSV
// artifacts are byte-stable across runs.
std::string fmt_double(double v);

}  // namespace evfcr
