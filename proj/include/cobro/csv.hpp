#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "cobro/errors.hpp"

namespace cobro {

// RFC-4180 CSV writer: CRLF record separators, quoting only where required.
// Numeric cells are rendered with 10 significant digits in scientific
// notation so files are byte-reproducible across runs.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void row(const std::vector<std::string>& cells);

    // 10 significant digits; non-finite values become an empty cell (gap).
    static std::string num(double v);
    static std::string integer(long long v);

private:
    std::ofstream out_;
};

} // namespace cobro
