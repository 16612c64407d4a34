// Minimal CSV row writer with shortest round-trip number formatting, so
// identical inputs give byte-identical files.
#pragma once

#include <charconv>
#include <concepts>
#include <ostream>
#include <string>
#include <string_view>

namespace anoma {

inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        (write_field(fields, first), ...);
        out_.put('\n');
    }

private:
    void sep(bool& first) {
        if (!first) out_.put(',');
        first = false;
    }
    void write_field(std::string_view s, bool& first) {
        sep(first);
        out_ << s;
    }
    void write_field(const char* s, bool& first) { write_field(std::string_view(s), first); }
    void write_field(const std::string& s, bool& first) { write_field(std::string_view(s), first); }
    void write_field(double v, bool& first) {
        sep(first);
        out_ << format_number(v);
    }
    template <std::integral I>
    void write_field(I v, bool& first) {
        sep(first);
        out_ << v;
    }

    std::ostream& out_;
};

}  // namespace anoma
