#include "cmd/value.hpp"

#include <charconv>

namespace cmd {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("bad numeric literal: '" + std::string(text) + "'");
    return v;
}

std::string Value::text() const {
    if (is_num())
        return "n:" + format_double(std::get<0>(v_));
    return "s:" + std::get<1>(v_);
}

Value Value::from_text(std::string_view t) {
    if (t.size() >= 2 && t[1] == ':') {
        if (t[0] == 'n')
            return Value::num(parse_double(t.substr(2)));
        if (t[0] == 's')
            return Value::str(std::string(t.substr(2)));
    }
    throw ParseError("bad value field: '" + std::string(t) + "'");
}

} // namespace cmd
