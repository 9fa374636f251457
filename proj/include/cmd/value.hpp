#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "cmd/error.hpp"

namespace cmd {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
// Strict full-string parse; throws ParseError.
double parse_double(std::string_view text);

// A cell value: either a finite number or a non-empty byte string.
class Value {
  public:
    static Value num(double v) {
        if (!(v == v) || v == __builtin_inf() || v == -__builtin_inf())
            throw InvalidValue("numeric value must be finite");
        return Value(v);
    }
    static Value str(std::string s) {
        if (s.empty())
            throw InvalidValue("string value must be non-empty");
        return Value(std::move(s));
    }

    bool is_num() const { return v_.index() == 0; }
    bool is_str() const { return v_.index() == 1; }

    double num_value() const {
        if (!is_num())
            throw TypeMismatch("value is not numeric");
        return std::get<0>(v_);
    }
    const std::string& str_value() const {
        if (!is_str())
            throw TypeMismatch("value is not a string");
        return std::get<1>(v_);
    }

    // Presence semantics: strings participate in products as 1.0.
    double as_number() const { return is_num() ? std::get<0>(v_) : 1.0; }

    // Tagged text form, "n:<decimal>" or "s:<bytes>". No escaping.
    std::string text() const;
    static Value from_text(std::string_view t);

    bool operator==(const Value& o) const = default;

  private:
    explicit Value(double v) : v_(v) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    std::variant<double, std::string> v_;
};

} // namespace cmd
