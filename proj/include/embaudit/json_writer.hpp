#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace embaudit {

// Streaming JSON emitter with caller-controlled key order. Reals are written
// with 17 significant digits ("%.17g"), non-finite reals as null, so equal
// inputs always produce equal bytes.
class JsonWriter {
public:
    explicit JsonWriter(int indent = 2) : indent_(indent) {}

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view name);

    JsonWriter& value(std::string_view text);
    JsonWriter& value(const char* text) { return value(std::string_view(text)); }
    JsonWriter& value(double number);
    JsonWriter& value(std::size_t number);
    JsonWriter& value(bool flag);
    JsonWriter& null();

    template <class T>
    JsonWriter& field(std::string_view name, const T& v) {
        key(name);
        return value(v);
    }

    const std::string& str() const noexcept { return out_; }

private:
    void before_value();
    void newline();
    void write_string(std::string_view text);

    struct Level {
        bool array = false;
        bool empty = true;
    };

    std::string out_;
    std::vector<Level> stack_;
    int indent_;
    bool after_key_ = false;
};

std::string format_g17(double number);

}  // namespace embaudit
