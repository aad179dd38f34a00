#include "lm/value.hpp"

#include <bit>
#include <charconv>
#include <cstdio>

namespace lm {

namespace {

bool float_identical(double a, double b) {
    return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

std::string float_to_string(double f) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), f);
    std::string s(buf, ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace

bool Value::operator==(const Value& other) const {
    if (storage_.index() != other.storage_.index()) return false;
    switch (storage_.index()) {
        case 0: return as_node() == other.as_node();
        case 1: return as_int() == other.as_int();
        case 2: return float_identical(as_float(), other.as_float());
        case 3: return as_bool() == other.as_bool();
        case 4: return as_string() == other.as_string();
        case 5: return as_list() == other.as_list();
        case 6: {
            const auto& a = as_pair();
            const auto& b = other.as_pair();
            return a.first == b.first && a.second == b.second;
        }
    }
    return false;
}

bool Value::operator<(const Value& other) const {
    if (storage_.index() != other.storage_.index())
        return storage_.index() < other.storage_.index();
    switch (storage_.index()) {
        case 0: return as_node() < other.as_node();
        case 1: return as_int() < other.as_int();
        case 2: {
            if (float_identical(as_float(), other.as_float())) return false;
            double a = as_float(), b = other.as_float();
            if (a != b) return a < b;
            return std::bit_cast<uint64_t>(a) < std::bit_cast<uint64_t>(b);
        }
        case 3: return as_bool() < other.as_bool();
        case 4: return as_string() < other.as_string();
        case 5: {
            const auto& a = as_list();
            const auto& b = other.as_list();
            return std::lexicographical_compare(
                a.begin(), a.end(), b.begin(), b.end(),
                [](const Value& x, const Value& y) { return x < y; });
        }
        case 6: {
            const auto& a = as_pair();
            const auto& b = other.as_pair();
            if (!(a.first == b.first)) return a.first < b.first;
            return a.second < b.second;
        }
    }
    return false;
}

std::string Value::to_string() const {
    switch (storage_.index()) {
        case 0: return "@" + std::to_string(as_node().id);
        case 1: return std::to_string(as_int());
        case 2: return float_to_string(as_float());
        case 3: return as_bool() ? "true" : "false";
        case 4: return "'" + as_string() + "'";
        case 5: {
            std::string s = "[";
            const auto& xs = as_list();
            for (size_t i = 0; i < xs.size(); ++i) {
                if (i) s += ", ";
                s += xs[i].to_string();
            }
            return s + "]";
        }
        case 6:
            return "(" + as_pair().first.to_string() + ", " + as_pair().second.to_string() + ")";
    }
    return "?";
}

}  // namespace lm
