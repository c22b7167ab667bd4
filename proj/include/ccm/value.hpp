#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ccm {

using BigInt = boost::multiprecision::cpp_int;

/// Position of a value inside the range of its variable.
using ValueIndex = std::uint32_t;

/// An element of a variable range: an exact integer or a symbolic constant.
/// Values order by kind first (integers before symbols), then by content.
class Value {
public:
    Value() : repr_(BigInt(0)) {}

    template <std::integral T>
        requires(!std::same_as<T, bool>)
    Value(T v) : repr_(BigInt(v)) {}  // NOLINT(google-explicit-constructor)

    static Value integer(BigInt v) { return Value(Repr(std::move(v))); }
    static Value symbol(std::string name) { return Value(Repr(std::move(name))); }

    [[nodiscard]] bool is_integer() const { return repr_.index() == 0; }
    [[nodiscard]] bool is_symbol() const { return repr_.index() == 1; }

    [[nodiscard]] const BigInt& as_integer() const { return std::get<0>(repr_); }
    [[nodiscard]] const std::string& as_symbol() const { return std::get<1>(repr_); }

    /// Integer payload if it fits in 64 bits.
    [[nodiscard]] std::optional<std::int64_t> as_int64() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Value& a, const Value& b) { return a.repr_ == b.repr_; }
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    using Repr = std::variant<BigInt, std::string>;
    explicit Value(Repr r) : repr_(std::move(r)) {}
    Repr repr_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

/// Finite set of values in declaration order.
class Range {
public:
    Range() = default;
    explicit Range(std::vector<Value> values);

    /// Inclusive integer interval lo..hi (empty when hi < lo).
    static Range interval(const BigInt& lo, const BigInt& hi);

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] const Value& at(ValueIndex i) const { return values_.at(i); }
    [[nodiscard]] const std::vector<Value>& values() const { return values_; }

    [[nodiscard]] std::optional<ValueIndex> index_of(const Value& v) const;
    [[nodiscard]] bool contains(const Value& v) const { return index_of(v).has_value(); }

    /// First duplicated value, if any.
    [[nodiscard]] std::optional<Value> duplicate() const;

    [[nodiscard]] bool all_integers() const;
    [[nodiscard]] bool all_symbols() const;
    /// True when the range is an ascending run of consecutive integers.
    [[nodiscard]] bool is_interval() const { return interval_lo_.has_value(); }

    friend bool operator==(const Range& a, const Range& b) { return a.values_ == b.values_; }

private:
    std::vector<Value> values_;
    std::optional<std::int64_t> interval_lo_;
};

}  // namespace ccm
