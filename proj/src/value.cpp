#include "ccm/value.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>

namespace ccm {

std::optional<std::int64_t> Value::as_int64() const {
    if (!is_integer()) return std::nullopt;
    const BigInt& v = as_integer();
    if (v < std::numeric_limits<std::int64_t>::min() || v > std::numeric_limits<std::int64_t>::max()) {
        return std::nullopt;
    }
    return static_cast<std::int64_t>(v);
}

std::string Value::to_string() const {
    if (is_integer()) return as_integer().str();
    return as_symbol();
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.repr_.index() != b.repr_.index()) return a.repr_.index() <=> b.repr_.index();
    if (a.is_integer()) {
        const int c = a.as_integer().compare(b.as_integer());
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    return a.as_symbol() <=> b.as_symbol();
}

std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.to_string(); }

Range::Range(std::vector<Value> values) : values_(std::move(values)) {
    if (values_.empty() || !values_.front().is_integer()) return;
    auto lo = values_.front().as_int64();
    if (!lo) return;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        auto v = values_[i].as_int64();
        if (!v || *v != *lo + static_cast<std::int64_t>(i)) return;
    }
    interval_lo_ = lo;
}

Range Range::interval(const BigInt& lo, const BigInt& hi) {
    std::vector<Value> values;
    for (BigInt v = lo; v <= hi; ++v) values.push_back(Value::integer(v));
    return Range(std::move(values));
}

std::optional<ValueIndex> Range::index_of(const Value& v) const {
    if (interval_lo_) {
        auto x = v.as_int64();
        if (!x) return std::nullopt;
        // Offsets are compared in unsigned space so a huge gap cannot wrap.
        const auto off = static_cast<std::uint64_t>(*x) - static_cast<std::uint64_t>(*interval_lo_);
        if (*x < *interval_lo_ || off >= values_.size()) return std::nullopt;
        return static_cast<ValueIndex>(off);
    }
    auto it = std::find(values_.begin(), values_.end(), v);
    if (it == values_.end()) return std::nullopt;
    return static_cast<ValueIndex>(it - values_.begin());
}

std::optional<Value> Range::duplicate() const {
    std::set<Value> seen;
    for (const auto& v : values_) {
        if (!seen.insert(v).second) return v;
    }
    return std::nullopt;
}

bool Range::all_integers() const {
    return std::all_of(values_.begin(), values_.end(), [](const Value& v) { return v.is_integer(); });
}

bool Range::all_symbols() const {
    return std::all_of(values_.begin(), values_.end(), [](const Value& v) { return v.is_symbol(); });
}

}  // namespace ccm
