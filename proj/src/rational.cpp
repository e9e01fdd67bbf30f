#include "tracelab/rational.hpp"

#include "tracelab/error.hpp"

#include <cctype>
#include <cstdlib>

namespace tracelab {

std::uint64_t guard_from_env() {
    const char* raw = std::getenv("TRACELAB_GUARD");
    if (raw == nullptr || *raw == '\0') return kDefaultGuard;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0' || value == 0) {
        throw InvalidArgument("TRACELAB_GUARD must be a positive integer, got '" + std::string(raw) + "'");
    }
    return value;
}

Rational make_rational(long num, long den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
        negative = true;
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
    if (!all_digits(num) || (slash != std::string_view::npos && !all_digits(den))) {
        throw ParseError("malformed rational '" + std::string(text) + "'", std::string{});
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(1);
    if (slash != std::string_view::npos) {
        d = mpz_class(std::string(den), 10);
        if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'", std::string{});
    }
    if (negative) n = -n;
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

double to_double(const Rational& r) { return r.get_d(); }

} // namespace tracelab
