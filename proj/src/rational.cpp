#include "vwak/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace vwak {

namespace {

bool is_integer_text(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    return true;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    text = trim(text);
    const auto slash = text.find('/');
    const auto num_text = trim(text.substr(0, slash));
    const auto den_text = slash == std::string_view::npos ? std::string_view{"1"} : trim(text.substr(slash + 1));
    if (!is_integer_text(num_text) || !is_integer_text(den_text)) {
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    const auto strip_plus = [](std::string_view s) { return s[0] == '+' ? s.substr(1) : s; };
    Integer num(std::string(strip_plus(num_text)));
    Integer den(std::string(strip_plus(den_text)));
    if (den == 0) {
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& value)
{
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Integer floor(const Rational& value)
{
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

Integer ceil(const Rational& value)
{
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

Rational pow2(long e)
{
    Integer p = 1;
    const auto shift = static_cast<mp_bitcnt_t>(e < 0 ? -e : e);
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), shift);
    Rational out = e < 0 ? Rational(Integer(1), p) : Rational(p);
    out.canonicalize();
    return out;
}

double to_double(const Rational& value)
{
    return value.get_d();
}

double lower_double(const Rational& value)
{
    double d = value.get_d();
    while (Rational(d) > value) {
        d = std::nextafter(d, -INFINITY);
    }
    return d;
}

double upper_double(const Rational& value)
{
    double d = value.get_d();
    while (Rational(d) < value) {
        d = std::nextafter(d, INFINITY);
    }
    return d;
}

double log2_of(const Rational& value)
{
    if (value <= 0) {
        throw std::invalid_argument("log2_of: value must be positive");
    }
    long num_exp = 0;
    long den_exp = 0;
    const double num = mpz_get_d_2exp(&num_exp, value.get_num_mpz_t());
    const double den = mpz_get_d_2exp(&den_exp, value.get_den_mpz_t());
    return std::log2(num) - std::log2(den) + static_cast<double>(num_exp - den_exp);
}

Bracket inverse_power(const Integer& base, const Rational& exponent)
{
    if (base < 1) {
        throw std::invalid_argument("inverse_power: base must be >= 1");
    }
    if (exponent < 0) {
        throw std::invalid_argument("inverse_power: exponent must be >= 0");
    }
    if (base == 1 || exponent == 0) {
        return {Rational(1), Rational(1)};
    }
    const Integer& a = exponent.get_num();
    const Integer& b = exponent.get_den();
    if (!a.fits_ulong_p() || !b.fits_ulong_p()) {
        throw std::invalid_argument("inverse_power: exponent too large");
    }
    const unsigned long a_ul = a.get_ui();
    const unsigned long b_ul = b.get_ui();

    // Choose P so that Y = floor(2^P * base^(-a/b)) carries at least ~70 bits.
    const double log2_value = exponent.get_d() * static_cast<double>(mpz_sizeinbase(base.get_mpz_t(), 2));
    const auto precision = static_cast<unsigned long>(72.0 + std::ceil(log2_value));

    Integer numerator = 1;
    mpz_mul_2exp(numerator.get_mpz_t(), numerator.get_mpz_t(), precision * b_ul);
    Integer denominator;
    mpz_pow_ui(denominator.get_mpz_t(), base.get_mpz_t(), a_ul);

    Integer quotient;
    mpz_fdiv_q(quotient.get_mpz_t(), numerator.get_mpz_t(), denominator.get_mpz_t());
    Integer root;
    mpz_root(root.get_mpz_t(), quotient.get_mpz_t(), b_ul);

    Integer check;
    mpz_pow_ui(check.get_mpz_t(), root.get_mpz_t(), b_ul);
    check *= denominator;

    Integer scale = 1;
    mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), precision);

    Rational lo(root, scale);
    lo.canonicalize();
    if (check == numerator) {
        return {lo, lo};
    }
    Rational hi(Integer(root + 1), scale);
    hi.canonicalize();
    return {lo, hi};
}

Bracket inverse_power_of_two(const Rational& exponent)
{
    if (exponent >= 0) {
        return inverse_power(Integer(2), exponent);
    }
    const Bracket inv = inverse_power(Integer(2), Rational(-exponent));
    Rational lo = 1 / inv.hi;
    Rational hi = 1 / inv.lo;
    return {lo, hi};
}

} // namespace vwak
