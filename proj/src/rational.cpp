#include "ldq/rational.hpp"

#include <cctype>

namespace ldq {

namespace {

BigInt pow10(unsigned long exponent) {
  BigInt result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::string_view body = text.substr(pos);
  std::string_view mantissa = body;
  long long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = body.substr(0, e);
    std::string_view exp_text = body.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
      exp_negative = exp_text[0] == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
    exponent = std::stoll(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = mantissa;
  std::string_view frac_part;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) return std::nullopt;
    if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;
  }
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (int_part.empty() && frac_part.empty()) return std::nullopt;

  std::string digits = std::string(int_part) + std::string(frac_part);
  BigInt numerator(digits.empty() ? std::string("0") : digits, 10);
  long long scale = static_cast<long long>(frac_part.size()) - exponent;
  Rational result;
  if (scale >= 0) {
    result = Rational(numerator, pow10(static_cast<unsigned long>(scale)));
  } else {
    result = Rational(numerator * pow10(static_cast<unsigned long>(-scale)));
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

BigInt round_half_even(const Rational& value) {
  BigInt floor_value;
  mpz_fdiv_q(floor_value.get_mpz_t(), value.get_num_mpz_t(),
             value.get_den_mpz_t());
  Rational remainder = value - Rational(floor_value);
  Rational half(1, 2);
  int cmp = ::cmp(remainder, half);
  if (cmp > 0) return floor_value + 1;
  if (cmp < 0) return floor_value;
  return mpz_even_p(floor_value.get_mpz_t()) ? floor_value : floor_value + 1;
}

std::string format_fixed(const Rational& value, int fraction_digits) {
  BigInt scale = pow10(static_cast<unsigned long>(fraction_digits));
  BigInt scaled = round_half_even(value * Rational(scale));
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (fraction_digits > 0) {
    if (digits.size() <= static_cast<std::size_t>(fraction_digits))
      digits.insert(0, fraction_digits + 1 - digits.size(), '0');
    digits.insert(digits.size() - fraction_digits, ".");
  }
  if (negative && scaled != 0) digits.insert(0, "-");
  return digits;
}

std::string format_decimal(const Rational& value, int max_fraction_digits) {
  std::string fixed = format_fixed(value, max_fraction_digits);
  if (auto dot = fixed.find('.'); dot != std::string::npos) {
    std::size_t end = fixed.find_last_not_of('0');
    if (end == dot) {
      fixed.erase(dot);
    } else {
      fixed.erase(end + 1);
    }
  }
  if (fixed == "-0") fixed = "0";
  return fixed;
}

std::string to_fraction_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

}  // namespace ldq
