#include "kairosis/timestamp.hpp"

#include <cctype>
#include <cstdio>

#include "kairosis/error.hpp"

namespace kairosis {

namespace {

class Cursor {
public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ == text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  int digits(int count) {
    int value = 0;
    for (int i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected digit");
      }
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  void expect(char c) {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError,
                "invalid timestamp '" + std::string(text_) + "': " + why);
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Instant parse_instant(std::string_view text) {
  using namespace std::chrono;
  Cursor in(text);

  const int y = in.digits(4);
  in.expect('-');
  const int mo = in.digits(2);
  in.expect('-');
  const int d = in.digits(2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    in.fail("no such calendar date");
  }

  int hh = 0, mm = 0, ss = 0;
  if (in.accept('T') || in.accept(' ')) {
    hh = in.digits(2);
    in.expect(':');
    mm = in.digits(2);
    if (in.accept(':')) {
      ss = in.digits(2);
      if (in.accept('.')) {
        if (!std::isdigit(static_cast<unsigned char>(in.peek()))) {
          in.fail("empty fraction");
        }
        while (std::isdigit(static_cast<unsigned char>(in.peek()))) {
          in.digits(1);
        }
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) {
      in.fail("time of day out of range");
    }
  }

  seconds offset{0};
  if (in.accept('Z')) {
  } else if (in.peek() == '+' || in.peek() == '-') {
    const int sign = in.peek() == '+' ? 1 : -1;
    in.accept(in.peek());
    const int oh = in.digits(2);
    in.accept(':');
    const int om = in.digits(2);
    if (oh > 23 || om > 59) {
      in.fail("offset out of range");
    }
    offset = seconds{sign * (oh * 3600 + om * 60)};
  }
  if (!in.done()) {
    in.fail("trailing characters");
  }

  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_instant(Instant t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<seconds> tod{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace kairosis
