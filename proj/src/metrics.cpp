#include "ddff/metrics.hpp"

#include <charconv>
#include <sstream>

namespace ddff {
namespace {

// shortest text that parses back to the same double
std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  os << "mse=" << fmt(mse) << '\n'
     << "rms=" << fmt(rms) << '\n'
     << "log_rms=" << fmt(log_rms) << '\n'
     << "abs_rel=" << fmt(abs_rel) << '\n'
     << "sqr_rel=" << fmt(sqr_rel) << '\n'
     << "accuracy_d1=" << fmt(accuracy_d1) << '\n'
     << "accuracy_d2=" << fmt(accuracy_d2) << '\n'
     << "accuracy_d3=" << fmt(accuracy_d3) << '\n';
  for (const auto& [tau, v] : badpix) os << "badpix@" << fmt(tau) << '=' << fmt(v) << '\n';
  os << "bumpiness=" << fmt(bumpiness) << '\n'
     << "valid_pixel_count=" << valid_pixel_count << '\n'
     << "clamped_pixel_count=" << clamped_pixel_count << '\n'
     << "empty=" << (empty ? 1 : 0) << '\n';
  return os.str();
}

MetricsReport MetricsReport::from_text(const std::string& text) {
  MetricsReport r;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "mse") r.mse = std::stod(val);
    else if (key == "rms") r.rms = std::stod(val);
    else if (key == "log_rms") r.log_rms = std::stod(val);
    else if (key == "abs_rel") r.abs_rel = std::stod(val);
    else if (key == "sqr_rel") r.sqr_rel = std::stod(val);
    else if (key == "accuracy_d1") r.accuracy_d1 = std::stod(val);
    else if (key == "accuracy_d2") r.accuracy_d2 = std::stod(val);
    else if (key == "accuracy_d3") r.accuracy_d3 = std::stod(val);
    else if (key.rfind("badpix@", 0) == 0) r.badpix[std::stod(key.substr(7))] = std::stod(val);
    else if (key == "bumpiness") r.bumpiness = std::stod(val);
    else if (key == "valid_pixel_count") r.valid_pixel_count = std::stoll(val);
    else if (key == "clamped_pixel_count") r.clamped_pixel_count = std::stoll(val);
    else if (key == "empty") r.empty = val == "1";
  }
  return r;
}

bool operator==(const MetricsReport& a, const MetricsReport& b) {
  return a.mse == b.mse && a.rms == b.rms && a.log_rms == b.log_rms && a.abs_rel == b.abs_rel &&
         a.sqr_rel == b.sqr_rel && a.accuracy_d1 == b.accuracy_d1 && a.accuracy_d2 == b.accuracy_d2 &&
         a.accuracy_d3 == b.accuracy_d3 && a.badpix == b.badpix && a.bumpiness == b.bumpiness &&
         a.valid_pixel_count == b.valid_pixel_count && a.clamped_pixel_count == b.clamped_pixel_count &&
         a.empty == b.empty;
}

MetricsReport aggregate(std::span<const MetricsReport> reports) {
  MetricsReport out;
  double n = 0.0;
  for (const auto& r : reports) {
    if (r.empty) continue;
    n += 1.0;
    out.mse += r.mse;
    out.rms += r.rms;
    out.log_rms += r.log_rms;
    out.abs_rel += r.abs_rel;
    out.sqr_rel += r.sqr_rel;
    out.accuracy_d1 += r.accuracy_d1;
    out.accuracy_d2 += r.accuracy_d2;
    out.accuracy_d3 += r.accuracy_d3;
    for (const auto& [tau, v] : r.badpix) out.badpix[tau] += v;
    out.bumpiness += r.bumpiness;
    out.valid_pixel_count += r.valid_pixel_count;
    out.clamped_pixel_count += r.clamped_pixel_count;
  }
  if (n == 0.0) return out;
  out.empty = false;
  out.mse /= n;
  out.rms /= n;
  out.log_rms /= n;
  out.abs_rel /= n;
  out.sqr_rel /= n;
  out.accuracy_d1 /= n;
  out.accuracy_d2 /= n;
  out.accuracy_d3 /= n;
  for (auto& [tau, v] : out.badpix) v /= n;
  out.bumpiness /= n;
  return out;
}

}  // namespace ddff
