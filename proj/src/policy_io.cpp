#include "hjbmc/policy_io.hpp"

#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hjbmc {

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string s;
    if (!(in_ >> s)) throw std::runtime_error("read_policy: unexpected end of input");
    return s;
  }
  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) throw std::runtime_error("read_policy: expected '" + w + "', got '" + got + "'");
  }
  double number() {
    const std::string s = word();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("read_policy: bad number '" + s + "'");
    return v;
  }
  std::size_t count() {
    const double v = number();
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw std::runtime_error("read_policy: bad count");
    }
    return static_cast<std::size_t>(v);
  }
  std::vector<double> numbers(std::size_t n) {
    std::vector<double> v(n);
    for (double& e : v) e = number();
    return v;
  }

 private:
  std::istream& in_;
};

template <typename Seq>
void put(std::ostream& out, const Seq& v) {
  for (double e : v) out << ' ' << e;
}

}  // namespace

void write_policy(std::ostream& out, const PolicyTable& p) {
  const auto old_precision = out.precision(17);
  out << "hjbmc-policy 1\n";
  out << "problem " << p.problem_name << '\n';
  out << "basis " << p.basis.name << ' ' << to_string(p.basis.control_structure) << ' ' << p.basis.count() << '\n';
  out << "controls " << p.controls.dim();
  put(out, p.controls.lower());
  put(out, p.controls.upper());
  out << "\ninitial " << p.initial_state.size();
  put(out, p.initial_state);
  out << "\ntruncation " << p.truncation.r_x.size();
  put(out, p.truncation.r_x);
  out << ' ' << p.truncation.r_w << ' ' << p.truncation.c_y << ' ' << p.truncation.c_z_scale;
  out << "\nknots " << p.grid.knots().size();
  put(out, p.grid.knots());
  out << '\n';
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const PolicyStep& s = p.steps[i];
    out << "step " << i << " y";
    put(out, s.y_coef);
    out << " z " << s.z_coef.size();
    for (const auto& c : s.z_coef) put(out, c);
    out << '\n';
  }
  out.precision(old_precision);
}

PolicyTable read_policy(std::istream& in, const BasisResolver& resolve) {
  Reader r(in);
  r.expect("hjbmc-policy");
  r.expect("1");
  PolicyTable p;
  r.expect("problem");
  p.problem_name = r.word();
  r.expect("basis");
  const std::string name = r.word();
  const ControlStructure strategy = control_structure_from_string(r.word());
  const std::size_t count = r.count();
  p.basis = resolve(name);
  if (p.basis.name != name || p.basis.control_structure != strategy || p.basis.count() != count) {
    throw std::runtime_error("read_policy: resolved basis does not match '" + name + "'");
  }
  r.expect("controls");
  const std::size_t q = r.count();
  auto lo = r.numbers(q);
  auto hi = r.numbers(q);
  p.controls = ControlBox(std::move(lo), std::move(hi));
  r.expect("initial");
  p.initial_state = r.numbers(r.count());
  r.expect("truncation");
  p.truncation.r_x = r.numbers(r.count());
  p.truncation.r_w = r.number();
  p.truncation.c_y = r.number();
  p.truncation.c_z_scale = r.number();
  r.expect("knots");
  p.grid = TimeGrid(r.numbers(r.count()));
  p.steps.resize(p.grid.steps());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    r.expect("step");
    if (r.count() != i) throw std::runtime_error("read_policy: steps out of order");
    r.expect("y");
    const auto y = r.numbers(count);
    p.steps[i].y_coef = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(count));
    r.expect("z");
    const std::size_t nz = r.count();
    for (std::size_t k = 0; k < nz; ++k) {
      const auto zc = r.numbers(count);
      p.steps[i].z_coef.emplace_back(Eigen::Map<const Eigen::VectorXd>(zc.data(), static_cast<Eigen::Index>(count)));
    }
  }
  return p;
}

}  // namespace hjbmc
