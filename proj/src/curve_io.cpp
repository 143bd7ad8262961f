#include "msrelax/curve_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "msrelax/error.hpp"

namespace msrelax::curve_io {

void write(std::ostream& out, const geometry::RadialCurve& curve) {
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  out << "msrc v1 " << curve.modes() << ' ' << curve.R << ' ';
  if (curve.domain.is_torus())
    out << "torus " << curve.domain.L << ' ';
  else
    out << "plane ";
  out << curve.pole.x() << ' ' << curve.pole.y() << '\n';
  for (int k = 0; k < curve.modes(); ++k) out << curve.rho_hat.a[k] << ' ' << curve.rho_hat.b[k] << '\n';
  out.flags(old_flags);
  out.precision(old_prec);
}

geometry::RadialCurve read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty curve stream");
  std::istringstream header(line);
  std::string magic;
  std::string version;
  std::string domain;
  int n = 0;
  geometry::RadialCurve curve;
  header >> magic >> version >> n >> curve.R >> domain;
  if (!header || magic != "msrc" || version != "v1") throw Error(ErrorKind::IoError, "bad curve header: " + line);
  if (domain == "torus") {
    double L = 0.0;
    header >> L;
    curve.domain = geometry::Domain::torus(L);
  } else if (domain != "plane") {
    throw Error(ErrorKind::IoError, "unknown domain tag: " + domain);
  }
  double px = 0.0;
  double py = 0.0;
  header >> px >> py;
  if (!header) throw Error(ErrorKind::IoError, "bad curve header: " + line);
  curve.pole = geometry::Vec2(px, py);
  if (n <= 0) throw Error(ErrorKind::IoError, "non-positive mode count");
  curve.rho_hat = spectral::RealSeries(n);
  for (int k = 0; k < n; ++k) {
    if (!(in >> curve.rho_hat.a[k] >> curve.rho_hat.b[k]))
      throw Error(ErrorKind::IoError, "truncated coefficient list at mode " + std::to_string(k));
  }
  curve.validate();
  return curve;
}

void save(const std::string& path, const geometry::RadialCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  write(out, curve);
}

geometry::RadialCurve load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return read(in);
}

}  // namespace msrelax::curve_io
