#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/spectral_noise.hpp"

namespace roughpam {

double TestFunction::operator()(double s, double x) const {
    if (s < t_begin || s >= t_end) return 0.0;
    const double z = (x - center) / width;
    return scale * std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * kPi));
}

std::complex<double> TestFunction::fourier(double xi) const {
    return scale * std::exp(-0.5 * width * width * xi * xi) * std::polar(1.0, -xi * center);
}

std::vector<TestFunction> parse_catalog(std::istream& in) {
    std::vector<TestFunction> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        TestFunction f;
        if (!(ss >> f.name)) continue;
        if (!(ss >> f.center >> f.width >> f.t_begin >> f.t_end)) {
            throw ConfigError("catalog line " + std::to_string(line_no) + ": expected 'name center width t_begin t_end'");
        }
        if (!(f.width > 0.0) || !(f.t_end > f.t_begin) || f.t_begin < 0.0) {
            throw ConfigError("catalog line " + std::to_string(line_no) + ": need width > 0 and 0 <= t_begin < t_end");
        }
        out.push_back(f);
    }
    return out;
}

std::vector<TestFunction> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalog " + path);
    return parse_catalog(in);
}

std::vector<TestFunction> default_catalog() {
    static const char* text =
        "unit       0.0  1.0  0.0  1.0\n"
        "shifted    3.0  1.0  0.0  1.0\n"
        "wide       0.0  2.0  0.0  1.0\n"
        "wider     -2.0  3.0  0.0  0.5\n"
        "late       0.0  1.0  0.5  1.5\n"
        "short      1.0  1.25 0.25 0.5\n"
        "long      -1.0  1.5  0.0  2.0\n"
        "offset     5.0  1.0  1.0  2.0\n"
        "narrowish  0.0  1.0  0.0  0.25\n"
        "broad      2.5  2.5  0.25 1.25\n";
    std::istringstream in(text);
    return parse_catalog(in);
}

double inner_product_H(const TestFunction& phi, const TestFunction& psi, const HurstParam& h, double tol) {
    const double overlap = std::max(0.0, std::min(phi.t_end, psi.t_end) - std::max(phi.t_begin, psi.t_begin));
    if (overlap == 0.0 || phi.scale == 0.0 || psi.scale == 0.0) return 0.0;
    // int e^{-s xi^2} cos(xi d) |xi|^a dxi with s = (w1^2 + w2^2)/2 equals
    // 2 pi s^{h-1} F(d / sqrt(s)), F the mollified profile.
    const double s = 0.5 * (phi.width * phi.width + psi.width * psi.width);
    const double d = phi.center - psi.center;
    const double pref = c1h(h) * overlap * phi.scale * psi.scale * 2.0 * kPi * std::pow(s, h.value() - 1.0);
    return pref * mollified_profile(d / std::sqrt(s), h, tol / std::abs(pref));
}

}  // namespace roughpam
