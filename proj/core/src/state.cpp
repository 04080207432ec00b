#include "cmqm/state.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cmqm {

ResolutionParams::ResolutionParams(unsigned mu_, double kappa_,
                                   double entropy_floor_)
    : mu(mu_), kappa(kappa_), entropy_floor(entropy_floor_) {
    if (mu == 0) {
        throw std::invalid_argument("ResolutionParams: mu must be positive");
    }
    if (!(kappa > 0.0) || kappa > 1.0) {
        throw std::invalid_argument("ResolutionParams: kappa must be in (0, 1]");
    }
    if (!(entropy_floor > 0.0)) {
        throw std::invalid_argument("ResolutionParams: entropy_floor must be positive");
    }
}

double ResolutionParams::epsilon() const {
    return std::exp2(-0.5 * static_cast<double>(mu));
}

MultipartiteState::MultipartiteState(std::vector<std::size_t> dims_,
                                     std::vector<cplx> amps)
    : dims(std::move(dims_)), amplitudes(std::move(amps)) {
    validate();
}

std::size_t MultipartiteState::dimension() const {
    std::size_t d = 1;
    for (std::size_t dk : dims) d *= dk;
    return d;
}

double MultipartiteState::norm() const {
    double n2 = 0;
    for (const cplx& a : amplitudes) n2 += std::norm(a);
    return std::sqrt(n2);
}

void MultipartiteState::validate() const {
    if (dims.empty()) {
        throw std::invalid_argument("MultipartiteState: no parties");
    }
    for (std::size_t d : dims) {
        if (d < 1) {
            throw std::invalid_argument("MultipartiteState: party dimension < 1");
        }
    }
    if (amplitudes.size() != dimension()) {
        throw std::invalid_argument(
            "MultipartiteState: amplitude count does not match product of dims");
    }
}

double norm_tolerance(const MultipartiteState& s, const ResolutionParams& res) {
    return static_cast<double>(s.dimension()) * res.epsilon();
}

void require_normalized(const MultipartiteState& s, double tol) {
    if (std::abs(s.norm() - 1.0) > tol) {
        throw std::domain_error("state is not normalized within tolerance");
    }
}

MultipartiteState make_basis_state(std::vector<std::size_t> dims,
                                   std::size_t index) {
    MultipartiteState s;
    s.dims = std::move(dims);
    s.amplitudes.assign(s.dimension(), cplx{0, 0});
    s.amplitudes.at(index) = cplx{1, 0};
    s.validate();
    return s;
}

MultipartiteState make_bell() { return make_ghz(2); }

MultipartiteState make_ghz(std::size_t parties, std::size_t level_dim) {
    if (parties < 2 || level_dim < 2) {
        throw std::invalid_argument("make_ghz: need >= 2 parties of dim >= 2");
    }
    MultipartiteState s;
    s.dims.assign(parties, level_dim);
    std::size_t dim = s.dimension();
    s.amplitudes.assign(dim, cplx{0, 0});
    // |00..0> + |11..1> + ... + |(d-1)..(d-1)>, equal weights
    double w = 1.0 / std::sqrt(static_cast<double>(level_dim));
    std::size_t stride = 0;
    {
        std::size_t step = 1;
        for (std::size_t k = 0; k < parties; ++k) {
            stride += step;
            if (k + 1 < parties) step *= level_dim;
        }
    }
    // stride = 1 + d + d^2 + ... ; index of |j,j,..,j> is j * stride
    for (std::size_t j = 0; j < level_dim; ++j) {
        s.amplitudes[j * stride] = cplx{w, 0};
    }
    return s;
}

MultipartiteState make_w(std::size_t parties) {
    if (parties < 2) {
        throw std::invalid_argument("make_w: need >= 2 parties");
    }
    MultipartiteState s;
    s.dims.assign(parties, 2);
    s.amplitudes.assign(s.dimension(), cplx{0, 0});
    double w = 1.0 / std::sqrt(static_cast<double>(parties));
    for (std::size_t k = 0; k < parties; ++k) {
        s.amplitudes[std::size_t{1} << k] = cplx{w, 0};
    }
    return s;
}

MultipartiteState make_measurement_chain(const std::vector<cplx>& coefficients,
                                         std::size_t parties) {
    if (coefficients.size() < 2 || parties < 2) {
        throw std::invalid_argument(
            "make_measurement_chain: need >= 2 coefficients and >= 2 parties");
    }
    double n2 = 0;
    for (const cplx& c : coefficients) n2 += std::norm(c);
    if (!(n2 > 0)) {
        throw std::domain_error("make_measurement_chain: all-zero coefficients");
    }
    double inv = 1.0 / std::sqrt(n2);
    std::size_t level_dim = coefficients.size();
    MultipartiteState s;
    s.dims.assign(parties, level_dim);
    s.amplitudes.assign(s.dimension(), cplx{0, 0});
    std::size_t stride = 0;
    std::size_t step = 1;
    for (std::size_t k = 0; k < parties; ++k) {
        stride += step;
        if (k + 1 < parties) step *= level_dim;
    }
    for (std::size_t j = 0; j < level_dim; ++j) {
        s.amplitudes[j * stride] = coefficients[j] * inv;
    }
    return s;
}

void write_state(std::ostream& os, const MultipartiteState& s) {
    os << "dims";
    for (std::size_t d : s.dims) os << ' ' << d;
    os << '\n';
    if (s.mu) {
        os << "mu " << *s.mu << '\n';
    } else {
        os << "mu none\n";
    }
    char buf[96];
    for (const cplx& a : s.amplitudes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a.real(), a.imag());
        os << buf;
    }
}

MultipartiteState read_state(std::istream& is) {
    MultipartiteState s;
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("state input: missing dims line");
    }
    {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key != "dims") {
            throw std::invalid_argument("state input: expected 'dims'");
        }
        std::size_t d;
        while (ls >> d) s.dims.push_back(d);
    }
    if (!std::getline(is, line)) {
        throw std::invalid_argument("state input: missing mu line");
    }
    {
        std::istringstream ls(line);
        std::string key, val;
        ls >> key >> val;
        if (key != "mu") {
            throw std::invalid_argument("state input: expected 'mu'");
        }
        if (val != "none") s.mu = static_cast<unsigned>(std::stoul(val));
    }
    if (s.dims.empty()) {
        throw std::invalid_argument("state input: empty dims");
    }
    std::size_t dim = s.dimension();
    s.amplitudes.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double re, im;
        if (!(is >> re >> im)) {
            throw std::invalid_argument("state input: truncated amplitude list");
        }
        s.amplitudes.emplace_back(re, im);
    }
    s.validate();
    return s;
}

void save_state(const std::string& path, const MultipartiteState& s) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_state(f, s);
}

MultipartiteState load_state(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open state file: " + path);
    return read_state(f);
}

std::string state_to_string(const MultipartiteState& s) {
    std::ostringstream os;
    write_state(os, s);
    return os.str();
}

std::uint64_t state_digest(const MultipartiteState& s) {
    std::string text = state_to_string(s);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace cmqm
