#include "cmqm/collapse.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cmqm/hilbert.hpp"

namespace cmqm {

namespace {

std::size_t stride_after(const std::vector<std::size_t>& dims, std::size_t k) {
    std::size_t s = 1;
    for (std::size_t q = k + 1; q < dims.size(); ++q) s *= dims[q];
    return s;
}

struct Contraction {
    std::vector<cplx> rest;  // unnormalized state of the other parties
    double prob = 0;
};

// <b|_k psi: contract party k against the (unit) vector b.
Contraction contract_party(const MultipartiteState& s, std::size_t k,
                           const Eigen::VectorXcd& b) {
    std::size_t dk = s.dims[k];
    std::size_t inner = stride_after(s.dims, k);
    std::size_t outer = s.dimension() / (dk * inner);
    Contraction out;
    out.rest.assign(outer * inner, cplx{0, 0});
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t a = 0; a < dk; ++a) {
            cplx w = std::conj(b[static_cast<Eigen::Index>(a)]);
            if (w == cplx{0, 0}) continue;
            const cplx* src = s.amplitudes.data() + (o * dk + a) * inner;
            cplx* dst = out.rest.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
    }
    for (const cplx& x : out.rest) out.prob += std::norm(x);
    return out;
}

// |b>_k (x) rest, with all parties kept in place.
MultipartiteState reinsert_party(const std::vector<std::size_t>& dims,
                                 std::size_t k, const Eigen::VectorXcd& b,
                                 const std::vector<cplx>& rest) {
    MultipartiteState s;
    s.dims = dims;
    std::size_t dk = dims[k];
    std::size_t inner = stride_after(dims, k);
    std::size_t outer = rest.size() / inner;
    s.amplitudes.assign(outer * dk * inner, cplx{0, 0});
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t a = 0; a < dk; ++a) {
            cplx w = b[static_cast<Eigen::Index>(a)];
            cplx* dst = s.amplitudes.data() + (o * dk + a) * inner;
            const cplx* src = rest.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] = w * src[i];
        }
    }
    return s;
}

MultipartiteState drop_party_state(const std::vector<std::size_t>& dims,
                                   std::size_t k, std::vector<cplx> rest) {
    MultipartiteState s;
    for (std::size_t q = 0; q < dims.size(); ++q) {
        if (q != k) s.dims.push_back(dims[q]);
    }
    s.amplitudes = std::move(rest);
    return s;
}

void canonical_phase(Eigen::VectorXcd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
    }
}

bool vector_before(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].real() - b[i].real()) > 1e-9) {
            return a[i].real() > b[i].real();
        }
        if (std::abs(a[i].imag() - b[i].imag()) > 1e-9) {
            return a[i].imag() > b[i].imag();
        }
    }
    return false;
}

// Marginal eigenbasis of party k, eigenvalues descending, degenerate blocks
// ordered lexicographically on phase-canonicalized components.
std::vector<Eigen::VectorXcd> sorted_marginal_eigenbasis(
    const MultipartiteState& s, std::size_t k) {
    SubsetMask mk(1u << k, static_cast<std::uint32_t>(s.num_parties()));
    Eigen::MatrixXcd rho = reduced_density(s, mk);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    std::size_t d = static_cast<std::size_t>(rho.rows());
    std::vector<std::pair<double, Eigen::VectorXcd>> items;
    items.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        Eigen::VectorXcd v = es.eigenvectors().col(static_cast<Eigen::Index>(i));
        canonical_phase(v);
        items.emplace_back(es.eigenvalues()[static_cast<Eigen::Index>(i)],
                           std::move(v));
    }
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.first - b.first) > 1e-10) return a.first > b.first;
        return vector_before(a.second, b.second);
    });
    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(d);
    for (auto& it : items) basis.push_back(std::move(it.second));
    return basis;
}

// Rotate the state into the product of per-party bases (apply B_k^dagger on
// every party).
std::vector<cplx> rotate_to_bases(
    const MultipartiteState& s,
    const std::vector<std::vector<Eigen::VectorXcd>>& bases) {
    std::vector<cplx> amps = s.amplitudes;
    std::vector<cplx> next(amps.size());
    for (std::size_t k = 0; k < s.num_parties(); ++k) {
        std::size_t dk = s.dims[k];
        std::size_t inner = stride_after(s.dims, k);
        std::size_t outer = amps.size() / (dk * inner);
        std::fill(next.begin(), next.end(), cplx{0, 0});
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t m = 0; m < dk; ++m) {
                const Eigen::VectorXcd& bm = bases[k][m];
                cplx* dst = next.data() + (o * dk + m) * inner;
                for (std::size_t a = 0; a < dk; ++a) {
                    cplx w = std::conj(bm[static_cast<Eigen::Index>(a)]);
                    if (w == cplx{0, 0}) continue;
                    const cplx* src = amps.data() + (o * dk + a) * inner;
                    for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
                }
            }
        }
        amps.swap(next);
    }
    return amps;
}

std::vector<std::size_t> index_digits(std::size_t idx,
                                      const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
    return digits;
}

std::size_t dominant_component(const Eigen::VectorXcd& v) {
    std::size_t best = 0;
    double best_mag = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best_mag + 1e-12) {
            best_mag = m;
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

TriggerBasis computational_basis(std::size_t trigger, std::size_t dim) {
    TriggerBasis tb;
    tb.trigger = trigger;
    tb.label = "computational";
    for (std::size_t a = 0; a < dim; ++a) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        v[static_cast<Eigen::Index>(a)] = cplx{1, 0};
        tb.vectors.push_back(std::move(v));
    }
    return tb;
}

}  // namespace

void TriggerBasis::validate(std::size_t expected_dim) const {
    if (vectors.size() != expected_dim) {
        throw std::invalid_argument("TriggerBasis: wrong number of vectors");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != static_cast<Eigen::Index>(expected_dim)) {
            throw std::invalid_argument("TriggerBasis: wrong vector dimension");
        }
        for (std::size_t j = 0; j <= i; ++j) {
            cplx ip = vectors[j].dot(vectors[i]);
            double want = i == j ? 1.0 : 0.0;
            if (std::abs(std::abs(ip) - want) > 1e-9) {
                throw std::invalid_argument("TriggerBasis: vectors not orthonormal");
            }
        }
    }
}

std::optional<SingleIndexForm> single_index_form(const MultipartiteState& s,
                                                 double tol) {
    s.validate();
    require_normalized(s, 1e-6);
    std::size_t n = s.num_parties();
    std::vector<std::vector<Eigen::VectorXcd>> bases;
    bases.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        bases.push_back(sorted_marginal_eigenbasis(s, k));
    }
    std::vector<cplx> rotated = rotate_to_bases(s, bases);

    // Accept entries greedily by mass; a single-index expansion uses every
    // per-party coordinate at most once.
    std::vector<std::size_t> order(rotated.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ma = std::norm(rotated[a]);
        double mb = std::norm(rotated[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    std::vector<std::vector<char>> used(n);
    for (std::size_t k = 0; k < n; ++k) used[k].assign(s.dims[k], 0);
    std::vector<std::size_t> accepted;
    double residual = 0;
    for (std::size_t idx : order) {
        double mass = std::norm(rotated[idx]);
        if (mass < 1e-12) continue;
        auto digits = index_digits(idx, s.dims);
        bool free = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (used[k][digits[k]]) free = false;
        }
        if (free) {
            for (std::size_t k = 0; k < n; ++k) used[k][digits[k]] = 1;
            accepted.push_back(idx);
        } else {
            residual += mass;
        }
    }
    if (accepted.empty() || residual > tol) return std::nullopt;

    // Stable term order: dominant computational component per party, so
    // computational-basis expansions keep their natural labels.
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> keyed;
    for (std::size_t idx : accepted) {
        auto digits = index_digits(idx, s.dims);
        std::vector<std::size_t> key;
        key.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            key.push_back(dominant_component(bases[k][digits[k]]));
        }
        keyed.emplace_back(std::move(key), idx);
    }
    std::sort(keyed.begin(), keyed.end());

    SingleIndexForm form;
    form.party_vectors.resize(n);
    for (const auto& [key, idx] : keyed) {
        form.coefficients.push_back(rotated[idx]);
        auto digits = index_digits(idx, s.dims);
        for (std::size_t k = 0; k < n; ++k) {
            form.party_vectors[k].push_back(bases[k][digits[k]]);
        }
    }
    return form;
}

double mean_post_chi(const MultipartiteState& s, const TriggerBasis& tb,
                     const ResolutionParams& res) {
    s.validate();
    require_normalized(s, 1e-6);
    std::size_t k = tb.trigger;
    if (k >= s.num_parties()) {
        throw std::invalid_argument("mean_post_chi: trigger out of range");
    }
    tb.validate(s.dims[k]);
    double total = 0;
    for (const Eigen::VectorXcd& b : tb.vectors) {
        Contraction c = contract_party(s, k, b);
        if (c.prob <= 1e-12) continue;  // zero-probability outcomes contribute 0
        if (s.num_parties() < 2) continue;
        double inv = 1.0 / std::sqrt(c.prob);
        for (cplx& x : c.rest) x *= inv;
        MultipartiteState remainder = drop_party_state(s.dims, k, std::move(c.rest));
        double part = remainder.num_parties() >= 2 ? chi(remainder, res) : 0.0;
        total += c.prob * part;
    }
    return total;
}

TriggerBasis minimal_basis(const MultipartiteState& s, std::size_t trigger,
                           const ResolutionParams& res,
                           const std::vector<TriggerBasis>& extra_candidates) {
    s.validate();
    if (trigger >= s.num_parties()) {
        throw std::invalid_argument("minimal_basis: trigger out of range");
    }
    std::size_t dk = s.dims[trigger];

    if (auto form = single_index_form(s)) {
        TriggerBasis tb;
        tb.trigger = trigger;
        tb.label = "single_index";
        tb.vectors = form->party_vectors[trigger];
        // complete the term vectors to a full orthonormal basis
        for (const Eigen::VectorXcd& cand : sorted_marginal_eigenbasis(s, trigger)) {
            Eigen::VectorXcd v = cand;
            for (const Eigen::VectorXcd& sel : tb.vectors) {
                v -= sel.dot(v) * sel;
            }
            double nrm = v.norm();
            if (nrm > 1e-6) {
                v /= nrm;
                canonical_phase(v);
                tb.vectors.push_back(std::move(v));
            }
            if (tb.vectors.size() == dk) break;
        }
        return tb;
    }

    std::vector<TriggerBasis> candidates;
    {
        TriggerBasis tb;
        tb.trigger = trigger;
        tb.label = "marginal_eigen";
        tb.vectors = sorted_marginal_eigenbasis(s, trigger);
        candidates.push_back(std::move(tb));
    }
    candidates.push_back(computational_basis(trigger, dk));
    for (const TriggerBasis& extra : extra_candidates) {
        candidates.push_back(extra);
    }

    std::size_t best = 0;
    double best_chi = mean_post_chi(s, candidates[0], res);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double c = mean_post_chi(s, candidates[i], res);
        if (c < best_chi - 1e-12) {
            best_chi = c;
            best = i;
        }
    }
    return candidates[best];
}

std::vector<double> born_probabilities(const SingleIndexForm& form) {
    double total = 0;
    for (const cplx& c : form.coefficients) total += std::norm(c);
    if (!(total > 0)) {
        throw std::domain_error("born_probabilities: all-zero coefficients");
    }
    std::vector<double> p;
    p.reserve(form.coefficients.size());
    for (const cplx& c : form.coefficients) p.push_back(std::norm(c) / total);
    return p;
}

double uniform_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string collapse_event_csv_header() {
    return "trigger,outcome_index,born_probability,chi_before,chi_after,basis_label";
}

std::string collapse_event_csv_row(const CollapseEvent& ev) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%s", ev.trigger,
                  ev.outcome_index, ev.born_probability, ev.chi_before,
                  ev.chi_after, ev.basis_label.c_str());
    return buf;
}

std::pair<MultipartiteState, CollapseEvent> collapse(const MultipartiteState& s,
                                                     const ResolutionParams& res,
                                                     std::mt19937_64& rng,
                                                     bool allow_stable) {
    s.validate();
    MultipartiteState cur = s;
    {
        double nrm = cur.norm();
        if (!(nrm > 1e-300)) throw std::domain_error("collapse: zero-norm state");
        for (cplx& a : cur.amplitudes) a /= nrm;
    }

    IslandDecomposition dec = decompose_islands(cur, res);
    double chi_before = 0;
    std::ptrdiff_t island_idx = -1;
    for (std::size_t i = 0; i < dec.islands.size(); ++i) {
        if (dec.islands[i].size() < 2) continue;
        double v = xi_mu(dec.states[i], res);
        if (v > chi_before) {
            chi_before = v;
            island_idx = static_cast<std::ptrdiff_t>(i);
        }
    }
    bool unstable = chi_before >= res.kappa * static_cast<double>(res.mu);
    if (!unstable && !allow_stable) {
        throw std::logic_error(
            "collapse: state is computationally stable (chi < kappa*mu); "
            "pass allow_stable to force");
    }

    CollapseEvent ev;
    ev.chi_before = chi_before;
    if (island_idx < 0) {
        // already product across all parties: collapse is a fixed point
        ev.trigger = rng() % s.num_parties();
        ev.basis_label = "none";
        ev.outcome_index = 0;
        ev.born_probability = 1.0;
        ev.chi_after = 0.0;
        return {s, ev};
    }

    const std::vector<std::size_t>& island = dec.islands[static_cast<std::size_t>(island_idx)];
    std::size_t trigger = island[rng() % island.size()];
    std::vector<std::size_t> order{trigger};
    for (std::size_t p : island) {
        if (p != trigger) order.push_back(p);
    }

    bool first = true;
    for (std::size_t k : order) {
        TriggerBasis tb = minimal_basis(cur, k, res);
        std::vector<Contraction> outcomes;
        double total = 0;
        for (const Eigen::VectorXcd& b : tb.vectors) {
            outcomes.push_back(contract_party(cur, k, b));
            total += outcomes.back().prob;
        }
        if (!(total > 0)) throw std::domain_error("collapse: degenerate projection");
        // inverse CDF over cumulative Born weights, one draw per projection
        double u = uniform_draw(rng);
        std::size_t j = outcomes.size() - 1;
        double acc = 0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            acc += outcomes[i].prob / total;
            if (u < acc) {
                j = i;
                break;
            }
        }
        double pj = outcomes[j].prob / total;
        double inv = 1.0 / std::sqrt(outcomes[j].prob);
        for (cplx& x : outcomes[j].rest) x *= inv;
        cur = reinsert_party(cur.dims, k, tb.vectors[j], outcomes[j].rest);
        if (first) {
            ev.trigger = k;
            ev.basis_label = tb.label;
            ev.outcome_index = j;
            ev.born_probability = pj;
            first = false;
        }
    }

    double nrm = cur.norm();
    for (cplx& a : cur.amplitudes) a /= nrm;
    MultipartiteState out = discretize(cur, res);
    ev.chi_after = chi(out, res);
    return {std::move(out), ev};
}

}  // namespace cmqm
