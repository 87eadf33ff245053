#include "crnforge/poly.hpp"

#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crnforge {

VariableList make_variables(std::vector<std::string> names) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw Error("empty variable name");
        if (!seen.insert(n).second) throw Error("duplicate variable name: " + n);
    }
    return std::make_shared<const std::vector<std::string>>(std::move(names));
}

unsigned total_degree(const Exponents& e) {
    unsigned d = 0;
    for (unsigned v : e) d += v;
    return d;
}

bool GradedLex::operator()(const Exponents& a, const Exponents& b) const {
    const unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    // Same degree: larger exponent of the earliest differing variable first.
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

bool same_variables(const VariableList& a, const VariableList& b) {
    return a == b || *a == *b;
}

namespace {

using TermMap = std::map<Exponents, double, GradedLex>;

std::vector<Monomial> from_map(const TermMap& m, double drop_tol) {
    std::vector<Monomial> out;
    out.reserve(m.size());
    for (const auto& [e, c] : m) {
        if (c == 0.0 || std::abs(c) < drop_tol || !std::isfinite(c)) {
            if (!std::isfinite(c)) throw Error("non-finite polynomial coefficient");
            continue;
        }
        out.push_back({c, e});
    }
    return out;
}

double ipow(double x, unsigned k) {
    double r = 1.0;
    while (k) {
        if (k & 1u) r *= x;
        x *= x;
        k >>= 1u;
    }
    return r;
}

}  // namespace

Polynomial::Polynomial(VariableList vars) : vars_(std::move(vars)) {
    if (!vars_) throw Error("null variable list");
}

Polynomial::Polynomial(VariableList vars, std::vector<Monomial> terms, double drop_tol)
    : vars_(std::move(vars)) {
    if (!vars_) throw Error("null variable list");
    TermMap m;
    for (auto& t : terms) {
        if (t.exponents.size() != vars_->size())
            throw DimensionMismatch("monomial has " + std::to_string(t.exponents.size()) +
                                    " exponents, polynomial has " + std::to_string(vars_->size()) +
                                    " variables");
        m[t.exponents] += t.coeff;
    }
    terms_ = from_map(m, drop_tol);
}

Polynomial Polynomial::constant(VariableList vars, double c) {
    const std::size_t n = vars->size();
    return Polynomial(std::move(vars), {{c, Exponents(n, 0)}});
}

Polynomial Polynomial::variable(VariableList vars, std::size_t index) {
    const std::size_t n = vars->size();
    if (index >= n) throw DimensionMismatch("variable index out of range");
    Exponents e(n, 0);
    e[index] = 1;
    return Polynomial(std::move(vars), {{1.0, e}});
}

unsigned Polynomial::degree() const {
    // Sorted by total degree, so the last term carries the maximum.
    return terms_.empty() ? 0u : terms_.back().degree();
}

unsigned Polynomial::degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.exponents.at(var));
    return d;
}

double Polynomial::coefficient(const Exponents& e) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                               [](const Monomial& m, const Exponents& k) { return GradedLex{}(m.exponents, k); });
    if (it != terms_.end() && it->exponents == e) return it->coeff;
    return 0.0;
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (x.size() != vars_->size())
        throw DimensionMismatch("evaluate: expected " + std::to_string(vars_->size()) + " values, got " +
                                std::to_string(x.size()));
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (t.exponents[i]) v *= ipow(x[i], t.exponents[i]);
        s += v;
    }
    return s;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (var >= vars_->size()) throw DimensionMismatch("derivative: variable index out of range");
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        if (t.exponents[var] == 0) continue;
        Monomial m{t.coeff * t.exponents[var], t.exponents};
        m.exponents[var] -= 1;
        out.push_back(std::move(m));
    }
    return Polynomial(vars_, std::move(out));
}

Polynomial Polynomial::restrict(std::size_t var, double value) const {
    if (var >= vars_->size()) throw DimensionMismatch("restrict: variable index out of range");
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        Monomial m{t.coeff * ipow(value, t.exponents[var]), t.exponents};
        m.exponents[var] = 0;
        out.push_back(std::move(m));
    }
    return Polynomial(vars_, std::move(out));
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& images, double drop_tol) const {
    if (images.size() != vars_->size()) throw DimensionMismatch("compose: one image per variable required");
    if (images.empty()) return *this;
    const VariableList& out_vars = images.front().variable_list();
    for (const auto& im : images)
        if (!same_variables(im.variable_list(), out_vars))
            throw DimensionMismatch("compose: images use different variable lists");

    // powers[i][k] = images[i]^k, built lazily.
    std::vector<std::vector<Polynomial>> powers(images.size());
    auto power = [&](std::size_t i, unsigned k) -> const Polynomial& {
        auto& p = powers[i];
        if (p.empty()) p.push_back(Polynomial::constant(out_vars, 1.0));
        while (p.size() <= k) p.push_back(p.back() * images[i]);
        return p[k];
    };

    TermMap acc;
    for (const auto& t : terms_) {
        Polynomial prod = Polynomial::constant(out_vars, t.coeff);
        for (std::size_t i = 0; i < images.size(); ++i)
            if (t.exponents[i]) prod = prod * power(i, t.exponents[i]);
        for (const auto& m : prod.terms()) acc[m.exponents] += m.coeff;
    }
    Polynomial r(out_vars);
    r.terms_ = from_map(acc, drop_tol);
    return r;
}

Polynomial Polynomial::extend(const VariableList& wider) const {
    const std::size_t n = vars_->size();
    if (wider->size() < n || !std::equal(vars_->begin(), vars_->end(), wider->begin()))
        throw DimensionMismatch("extend: new variable list must start with the existing variables");
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        Monomial m{t.coeff, t.exponents};
        m.exponents.resize(wider->size(), 0);
        out.push_back(std::move(m));
    }
    return Polynomial(wider, std::move(out));
}

Polynomial Polynomial::pruned(double tol) const {
    Polynomial r(vars_);
    for (const auto& t : terms_)
        if (std::abs(t.coeff) >= tol) r.terms_.push_back(t);
    return r;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial r = Polynomial::constant(vars_, 1.0);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

void Polynomial::check_compatible(const Polynomial& o) const {
    if (!same_variables(vars_, o.vars_)) throw DimensionMismatch("polynomials use different variable lists");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    check_compatible(o);
    TermMap m;
    for (const auto& t : terms_) m[t.exponents] += t.coeff;
    for (const auto& t : o.terms_) m[t.exponents] += t.coeff;
    terms_ = from_map(m, 0.0);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) { return *this += -o; }

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    TermMap m;
    Exponents e(a.num_variables());
    for (const auto& s : a.terms_)
        for (const auto& t : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = s.exponents[i] + t.exponents[i];
            m[e] += s.coeff * t.coeff;
        }
    Polynomial r(a.vars_);
    r.terms_ = from_map(m, 0.0);
    return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
    return same_variables(vars_, o.vars_) && terms_ == o.terms_;
}

double Polynomial::max_coeff_diff(const Polynomial& o) const {
    check_compatible(o);
    TermMap m;
    for (const auto& t : terms_) m[t.exponents] += t.coeff;
    for (const auto& t : o.terms_) m[t.exponents] -= t.coeff;
    double d = 0.0;
    for (const auto& [e, c] : m) d = std::max(d, std::abs(c));
    return d;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : terms_) {
        double c = t.coeff;
        if (!first) {
            os << (c < 0 ? " - " : " + ");
            c = std::abs(c);
        } else if (c < 0) {
            os << "-";
            c = -c;
        }
        first = false;
        const bool constant = t.degree() == 0;
        if (constant || c != 1.0) {
            os << c;
        }
        bool need_star = !constant && c != 1.0;
        for (std::size_t i = 0; i < t.exponents.size(); ++i) {
            if (!t.exponents[i]) continue;
            if (need_star) os << "*";
            os << (*vars_)[i];
            if (t.exponents[i] > 1) os << "^" << t.exponents[i];
            need_star = true;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

PolySystem::PolySystem(VariableList vars, std::vector<Polynomial> equations, ParamMeta meta)
    : vars_(std::move(vars)), eqs_(std::move(equations)), meta_(std::move(meta)) {
    if (eqs_.size() != vars_->size())
        throw DimensionMismatch("system has " + std::to_string(vars_->size()) + " variables but " +
                                std::to_string(eqs_.size()) + " equations");
    for (auto& e : eqs_) {
        if (!same_variables(e.variable_list(), vars_))
            throw DimensionMismatch("equation variable list differs from system variables");
    }
}

PolySystem PolySystem::from_terms(std::vector<std::string> vars,
                                  const std::vector<std::vector<Monomial>>& equations, ParamMeta meta) {
    auto vl = make_variables(std::move(vars));
    std::vector<Polynomial> eqs;
    for (const auto& terms : equations) eqs.emplace_back(vl, terms);
    return PolySystem(vl, std::move(eqs), std::move(meta));
}

unsigned PolySystem::degree() const {
    unsigned d = 0;
    for (const auto& e : eqs_) d = std::max(d, e.degree());
    return d;
}

bool PolySystem::is_zero() const {
    return std::all_of(eqs_.begin(), eqs_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

std::size_t PolySystem::term_count() const {
    std::size_t n = 0;
    for (const auto& e : eqs_) n += e.terms().size();
    return n;
}

std::vector<double> PolySystem::evaluate(std::span<const double> x) const {
    std::vector<double> out(eqs_.size());
    evaluate_into(x, out);
    return out;
}

void PolySystem::evaluate_into(std::span<const double> x, std::span<double> out) const {
    if (out.size() != eqs_.size()) throw DimensionMismatch("evaluate_into: output size mismatch");
    for (std::size_t i = 0; i < eqs_.size(); ++i) out[i] = eqs_[i].evaluate(x);
}

PolySystem PolySystem::with_param_meta(ParamMeta meta) const { return PolySystem(vars_, eqs_, std::move(meta)); }

bool PolySystem::operator==(const PolySystem& o) const {
    return same_variables(vars_, o.vars_) && eqs_ == o.eqs_;
}

double PolySystem::max_coeff_diff(const PolySystem& o) const {
    if (!same_variables(vars_, o.vars_)) throw DimensionMismatch("systems use different variable lists");
    double d = 0.0;
    for (std::size_t i = 0; i < eqs_.size(); ++i) d = std::max(d, eqs_[i].max_coeff_diff(o.eqs_[i]));
    return d;
}

PolyMatrix jacobian(const PolySystem& sys) {
    const std::size_t n = sys.dimension();
    PolyMatrix j(n, std::vector<Polynomial>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) j[r][c] = sys.equation(r).derivative(c);
    return j;
}

Eigen::MatrixXd jacobian_at(const PolyMatrix& jac, std::span<const double> x) {
    const auto n = static_cast<Eigen::Index>(jac.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = jac[r][c].evaluate(x);
    return m;
}

Eigen::MatrixXd jacobian_at(const PolySystem& sys, std::span<const double> x) {
    return jacobian_at(jacobian(sys), x);
}

// ---------------------------------------------------------------------------

AffineMap AffineMap::identity(std::size_t n) {
    return {Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
}

AffineMap AffineMap::translation_only(const Eigen::VectorXd& t) {
    return {Eigen::MatrixXd::Identity(t.size(), t.size()), t};
}

AffineMap AffineMap::linear(const Eigen::MatrixXd& a) { return {a, Eigen::VectorXd::Zero(a.rows())}; }

void AffineMap::validate(std::size_t n) const {
    if (matrix.rows() != matrix.cols()) throw DimensionMismatch("affine matrix is not square");
    if (static_cast<std::size_t>(matrix.rows()) != n || static_cast<std::size_t>(translation.size()) != n)
        throw DimensionMismatch("affine map dimension does not match the system");
    if (std::abs(matrix.determinant()) <= 1e-12) throw SingularMatrix("affine matrix is singular (|det| <= 1e-12)");
}

AffineMap AffineMap::inverse() const {
    validate(dimension());
    Eigen::MatrixXd inv = matrix.inverse();
    return {inv, -inv * translation};
}

PolySystem substitute_affine(const PolySystem& sys, const AffineMap& map, SubstitutionMode mode, double drop_tol) {
    const std::size_t n = sys.dimension();
    map.validate(n);
    const bool is_identity = map.matrix.isIdentity(0.0);
    const Eigen::MatrixXd inv = is_identity ? map.matrix : Eigen::MatrixXd(map.matrix.inverse());

    // x = inv x̄ + shift
    Eigen::VectorXd shift = mode == SubstitutionMode::state_change ? Eigen::VectorXd(-inv * map.translation)
                                                                   : Eigen::VectorXd(-map.translation);
    const VariableList& vars = sys.variable_list();
    std::vector<Polynomial> images;
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Monomial> terms;
        Exponents e0(n, 0);
        terms.push_back({shift(i), e0});
        for (std::size_t j = 0; j < n; ++j) {
            Exponents e(n, 0);
            e[j] = 1;
            terms.push_back({inv(i, j), e});
        }
        images.emplace_back(vars, std::move(terms));
    }

    std::vector<Polynomial> composed;
    composed.reserve(n);
    for (const auto& eq : sys.equations()) composed.push_back(eq.compose(images, 0.0));

    std::vector<Polynomial> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial acc(vars);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = map.matrix(i, j);
            if (a == 0.0) continue;
            acc += a == 1.0 ? composed[j] : composed[j] * a;
        }
        out.push_back(acc.pruned(drop_tol));
    }
    return PolySystem(vars, std::move(out), sys.param_meta());
}

}  // namespace crnforge
