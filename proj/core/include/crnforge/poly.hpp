#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace crnforge {

using Exponents = std::vector<unsigned>;
using VariableList = std::shared_ptr<const std::vector<std::string>>;
using ParamMeta = std::map<std::string, double>;

// Magnitudes below this are treated as cancellation residue after expansion.
inline constexpr double kDefaultDropTolerance = 1e-14;

VariableList make_variables(std::vector<std::string> names);
unsigned total_degree(const Exponents& e);

// Graded lexicographic order: lower total degree first, ties broken so that
// higher powers of earlier variables come first (x1^2 < x1*x2 < x2^2).
struct GradedLex {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

struct Monomial {
    double coeff = 0.0;
    Exponents exponents;

    unsigned degree() const { return total_degree(exponents); }
    bool operator==(const Monomial&) const = default;
};

class Polynomial {
public:
    Polynomial() : vars_(make_variables({})) {}
    explicit Polynomial(VariableList vars);
    explicit Polynomial(std::vector<std::string> vars) : Polynomial(make_variables(std::move(vars))) {}
    // Terms may be unsorted and contain duplicates; they are merged. Exact zeros
    // and magnitudes below drop_tol are removed.
    Polynomial(VariableList vars, std::vector<Monomial> terms, double drop_tol = 0.0);
    Polynomial(std::vector<std::string> vars, std::vector<Monomial> terms, double drop_tol = 0.0)
        : Polynomial(make_variables(std::move(vars)), std::move(terms), drop_tol) {}

    static Polynomial constant(VariableList vars, double c);
    static Polynomial variable(VariableList vars, std::size_t index);

    const VariableList& variable_list() const { return vars_; }
    const std::vector<std::string>& variables() const { return *vars_; }
    std::size_t num_variables() const { return vars_->size(); }
    const std::vector<Monomial>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    // Zero polynomial has degree 0.
    unsigned degree() const;
    unsigned degree_in(std::size_t var) const;
    double coefficient(const Exponents& e) const;

    double evaluate(std::span<const double> x) const;
    double evaluate(std::initializer_list<double> x) const {
        return evaluate(std::span<const double>(x.begin(), x.size()));
    }

    Polynomial derivative(std::size_t var) const;
    // Sets x_var = value; the variable list is kept.
    Polynomial restrict(std::size_t var, double value) const;
    // Replaces x_i by images[i]; every image shares one variable list.
    Polynomial compose(const std::vector<Polynomial>& images, double drop_tol = 0.0) const;
    // Appends new variables (exponent 0) after the existing ones.
    Polynomial extend(const VariableList& wider) const;
    Polynomial pruned(double tol) const;
    Polynomial pow(unsigned k) const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    // Exact structural equality: same variables, same terms, same coefficients.
    bool operator==(const Polynomial& o) const;

    // Largest coefficient difference over the union of supports.
    double max_coeff_diff(const Polynomial& o) const;

    std::string to_string() const;

private:
    void check_compatible(const Polynomial& o) const;
    VariableList vars_;
    std::vector<Monomial> terms_;
};

bool same_variables(const VariableList& a, const VariableList& b);

// dx/dt = P(x); one equation per variable.
class PolySystem {
public:
    PolySystem() : vars_(make_variables({})) {}
    PolySystem(VariableList vars, std::vector<Polynomial> equations, ParamMeta meta = {});
    PolySystem(std::vector<std::string> vars, std::vector<Polynomial> equations, ParamMeta meta = {})
        : PolySystem(make_variables(std::move(vars)), std::move(equations), std::move(meta)) {}

    // Equations given as raw term lists over the system's variables.
    static PolySystem from_terms(std::vector<std::string> vars,
                                 const std::vector<std::vector<Monomial>>& equations,
                                 ParamMeta meta = {});

    const VariableList& variable_list() const { return vars_; }
    const std::vector<std::string>& variables() const { return *vars_; }
    const std::vector<Polynomial>& equations() const { return eqs_; }
    const Polynomial& equation(std::size_t i) const { return eqs_.at(i); }
    const ParamMeta& param_meta() const { return meta_; }
    std::size_t dimension() const { return eqs_.size(); }
    unsigned degree() const;
    bool is_zero() const;
    std::size_t term_count() const;

    std::vector<double> evaluate(std::span<const double> x) const;
    void evaluate_into(std::span<const double> x, std::span<double> out) const;

    PolySystem with_param_meta(ParamMeta meta) const;

    bool operator==(const PolySystem& o) const;
    double max_coeff_diff(const PolySystem& o) const;

private:
    VariableList vars_;
    std::vector<Polynomial> eqs_;
    ParamMeta meta_;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

PolyMatrix jacobian(const PolySystem& sys);
Eigen::MatrixXd jacobian_at(const PolySystem& sys, std::span<const double> x);
Eigen::MatrixXd jacobian_at(const PolyMatrix& jac, std::span<const double> x);

struct AffineMap {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd translation;

    static AffineMap identity(std::size_t n);
    static AffineMap translation_only(const Eigen::VectorXd& t);
    static AffineMap linear(const Eigen::MatrixXd& a);

    std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
    // Inverse under x̄ = A x + T.
    AffineMap inverse() const;
    void validate(std::size_t n) const;
};

enum class SubstitutionMode {
    state_change,       // x̄ = A x + T
    perturbation_frame  // x̄ = A (x + T)
};

// Rewrites dx/dt = P(x) in the coordinates x̄ of the map: dx̄/dt = A P(x(x̄)).
PolySystem substitute_affine(const PolySystem& sys, const AffineMap& map,
                             SubstitutionMode mode = SubstitutionMode::state_change,
                             double drop_tol = kDefaultDropTolerance);

}  // namespace crnforge
