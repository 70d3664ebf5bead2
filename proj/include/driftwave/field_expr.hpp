#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Arithmetic over x, y, z (and t for time profiles) with sin, cos, pi and
// numeric literals: enough to describe drift fields, multipliers, material
// weights and sources without a scripting dependency.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('+'|'-') factor | primary
//   primary:= number | 'pi' | variable | ('sin'|'cos') '(' expr ')' | '(' expr ')'

namespace driftwave::cfg {

class ExprError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FieldExpr {
  public:
    FieldExpr() = default;

    // `allowed` lists the variable letters this context accepts, e.g. "xyz"
    // for spatial fields or "t" for time profiles.
    static FieldExpr parse(const std::string& text, const std::string& allowed = "xyz");

    double eval(double x, double y, double z, double t = 0.0) const;
    double eval_time(double t) const { return eval(0, 0, 0, t); }
    const std::string& text() const { return text_; }
    bool empty() const { return nodes_.empty(); }

    struct Node {
        enum class Op { constant, var, add, sub, mul, div, neg, sine, cosine };
        Op op = Op::constant;
        double value = 0.0;  // constant payload
        int var = 0;         // 0..3 for x,y,z,t
        int lhs = -1, rhs = -1;
    };

  private:
    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;
};

}  // namespace driftwave::cfg
