#include "driftwave/field_expr.hpp"

#include <cctype>
#include <cmath>

namespace driftwave::cfg {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Parser {
    const std::string& text;
    const std::string& allowed;
    std::size_t pos = 0;
    std::vector<FieldExpr::Node>* nodes;

    using Node = FieldExpr::Node;
    using Op = FieldExpr::Node::Op;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ExprError("expression '" + text + "': " + what + " at position " +
                        std::to_string(pos));
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    int push(Node n) {
        nodes->push_back(n);
        return static_cast<int>(nodes->size() - 1);
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = push({Op::add, 0.0, 0, lhs, parse_term()});
            else if (eat('-'))
                lhs = push({Op::sub, 0.0, 0, lhs, parse_term()});
            else
                return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (eat('*'))
                lhs = push({Op::mul, 0.0, 0, lhs, parse_factor()});
            else if (eat('/'))
                lhs = push({Op::div, 0.0, 0, lhs, parse_factor()});
            else
                return lhs;
        }
    }

    int parse_factor() {
        if (eat('-')) return push({Op::neg, 0.0, 0, parse_factor(), -1});
        if (eat('+')) return parse_factor();
        return parse_primary();
    }

    int parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(text.substr(pos), &used);
            } catch (const std::exception&) {
                fail("bad numeric literal");
            }
            pos += used;
            return push({Op::constant, v, 0, -1, -1});
        }
        if (eat('(')) {
            const int inner = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos;
            while (end < text.size() &&
                   std::isalpha(static_cast<unsigned char>(text[end])))
                ++end;
            const std::string ident = text.substr(pos, end - pos);
            pos = end;
            if (ident == "pi") return push({Op::constant, kPi, 0, -1, -1});
            if (ident == "sin" || ident == "cos") {
                if (!eat('(')) fail("expected '(' after " + ident);
                const int inner = parse_expr();
                if (!eat(')')) fail("missing ')' after " + ident);
                return push({ident == "sin" ? Op::sine : Op::cosine, 0.0, 0, inner, -1});
            }
            if (ident.size() == 1 && allowed.find(ident[0]) != std::string::npos) {
                const int var = ident[0] == 'x'   ? 0
                                : ident[0] == 'y' ? 1
                                : ident[0] == 'z' ? 2
                                                  : 3;
                return push({Op::var, 0.0, var, -1, -1});
            }
            pos -= ident.size();
            fail("unknown identifier '" + ident + "' (allowed variables: " + allowed + ")");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const std::vector<FieldExpr::Node>& nodes, int idx, double x, double y,
                 double z, double t) {
    using Op = FieldExpr::Node::Op;
    const auto& n = nodes[idx];
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var: return n.var == 0 ? x : n.var == 1 ? y : n.var == 2 ? z : t;
        case Op::add: return eval_node(nodes, n.lhs, x, y, z, t) +
                             eval_node(nodes, n.rhs, x, y, z, t);
        case Op::sub: return eval_node(nodes, n.lhs, x, y, z, t) -
                             eval_node(nodes, n.rhs, x, y, z, t);
        case Op::mul: return eval_node(nodes, n.lhs, x, y, z, t) *
                             eval_node(nodes, n.rhs, x, y, z, t);
        case Op::div: return eval_node(nodes, n.lhs, x, y, z, t) /
                             eval_node(nodes, n.rhs, x, y, z, t);
        case Op::neg: return -eval_node(nodes, n.lhs, x, y, z, t);
        case Op::sine: return std::sin(eval_node(nodes, n.lhs, x, y, z, t));
        case Op::cosine: return std::cos(eval_node(nodes, n.lhs, x, y, z, t));
    }
    return 0.0;
}

}  // namespace

FieldExpr FieldExpr::parse(const std::string& text, const std::string& allowed) {
    FieldExpr expr;
    expr.text_ = text;
    Parser parser{text, allowed, 0, &expr.nodes_};
    expr.root_ = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return expr;
}

double FieldExpr::eval(double x, double y, double z, double t) const {
    if (root_ < 0) throw ExprError("evaluating an empty expression");
    return eval_node(nodes_, root_, x, y, z, t);
}

}  // namespace driftwave::cfg
