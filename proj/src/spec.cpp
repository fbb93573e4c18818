#include "specmarl/spec.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace specmarl {

namespace {

int append_tree(Spec& dst, const Spec& src, int id) {
    const SpecNode& n = src.at(id);
    SpecNode copy = n;
    if (n.left >= 0) copy.left = append_tree(dst, src, n.left);
    if (n.right >= 0) copy.right = append_tree(dst, src, n.right);
    dst.nodes.push_back(copy);
    return static_cast<int>(dst.nodes.size()) - 1;
}

}  // namespace

Spec spec_achieve(Predicate pred) {
    Spec s;
    s.nodes.push_back(SpecNode{SpecKind::Achieve, std::move(pred), -1, -1});
    s.root = 0;
    return s;
}

Spec spec_ensuring(Spec inner, Predicate constraint) {
    if (!constraint.is_local()) {
        throw std::invalid_argument("ensuring constraints must be local predicates");
    }
    Spec s;
    int l = append_tree(s, inner, inner.root);
    s.nodes.push_back(SpecNode{SpecKind::Ensuring, std::move(constraint), l, -1});
    s.root = static_cast<int>(s.nodes.size()) - 1;
    return s;
}

static Spec combine(SpecKind kind, Spec a, Spec b) {
    Spec s;
    int l = append_tree(s, a, a.root);
    int r = append_tree(s, b, b.root);
    s.nodes.push_back(SpecNode{kind, Predicate{}, l, r});
    s.root = static_cast<int>(s.nodes.size()) - 1;
    return s;
}

Spec spec_seq(Spec first, Spec second) { return combine(SpecKind::Seq, std::move(first), std::move(second)); }
Spec spec_or(Spec left, Spec right) { return combine(SpecKind::Or, std::move(left), std::move(right)); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    int expected_dim;
    double tolerance;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool eat_word(const char* w) {
        skip_ws();
        std::size_t n = 0;
        while (w[n]) ++n;
        if (text.compare(pos, n, w) != 0) return false;
        // Keywords must not run into an identifier tail.
        std::size_t end = pos + n;
        if (end < text.size()) {
            char c = text[end];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
        }
        pos += n;
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    double number() {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
        bool digits = false;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
            digits = true;
            ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (!digits) fail("expected a number");
        return std::strtod(text.substr(start, pos - start).c_str(), nullptr);
    }

    Predicate predicate() {
        skip_ws();
        bool global;
        if (eat_word("reach_lo")) {
            global = false;
        } else if (eat_word("reach_gl")) {
            global = true;
        } else {
            fail("expected reach_lo or reach_gl");
        }
        if (!eat('(')) fail("expected '(' after predicate name");
        std::vector<double> coords;
        coords.push_back(number());
        while (eat(',')) coords.push_back(number());
        if (!eat(')')) fail("expected ')' closing predicate");
        if (expected_dim > 0) {
            const std::size_t d = static_cast<std::size_t>(expected_dim);
            if (!global && coords.size() != d) {
                fail("local predicate target has wrong dimension");
            }
            if (global && (coords.empty() || coords.size() % d != 0)) {
                fail("global predicate target is not a multiple of the state dimension");
            }
        }
        return global ? reach_global(std::move(coords), tolerance)
                      : reach_local(std::move(coords), tolerance);
    }

    Spec factor() {
        skip_ws();
        Spec result;
        if (eat('(')) {
            result = spec();
            if (!eat(')')) fail("expected ')'");
        } else if (eat('[')) {
            result = spec();
            if (!eat(']')) fail("expected ']'");
        } else {
            eat_word("achieve");  // optional keyword
            result = spec_achieve(predicate());
        }
        while (eat_word("ensuring")) {
            Predicate c = predicate();
            if (!c.is_local()) fail("ensuring constraint must be a local predicate");
            result = spec_ensuring(std::move(result), std::move(c));
        }
        return result;
    }

    Spec term() {
        Spec result = factor();
        while (eat_word("or")) result = spec_or(std::move(result), factor());
        return result;
    }

    Spec spec() {
        Spec result = term();
        while (eat(';')) result = spec_seq(std::move(result), term());
        return result;
    }
};

}  // namespace

Spec parse_spec(const std::string& text, int expected_dim, double tolerance) {
    Parser p{text, 0, expected_dim, tolerance};
    p.skip_ws();
    if (p.pos == text.size()) throw ParseError("empty specification", 0);
    Spec s = p.spec();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return s;
}

namespace {

void print_pred(std::ostringstream& out, const Predicate& p) {
    out << (p.kind == PredKind::ReachLocal ? "reach_lo("
            : p.kind == PredKind::ReachGlobal ? "reach_gl("
                                              : "sum_at_least(");
    if (p.kind == PredKind::SumAtLeast) {
        out << p.threshold;
    } else {
        for (std::size_t i = 0; i < p.target.size(); ++i) {
            if (i) out << ",";
            out << p.target[i];
        }
    }
    out << ")";
}

void print_node(std::ostringstream& out, const Spec& s, int id) {
    const SpecNode& n = s.at(id);
    switch (n.kind) {
        case SpecKind::Achieve:
            print_pred(out, n.pred);
            break;
        case SpecKind::Ensuring:
            out << "[";
            print_node(out, s, n.left);
            out << " ensuring ";
            print_pred(out, n.pred);
            out << "]";
            break;
        case SpecKind::Seq:
            out << "[";
            print_node(out, s, n.left);
            out << "; ";
            print_node(out, s, n.right);
            out << "]";
            break;
        case SpecKind::Or:
            out << "[";
            print_node(out, s, n.left);
            out << " or ";
            print_node(out, s, n.right);
            out << "]";
            break;
    }
}

}  // namespace

std::string to_string(const Spec& spec) {
    std::ostringstream out;
    if (spec.empty()) return "<empty>";
    print_node(out, spec, spec.root);
    return out.str();
}

// ---------------------------------------------------------------------------
// Trajectory oracle
// ---------------------------------------------------------------------------

namespace {

struct OracleCtx {
    const Spec& spec;
    const Trajectory& traj;
    const std::vector<int>& agents;
    SplitAudit* audit;

    bool pred_holds_at(const Predicate& p, int t, int agent) const {
        if (p.is_local()) {
            return holds_value(quant_local(p, traj.agent_state(t, agent)));
        }
        // Restriction of the joint state to the listed agents.
        std::vector<double> restricted;
        restricted.reserve(agents.size() * static_cast<std::size_t>(traj.dim));
        for (int a : agents) {
            auto s = traj.agent_state(t, a);
            restricted.insert(restricted.end(), s.begin(), s.end());
        }
        return holds_value(quant_global(p, restricted, agents, traj.dim));
    }

    // Window is the inclusive state range [lo, hi].
    bool eval(int node, int lo, int hi) const {
        if (lo > hi) return false;
        const SpecNode& n = spec.at(node);
        switch (n.kind) {
            case SpecKind::Achieve: {
                if (n.pred.is_local()) {
                    for (int a : agents) {
                        bool hit = false;
                        for (int t = lo; t <= hi && !hit; ++t) hit = pred_holds_at(n.pred, t, a);
                        if (!hit) return false;
                    }
                    return true;
                }
                for (int t = lo; t <= hi; ++t) {
                    if (pred_holds_at(n.pred, t, 0)) return true;
                }
                return false;
            }
            case SpecKind::Ensuring: {
                for (int t = lo; t <= hi; ++t) {
                    for (int a : agents) {
                        if (!pred_holds_at(n.pred, t, a)) return false;
                    }
                }
                return eval(n.left, lo, hi);
            }
            case SpecKind::Seq: {
                // Prefix [lo, k], suffix [k+1, hi], both non-empty.
                for (int k = lo; k < hi; ++k) {
                    if (eval(n.left, lo, k) && eval(n.right, k + 1, hi)) {
                        if (audit) (*audit)[node] = k;
                        return true;
                    }
                }
                return false;
            }
            case SpecKind::Or:
                return eval(n.left, lo, hi) || eval(n.right, lo, hi);
        }
        return false;
    }
};

}  // namespace

bool satisfies(const Spec& spec, const Trajectory& traj, const std::vector<int>& agents,
               SplitAudit* audit) {
    if (traj.states.empty()) throw std::invalid_argument("satisfies: empty trajectory");
    if (spec.empty()) throw std::invalid_argument("satisfies: empty specification");
    for (int a : agents) {
        if (a < 0 || a >= traj.n_agents) throw std::invalid_argument("satisfies: agent id out of range");
    }
    OracleCtx ctx{spec, traj, agents, audit};
    return ctx.eval(spec.root, 0, static_cast<int>(traj.states.size()) - 1);
}

}  // namespace specmarl
