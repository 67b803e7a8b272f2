#include "overlapq/transition.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "overlapq/errors.hpp"

namespace overlapq {

Rational WMatrix::row_sum(std::size_t j) const {
    Rational total = 0;
    for (std::size_t i = 0; i < cols_; ++i) total += (*this)(j, i);
    return total;
}

WMatrix w_matrix(const Automaton& automaton, TypeId alpha, std::size_t slot) {
    const auto& child = automaton.xi.at(alpha).at(slot);
    WMatrix w(automaton.types[alpha].offsets.size(), automaton.types[child.type].offsets.size());
    for (const auto& c : child.geometry.covers) {
        if (w(c.row, c.column) != 0) throw Error(ErrorKind::internal, "two letters map onto one transition entry");
        w(c.row, c.column) = automaton.spec.probs[c.letter];
    }
    return w;
}

bool EssentialClass::contains(TypeId t) const { return std::binary_search(states.begin(), states.end(), t); }

SymbolicExpression EssentialClass::i0_expression() const {
    SymbolicExpression e = theta0;
    e.push_back(eta1);
    return e;
}

namespace {

// Tarjan's algorithm; returns component index per vertex.
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::uint8_t>>& adj, std::size_t& count) {
    const std::size_t n = adj.size();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    count = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w = 0; w < n; ++w) {
            if (!adj[v][w]) continue;
            if (index[w] == unset) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = count;
            } while (w != v);
            ++count;
        }
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (index[v] == unset) visit(v);
    }
    return comp;
}

}  // namespace

EssentialClass essential_class(const Automaton& automaton) {
    const std::size_t n = automaton.size();
    std::size_t count = 0;
    const auto comp = strongly_connected(automaton.adjacency, count);

    std::vector<bool> terminal(count, true);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (automaton.adjacency[a][b] && comp[a] != comp[b]) terminal[comp[a]] = false;
        }
    }
    std::vector<std::size_t> terminals;
    for (std::size_t c = 0; c < count; ++c) {
        if (terminal[c]) terminals.push_back(c);
    }
    if (terminals.size() != 1) {
        throw ValidationError("expected exactly one essential class, found " + std::to_string(terminals.size()));
    }

    EssentialClass essential;
    for (TypeId t = 0; t < n; ++t) {
        if (comp[t] == terminals.front()) essential.states.push_back(t);
    }
    essential.eta1 = essential.states.front();
    auto sel = select_I0(automaton, essential.eta1);
    essential.n0 = sel.n0;
    essential.i0 = sel.i0;
    essential.theta0 = std::move(sel.theta0);
    return essential;
}

I0Selection select_I0(const Automaton& automaton, TypeId eta1, std::size_t depth_cap) {
    std::vector<SymbolicExpression> level{{automaton.root}};
    for (std::size_t depth = 1; depth <= depth_cap; ++depth) {
        std::vector<SymbolicExpression> next;
        for (const auto& expr : level) {
            for (const auto& slot : automaton.xi[expr.back()]) {
                SymbolicExpression e = expr;
                e.push_back(slot.type);
                if (slot.type == eta1) {
                    I0Selection sel;
                    sel.n0 = depth;
                    sel.i0 = realize(automaton, e);
                    e.pop_back();
                    sel.theta0 = std::move(e);
                    return sel;
                }
                next.push_back(std::move(e));
            }
        }
        level = std::move(next);
    }
    throw CapExceeded("no net interval of the base essential type within depth " + std::to_string(depth_cap));
}

PositivityReport positivity_check(const Automaton& automaton, const EssentialClass& essential) {
    PositivityReport report;
    for (TypeId alpha : essential.states) {
        for (std::size_t s = 0; s < automaton.xi[alpha].size(); ++s) {
            const TypeId beta = automaton.xi[alpha][s].type;
            if (!essential.contains(beta)) continue;
            const WMatrix w = w_matrix(automaton, alpha, s);
            for (std::size_t j = 0; j < w.rows(); ++j) {
                if (w.row_sum(j) == 0) report.failures.push_back({alpha, beta, j});
            }
        }
    }
    report.pass = report.failures.empty();
    return report;
}

MassVector mass_vector(const Automaton& automaton, const SymbolicExpression& expr) {
    require_admissible(automaton, expr);
    MassVector m{Rational(1)};
    for (std::size_t k = 0; k + 1 < expr.size(); ++k) {
        const WMatrix w = w_matrix(automaton, expr[k], automaton.slot_of(expr[k], expr[k + 1]));
        MassVector next(w.cols(), Rational(0));
        for (std::size_t j = 0; j < w.rows(); ++j) {
            if (m[j] == 0) continue;
            for (std::size_t i = 0; i < w.cols(); ++i) {
                if (w(j, i) != 0) next[i] += m[j] * w(j, i);
            }
        }
        m = std::move(next);
    }
    return m;
}

std::vector<OriginMass> origin_masses_brute(const IfsSpec& spec, std::size_t n, std::size_t word_cap) {
    const std::size_t letters = spec.size();
    std::size_t words = 1;
    for (std::size_t k = 0; k < n; ++k) {
        words *= letters;
        if (words > word_cap) throw CapExceeded("word enumeration above oracle cap");
    }
    std::map<FieldElement, Rational, FieldKeyLess> masses;
    Word word(n, 0);
    for (std::size_t count = 0; count < words; ++count) {
        Rational p = 1;
        for (auto letter : word) p *= spec.probs[letter];
        masses[map_point(spec, word, FieldElement(0))] += p;
        for (std::size_t pos = n; pos-- > 0;) {
            if (++word[pos] < letters) break;
            word[pos] = 0;
        }
    }
    std::vector<OriginMass> out;
    for (auto& [origin, mass] : masses) out.push_back({origin, mass});
    std::sort(out.begin(), out.end(), [](const OriginMass& x, const OriginMass& y) { return x.origin < y.origin; });
    return out;
}

}  // namespace overlapq
