#include "overlapq/ifs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "overlapq/errors.hpp"

namespace overlapq {

std::vector<std::string> validate(const IfsSpec& spec) {
    std::vector<std::string> violations;
    if (spec.rho.sign() <= 0 || spec.rho >= FieldElement(1)) violations.push_back("ratio: rho must lie in (0, 1)");
    const std::size_t n = spec.offsets.size();
    if (n < 2) violations.push_back("size: at least two maps are required");
    if (spec.probs.size() != n) violations.push_back("probabilities: one probability per map is required");
    if (n >= 1 && spec.offsets.front().sign() != 0) violations.push_back("endpoint: b_1 must be 0");
    if (n >= 2 && spec.offsets.back() != FieldElement(1) - spec.rho) {
        violations.push_back("endpoint: b_N must equal 1 - rho");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(spec.offsets[i - 1] < spec.offsets[i])) {
            violations.push_back("ordering: offsets must be strictly increasing (b_" + std::to_string(i) + " >= b_" +
                                 std::to_string(i + 1) + ")");
            break;
        }
    }
    Rational total = 0;
    bool positive = true;
    for (const auto& p : spec.probs) {
        total += p;
        if (p <= 0) positive = false;
    }
    if (!positive) violations.push_back("simplex: every probability must be positive");
    if (total != 1) violations.push_back("simplex: probabilities sum to " + format(total) + ", not 1");
    return violations;
}

void require_valid(const IfsSpec& spec) {
    auto violations = validate(spec);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid IFS:";
    for (const auto& v : violations) msg << "\n  " << v;
    throw ValidationError(msg.str());
}

FieldElement map_point(const IfsSpec& spec, const Word& word, const FieldElement& x) {
    // innermost map first: f_{w1} o ... o f_{wn}
    FieldElement y = x;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        y = spec.rho * y + spec.offsets.at(*it);
    }
    return y;
}

Segment cylinder_interval(const IfsSpec& spec, const Word& word) {
    return {map_point(spec, word, FieldElement(0)), map_point(spec, word, FieldElement(1))};
}

IfsSpec rescale_to_unit_hull(const FieldElement& rho, const std::vector<FieldElement>& translations,
                             std::vector<Rational> probs) {
    if (translations.size() < 2) throw ValidationError("size: at least two maps are required");
    for (std::size_t i = 1; i < translations.size(); ++i) {
        if (!(translations[i - 1] < translations[i])) {
            throw ValidationError("ordering: translations must be strictly increasing");
        }
    }
    // hull of the attractor is [c_1/(1-rho), c_N/(1-rho)]
    const FieldElement width = (translations.back() - translations.front()) / (FieldElement(1) - rho);
    IfsSpec spec;
    spec.rho = rho;
    for (const auto& c : translations) spec.offsets.push_back((c - translations.front()) / width);
    spec.probs = std::move(probs);
    return spec;
}

FtcProbe ftc_probe(const IfsSpec& spec, std::size_t depth_cap) {
    require_valid(spec);
    const FieldElement one(1);
    std::vector<FieldElement> shifts;
    std::set<FieldElement, FieldKeyLess> distinct_shifts;
    for (const auto& bh : spec.offsets) {
        for (const auto& bk : spec.offsets) distinct_shifts.insert(bh - bk);
    }
    shifts.assign(distinct_shifts.begin(), distinct_shifts.end());

    auto as_gamma = [](const std::set<FieldElement, FieldKeyLess>& signed_diffs) {
        std::set<FieldElement, FieldKeyLess> magnitudes;
        for (const auto& x : signed_diffs) magnitudes.insert(x.abs());
        std::vector<FieldElement> out(magnitudes.begin(), magnitudes.end());
        std::sort(out.begin(), out.end());
        return out;
    };

    FtcProbe probe;
    std::set<FieldElement, FieldKeyLess> current{FieldElement(0)};
    probe.levels.push_back(as_gamma(current));
    for (std::size_t n = 1; n <= depth_cap; ++n) {
        std::set<FieldElement, FieldKeyLess> next;
        for (const auto& x : current) {
            for (const auto& s : shifts) {
                FieldElement y = (x + s) / spec.rho;
                if (y.abs() <= one) next.insert(std::move(y));
            }
        }
        const bool same = next.size() == current.size() &&
                          std::equal(next.begin(), next.end(), current.begin(),
                                     [](const FieldElement& a, const FieldElement& b) { return a == b; });
        current = std::move(next);
        probe.levels.push_back(as_gamma(current));
        if (same) {
            probe.saturated = true;
            probe.saturation_level = n - 1;
            break;
        }
    }
    return probe;
}

bool satisfies_osc_geometrically(const IfsSpec& spec) {
    for (std::size_t i = 1; i < spec.offsets.size(); ++i) {
        if (spec.offsets[i] - spec.offsets[i - 1] < spec.rho) return false;
    }
    return true;
}

}  // namespace overlapq
