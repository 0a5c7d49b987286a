#include "noether/pipeline.hpp"

#include <json.hpp>

#include <sstream>

#include "noether/errors.hpp"

namespace noether {

namespace {

using nlohmann::json;

json verdict_json(const VerdictInfo& v) {
    json j;
    j["status"] = v.status;
    j["trials"] = v.trials;
    j["max_residual"] = v.max_residual;
    if (!v.counterexample_json.empty()) {
        j["counterexample"] = json::parse(v.counterexample_json);
        j["residual_value"] = v.residual_value;
    }
    return j;
}

VerdictInfo verdict_from_json(const json& j) {
    VerdictInfo v;
    v.status = j.at("status").get<std::string>();
    v.trials = j.at("trials").get<int>();
    v.max_residual = j.at("max_residual").get<double>();
    if (j.contains("counterexample")) {
        v.counterexample_json = j.at("counterexample").dump();
        v.residual_value = j.value("residual_value", "");
    }
    return v;
}

std::string verdict_text(const VerdictInfo& v) {
    std::string s = v.status;
    if (!v.ok() && !v.residual_value.empty()) s += " (residual " + v.residual_value + ")";
    return s;
}

struct Comparer {
    const ProblemFile& p;
    ResultDocument& doc;

    void compare(const std::string& target, const Expr& computed, const Expr& expected) {
        ExpectResult r;
        r.target = target;
        r.computed = computed.str(p.axes);
        r.expected = expected.str(p.axes);
        r.matched = computed == expected;
        if (!r.matched) doc.golden_ok = false;
        doc.expects.push_back(std::move(r));
    }

    void missing(const std::string& target, const std::string& computed) {
        ExpectResult r;
        r.target = target;
        r.computed = computed;
        r.expected = "(no expect block)";
        r.matched = false;
        doc.golden_ok = false;
        doc.expects.push_back(std::move(r));
    }
};

}  // namespace

VerdictInfo verdict_info(const Verdict& v) {
    VerdictInfo info;
    info.status = to_string(v.status);
    info.trials = v.trials_used;
    info.max_residual = static_cast<double>(v.max_residual);
    if (v.counterexample) {
        json pt = json::object();
        for (const auto& [atom, val] : *v.counterexample) {
            std::string key = atom.name;
            if (atom.is_jet_like()) {
                key += "[";
                for (std::size_t i = 0; i < atom.index.axes(); ++i) {
                    if (i) key += ",";
                    key += std::to_string(atom.index[i]);
                }
                key += "]";
            }
            if (val.exact) {
                pt[key] = val.q.str();
            } else {
                pt[key] = static_cast<double>(val.f.real());
            }
        }
        info.counterexample_json = pt.dump();
        info.residual_value = v.counterexample_value;
    }
    return info;
}

ResultDocument run_pipeline(const ProblemFile& p, const PipelineOptions& opts) {
    ResultDocument doc;
    doc.name = p.name;
    doc.kind = p.kind == OperatorKind::Differential ? "continuous" : "discrete";
    doc.axes = p.axes;
    doc.deps = p.deps;
    doc.arbitrary = p.arbitrary;
    doc.seed = opts.zt.seed;
    doc.trials = opts.zt.trials;
    doc.tol = static_cast<double>(opts.zt.tol);
    Comparer cmp{p, doc};
    const bool discrete = p.kind == OperatorKind::Difference;

    // Euler-Lagrange expressions
    std::map<std::string, Expr> eulers;
    for (const std::string& dep : p.deps) {
        Expr E = discrete ? discrete_euler(p.lagrangian, dep) : euler_operator(p.lagrangian, dep);
        eulers[dep] = E;
        doc.euler.emplace_back(dep, E.str(p.axes));
        auto it = p.expect_euler.find(dep);
        if (it != p.expect_euler.end()) {
            cmp.compare("euler " + dep, E, it->second);
        } else if (opts.expect_strict) {
            cmp.missing("euler " + dep, E.str(p.axes));
        }
    }
    if (opts.stage == PipelineStage::Euler || p.arbitrary.empty() || !p.has_characteristic()) {
        return doc;
    }

    Characteristic Q;
    Q.gammas = p.arbitrary;
    for (const std::string& dep : p.deps) {
        auto it = p.characteristic.find(dep);
        Q.components[dep] = it != p.characteristic.end() ? it->second : Expr();
    }

    if (p.constraint_rows.empty()) {
        // unconstrained: Noether-II relations plus the gauge-invariance check
        std::vector<Expr> rel = discrete ? noether2_relations_disc(p.lagrangian, Q, p.deps)
                                         : noether2_relations(p.lagrangian, Q, p.deps);
        for (std::size_t r = 0; r < rel.size(); ++r) {
            RelationResult rr;
            rr.index = static_cast<int>(r + 1);
            rr.expression = rel[r].str(p.axes);
            rr.verdict = verdict_info(zero_test(rel[r], opts.zt));
            if (!rr.verdict.ok()) doc.verdicts_ok = false;
            auto it = p.expect_relation.find(rr.index);
            if (it != p.expect_relation.end()) {
                cmp.compare("relation " + std::to_string(rr.index), rel[r], it->second);
            } else if (opts.expect_strict) {
                cmp.missing("relation " + std::to_string(rr.index), rr.expression);
            }
            doc.relations.push_back(std::move(rr));
        }
        if (opts.stage == PipelineStage::Verify) {
            VariationalReport rep = discrete
                                        ? variational_report_disc(p.lagrangian, Q.components, opts.zt)
                                        : variational_report(p.lagrangian, Q.components, opts.zt);
            doc.has_gauge = true;
            doc.action_variation = rep.action_variation.str(p.axes);
            doc.gauge_verdict = verdict_info(zero_test(rep.action_variation, opts.zt));
            for (const auto& c : rep.checks) {
                doc.divergence_checks.emplace_back(c.variable, verdict_info(c.verdict));
                if (!c.verdict.ok()) doc.verdicts_ok = false;
            }
        }
        return doc;
    }

    // constrained problem
    LinearOperator C = operator_from_rows(p.constraint_rows, p.arbitrary, p.kind,
                                          p.axes.size());
    bool all_multipliers = true;
    MultiplierSet nu;
    for (std::size_t s = 0; s < p.constraint_rows.size(); ++s) {
        auto it = p.multipliers.find(static_cast<int>(s + 1));
        if (it == p.multipliers.end()) {
            all_multipliers = false;
            break;
        }
        nu.nu.push_back(it->second);
    }
    if (!all_multipliers) {
        doc.notes.push_back("constraints present but multipliers incomplete; stopping after "
                            "the Euler-Lagrange stage");
        return doc;
    }

    std::vector<Expr> res = discrete ? constrained_residuals_disc(p.lagrangian, Q, C, nu, p.deps)
                                     : constrained_residuals(p.lagrangian, Q, C, nu, p.deps);
    for (std::size_t r = 0; r < res.size(); ++r) {
        RelationResult rr;
        rr.index = static_cast<int>(r + 1);
        rr.expression = res[r].str(p.axes);
        rr.verdict = verdict_info(zero_test(res[r], opts.zt));
        if (!rr.verdict.ok()) doc.verdicts_ok = false;
        auto it = p.expect_residual.find(rr.index);
        if (it != p.expect_residual.end()) {
            cmp.compare("residual " + std::to_string(rr.index), res[r], it->second);
        } else if (opts.expect_strict) {
            cmp.missing("residual " + std::to_string(rr.index), rr.expression);
        }
        doc.residuals.push_back(std::move(rr));
    }

    if (opts.stage == PipelineStage::Relations || !doc.verdicts_ok) return doc;

    ConservationLaw cl = discrete ? conservation_law_disc(p.lagrangian, Q, C, nu, opts.zt)
                                  : conservation_law(p.lagrangian, Q, C, nu, opts.zt);
    doc.has_claw = true;
    for (std::size_t i = 0; i < p.axes.size(); ++i) {
        doc.fluxes.emplace_back(p.axes[i], cl.fluxes.components[i].str(p.axes));
        auto it = p.expect_flux.find(p.axes[i]);
        if (it != p.expect_flux.end()) {
            cmp.compare("flux " + p.axes[i], cl.fluxes.components[i], it->second);
        } else if (opts.expect_strict) {
            cmp.missing("flux " + p.axes[i], cl.fluxes.components[i].str(p.axes));
        }
    }
    doc.claw_divergence = cl.residual.str(p.axes);

    if (p.potential_link_param) {
        PotentialLink link = potential_link_check(nu.nu[0], p.deps[0], *p.potential_link_param);
        doc.has_potential_link = true;
        doc.potential_product = link.product.str(p.axes);
        doc.potential_holds = link.identity_holds;
        if (!link.identity_holds) doc.verdicts_ok = false;
    }
    return doc;
}

void require_golden(const ResultDocument& doc) {
    for (const auto& e : doc.expects) {
        if (!e.matched) {
            throw GoldenMismatch("golden mismatch at " + e.target + ": expected " + e.expected +
                                 ", computed " + e.computed);
        }
    }
}

std::string ResultDocument::to_text() const {
    std::ostringstream out;
    out << "problem " << name << " (" << kind << "; axes";
    for (const auto& a : axes) out << " " << a;
    out << ")\n";
    for (const auto& [dep, e] : euler) out << "euler " << dep << ": " << e << "\n";
    for (const auto& r : relations) {
        out << "relation " << r.index << ": " << verdict_text(r.verdict)
            << "  [" << r.expression << "]\n";
    }
    for (const auto& r : residuals) {
        out << "residual " << r.index << ": " << verdict_text(r.verdict)
            << "  [" << r.expression << "]\n";
    }
    if (has_gauge) {
        out << "action variation X(L): " << action_variation << "  -> "
            << verdict_text(gauge_verdict) << "\n";
        for (const auto& [var, v] : divergence_checks) {
            out << "divergence check E_" << var << "(X(L)): " << verdict_text(v) << "\n";
        }
    }
    if (has_claw) {
        out << "conservation law:\n";
        for (const auto& [axis, e] : fluxes) out << "  flux " << axis << ": " << e << "\n";
        out << "  divergence: " << claw_divergence << "\n";
    }
    if (has_potential_link) {
        out << "potential link: " << potential_product << "  -> "
            << (potential_holds ? "holds" : "FAILS") << "\n";
    }
    for (const auto& e : expects) {
        out << "expect " << e.target << ": " << (e.matched ? "match" : "MISMATCH");
        if (!e.matched) out << " (expected " << e.expected << ", computed " << e.computed << ")";
        out << "\n";
    }
    for (const auto& n : notes) out << "note: " << n << "\n";
    out << (ok() ? "ok" : "FAILED") << "\n";
    return out.str();
}

std::string ResultDocument::to_json() const {
    json j;
    j["problem"] = {{"name", name}, {"kind", kind},     {"axes", axes},
                    {"dependents", deps}, {"arbitrary", arbitrary}};
    j["options"] = {{"seed", seed}, {"trials", trials}, {"tol", tol}};
    json je = json::object();
    for (const auto& [dep, e] : euler) je[dep] = e;
    j["euler"] = je;
    if (!relations.empty()) {
        json ja = json::array();
        for (const auto& r : relations) {
            ja.push_back({{"index", r.index},
                          {"expression", r.expression},
                          {"verdict", verdict_json(r.verdict)}});
        }
        j["relations"] = ja;
    }
    if (!residuals.empty()) {
        json ja = json::array();
        for (const auto& r : residuals) {
            ja.push_back({{"index", r.index},
                          {"expression", r.expression},
                          {"verdict", verdict_json(r.verdict)}});
        }
        j["residuals"] = ja;
    }
    if (has_gauge) {
        json checks = json::array();
        for (const auto& [var, v] : divergence_checks) {
            checks.push_back({{"variable", var}, {"verdict", verdict_json(v)}});
        }
        j["gauge"] = {{"action_variation", action_variation},
                      {"verdict", verdict_json(gauge_verdict)},
                      {"divergence_checks", checks}};
    }
    if (has_claw) {
        json jf = json::object();
        for (const auto& [axis, e] : fluxes) jf[axis] = e;
        j["conservation_law"] = {{"fluxes", jf}, {"divergence", claw_divergence}};
    }
    if (has_potential_link) {
        j["potential_link"] = {{"product", potential_product}, {"holds", potential_holds}};
    }
    if (!expects.empty()) {
        json ja = json::array();
        for (const auto& e : expects) {
            ja.push_back({{"target", e.target},
                          {"matched", e.matched},
                          {"expected", e.expected},
                          {"computed", e.computed}});
        }
        j["expect"] = ja;
    }
    if (!notes.empty()) j["notes"] = notes;
    j["verdicts_ok"] = verdicts_ok;
    j["golden_ok"] = golden_ok;
    j["ok"] = ok();
    return j.dump(2) + "\n";
}

ResultDocument ResultDocument::from_json(const std::string& text) {
    json j = json::parse(text);
    ResultDocument d;
    const json& prob = j.at("problem");
    d.name = prob.at("name").get<std::string>();
    d.kind = prob.at("kind").get<std::string>();
    d.axes = prob.at("axes").get<std::vector<std::string>>();
    d.deps = prob.at("dependents").get<std::vector<std::string>>();
    d.arbitrary = prob.at("arbitrary").get<std::vector<std::string>>();
    const json& opts = j.at("options");
    d.seed = opts.at("seed").get<std::uint64_t>();
    d.trials = opts.at("trials").get<int>();
    d.tol = opts.at("tol").get<double>();
    for (const auto& [dep, e] : j.at("euler").items()) {
        d.euler.emplace_back(dep, e.get<std::string>());
    }
    auto read_rel = [](const json& ja, std::vector<RelationResult>& out) {
        for (const auto& r : ja) {
            RelationResult rr;
            rr.index = r.at("index").get<int>();
            rr.expression = r.at("expression").get<std::string>();
            rr.verdict = verdict_from_json(r.at("verdict"));
            out.push_back(std::move(rr));
        }
    };
    if (j.contains("relations")) read_rel(j.at("relations"), d.relations);
    if (j.contains("residuals")) read_rel(j.at("residuals"), d.residuals);
    if (j.contains("gauge")) {
        d.has_gauge = true;
        const json& g = j.at("gauge");
        d.action_variation = g.at("action_variation").get<std::string>();
        d.gauge_verdict = verdict_from_json(g.at("verdict"));
        for (const auto& c : g.at("divergence_checks")) {
            d.divergence_checks.emplace_back(c.at("variable").get<std::string>(),
                                             verdict_from_json(c.at("verdict")));
        }
    }
    if (j.contains("conservation_law")) {
        d.has_claw = true;
        const json& cl = j.at("conservation_law");
        for (const auto& [axis, e] : cl.at("fluxes").items()) {
            d.fluxes.emplace_back(axis, e.get<std::string>());
        }
        d.claw_divergence = cl.at("divergence").get<std::string>();
    }
    if (j.contains("potential_link")) {
        d.has_potential_link = true;
        d.potential_product = j.at("potential_link").at("product").get<std::string>();
        d.potential_holds = j.at("potential_link").at("holds").get<bool>();
    }
    if (j.contains("expect")) {
        for (const auto& e : j.at("expect")) {
            ExpectResult r;
            r.target = e.at("target").get<std::string>();
            r.matched = e.at("matched").get<bool>();
            r.expected = e.at("expected").get<std::string>();
            r.computed = e.at("computed").get<std::string>();
            d.expects.push_back(std::move(r));
        }
    }
    if (j.contains("notes")) d.notes = j.at("notes").get<std::vector<std::string>>();
    d.verdicts_ok = j.at("verdicts_ok").get<bool>();
    d.golden_ok = j.at("golden_ok").get<bool>();
    return d;
}

}  // namespace noether
