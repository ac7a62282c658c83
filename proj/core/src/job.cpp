#include "cpdcert/job.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpdcert/certify.hpp"
#include "cpdcert/conditions.hpp"
#include "cpdcert/tensor.hpp"

namespace cpdcert {
namespace {

using nlohmann::json;

struct RawEntry {
    bool is_string = false;
    std::string text;
    double num = 0.0;
};

struct RawMatrix {
    std::vector<std::vector<RawEntry>> rows;

    bool empty() const { return rows.empty(); }
    bool has_string() const {
        for (const auto& r : rows)
            for (const auto& e : r)
                if (e.is_string) return true;
        return false;
    }
};

struct RawInput {
    std::optional<RawMatrix> a, b, c;
};

[[noreturn]] void input_error(const std::string& msg) { throw std::invalid_argument(msg); }

RawMatrix raw_from_json(const json& j, const std::string& name) {
    if (!j.is_array()) input_error("matrix " + name + " must be an array of rows");
    RawMatrix m;
    std::size_t cols = 0;
    for (const auto& row : j) {
        if (!row.is_array()) input_error("matrix " + name + ": each row must be an array");
        std::vector<RawEntry> r;
        for (const auto& v : row) {
            RawEntry e;
            if (v.is_string()) {
                e.is_string = true;
                e.text = v.get<std::string>();
            } else if (v.is_number()) {
                e.num = v.get<double>();
            } else {
                input_error("matrix " + name + ": entries must be numbers or strings");
            }
            r.push_back(std::move(e));
        }
        if (m.rows.empty()) cols = r.size();
        else if (r.size() != cols) input_error("matrix " + name + ": ragged rows");
        m.rows.push_back(std::move(r));
    }
    if (m.rows.empty() || cols == 0) input_error("matrix " + name + " is empty");
    return m;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool looks_numeric(const std::string& t) {
    if (t.empty()) return false;
    bool digit = false;
    for (char ch : t) {
        if (std::isdigit(static_cast<unsigned char>(ch))) digit = true;
        else if (ch != '+' && ch != '-' && ch != '.' && ch != 'e' && ch != 'E') return false;
    }
    return digit;
}

RawMatrix raw_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) input_error("cannot open '" + path + "'");
    RawMatrix m;
    std::string line;
    std::size_t lineno = 0;
    std::size_t cols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<RawEntry> row;
        std::stringstream ss(t);
        std::string cell;
        std::size_t colno = 0;
        while (std::getline(ss, cell, ',')) {
            ++colno;
            const std::string v = trim(cell);
            if (v.empty())
                input_error(path + ":" + std::to_string(lineno) + ":" + std::to_string(colno) +
                            ": empty cell");
            RawEntry e;
            if (looks_numeric(v)) {
                try {
                    e.num = std::stod(v);
                } catch (const std::exception&) {
                    input_error(path + ":" + std::to_string(lineno) + ":" + std::to_string(colno) +
                                ": bad number '" + v + "'");
                }
            } else {
                e.is_string = true; // exact literal, e.g. "3/4"
                e.text = v;
            }
            row.push_back(std::move(e));
        }
        if (m.rows.empty()) cols = row.size();
        else if (row.size() != cols)
            input_error(path + ":" + std::to_string(lineno) + ": ragged row");
        m.rows.push_back(std::move(row));
    }
    if (m.rows.empty()) input_error(path + ": no data rows");
    return m;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        input_error(path + ": " + e.what());
    }
    return j;
}

RawInput load_input(const std::vector<std::string>& paths) {
    if (paths.empty()) input_error("no input file given");
    RawInput raw;
    if (paths.size() == 1 && ends_with(paths[0], ".json")) {
        const json j = load_json_file(paths[0]);
        if (!j.is_object()) input_error(paths[0] + ": top level must be an object");
        if (j.contains("A")) raw.a = raw_from_json(j.at("A"), "A");
        if (j.contains("B")) raw.b = raw_from_json(j.at("B"), "B");
        if (j.contains("C")) raw.c = raw_from_json(j.at("C"), "C");
        if (!raw.a && !raw.b && !raw.c) input_error(paths[0] + ": no matrix A, B or C found");
        return raw;
    }
    // CSV form: one file per matrix, in A, B, C order.
    if (paths.size() > 3) input_error("at most three CSV files (A, B, C)");
    raw.a = raw_from_csv(paths[0]);
    if (paths.size() > 1) raw.b = raw_from_csv(paths[1]);
    if (paths.size() > 2) raw.c = raw_from_csv(paths[2]);
    return raw;
}

template <class S>
Matrix<S> materialize(const RawMatrix& raw) {
    Matrix<S> m(static_cast<int>(raw.rows.size()), static_cast<int>(raw.rows.front().size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const RawEntry& e = raw.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if constexpr (std::is_same_v<S, Rat>) {
                m(i, j) = e.is_string ? parse_rational(e.text) : rational_from_double(e.num);
            } else {
                m(i, j) = e.is_string ? to_double(parse_rational(e.text)) : e.num;
            }
        }
    return m;
}

bool choose_exact(const RawInput& raw, Backend backend) {
    if (backend == Backend::Exact) return true;
    if (backend == Backend::Float) return false;
    bool any_string = false;
    for (const auto* m : {&raw.a, &raw.b, &raw.c})
        if (*m && (*m)->has_string()) any_string = true;
    return any_string;
}

template <class S>
json scalar_json(const S& v) {
    if constexpr (std::is_same_v<S, Rat>) return rational_to_string(v);
    else return v;
}

template <class S>
json matrix_json(const Matrix<S>& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(scalar_json(m(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

template <class S>
json vector_json(const std::vector<S>& v) {
    json out = json::array();
    for (const auto& e : v) out.push_back(scalar_json(e));
    return out;
}

json subset_json(const std::vector<int>& s) {
    json out = json::array();
    for (int v : s) out.push_back(v);
    return out;
}

template <class S>
json verdict_json(const ConditionVerdict<S>& v) {
    json out;
    out["condition"] = std::string(to_string(v.condition)) + std::to_string(v.m);
    out["m"] = v.m;
    out["status"] = to_string(v.status);
    json prov = json::array();
    for (const auto& p : v.provenance) prov.push_back(p);
    out["provenance"] = std::move(prov);
    json witness;
    if (v.witness_d) witness["d"] = vector_json(*v.witness_d);
    if (v.witness_x) witness["x"] = vector_json(*v.witness_x);
    if (v.witness_subset) witness["subset"] = subset_json(*v.witness_subset);
    if (v.witness_delta) witness["delta"] = *v.witness_delta;
    out["witness"] = witness.is_null() ? json(nullptr) : witness;
    return out;
}

template <class S>
json certificate_json(const UniquenessCertificate<S>& cert) {
    json out;
    out["conclusion"] = to_string(cert.conclusion);
    out["target_mode"] = cert.target_mode;
    out["m"] = cert.m_used;
    out["reason"] = cert.reason;
    json chain = json::array();
    for (const auto& step : cert.chain) {
        json s;
        s["rule"] = step.rule;
        s["detail"] = step.detail;
        s["verdict"] = to_string(step.verdict);
        s["fired"] = step.fired;
        chain.push_back(std::move(s));
    }
    out["chain"] = std::move(chain);
    json verdicts = json::array();
    for (const auto& v : cert.verdicts) verdicts.push_back(verdict_json(v));
    out["verdicts"] = std::move(verdicts);
    json repro;
    repro["backend"] = cert.backend;
    repro["tolerance"] = cert.tolerance;
    repro["seed"] = cert.seed;
    repro["cap"] = cert.cap;
    repro["version"] = cert.version;
    repro["matrix_hashes"] = {{"A", cert.hash_a}, {"B", cert.hash_b}, {"C", cert.hash_c}};
    out["reproducibility"] = std::move(repro);
    return out;
}

template <class S>
struct TypedInput {
    std::optional<Matrix<S>> a, b, c;

    const Matrix<S>& need(char which) const {
        const std::optional<Matrix<S>>* m =
            which == 'A' ? &a : (which == 'B' ? &b : &c);
        if (!*m) input_error(std::string("matrix ") + which + " is required for this command");
        return **m;
    }
    const Matrix<S>& by_target(int target) const {
        return need(target == 1 ? 'A' : (target == 2 ? 'B' : 'C'));
    }
};

template <class S>
TypedInput<S> materialize_all(const RawInput& raw) {
    TypedInput<S> t;
    if (raw.a) t.a = materialize<S>(*raw.a);
    if (raw.b) t.b = materialize<S>(*raw.b);
    if (raw.c) t.c = materialize<S>(*raw.c);
    return t;
}

CheckOptions make_options(const JobSpec& job) {
    CheckOptions opts;
    opts.tolerance = job.tolerance;
    opts.cap = job.cap;
    opts.seed = job.seed;
    return opts;
}

template <class S>
json settings_json(const JobSpec& job) {
    json s;
    s["backend"] = std::is_same_v<S, Rat> ? "exact" : "float";
    s["tolerance"] = job.tolerance;
    s["seed"] = job.seed;
    s["cap"] = job.cap;
    s["target"] = job.target;
    s["m"] = job.m_override ? json(*job.m_override) : json(nullptr);
    return s;
}

template <class S>
json inputs_json(const TypedInput<S>& in) {
    json out;
    if (in.a) out["A"] = matrix_json(*in.a);
    if (in.b) out["B"] = matrix_json(*in.b);
    if (in.c) out["C"] = matrix_json(*in.c);
    return out;
}

template <class S>
json analysis_json(const FactorTriple<S>& f, const CheckOptions& opts) {
    json out;
    out["shapes"] = {{"I", f.a.rows()}, {"J", f.b.rows()}, {"K", f.c.rows()}, {"R", f.terms()}};
    out["ranks"] = {{"A", rank(f.a, opts)}, {"B", rank(f.b, opts)}, {"C", rank(f.c, opts)}};
    out["k_ranks"] = {{"A", k_rank(f.a, opts)}, {"B", k_rank(f.b, opts)}, {"C", k_rank(f.c, opts)}};
    out["m"] = m_for_C(f.terms(), f.c, opts);
    return out;
}

template <class S>
json conditions_json(const FactorTriple<S>& f, int m, const CheckOptions& opts) {
    json out = json::array();
    out.push_back(verdict_json(check_Km(f.a, f.b, m, opts)));
    out.push_back(verdict_json(check_Hm(f.a, f.b, m, opts)));
    const bool compounds_ok = m >= 1 && m <= std::min({f.a.rows(), f.b.rows(), f.terms()});
    if (compounds_ok) {
        out.push_back(verdict_json(check_Cm(f.a, f.b, m, opts)));
        const auto um = check_Um(f.a, f.b, m, opts);
        out.push_back(verdict_json(um));
        out.push_back(verdict_json(check_Wm(f.a, f.b, f.c, m, opts, &um)));
    } else {
        for (Cond cc : {Cond::Cm, Cond::Um, Cond::Wm}) {
            ConditionVerdict<S> v;
            v.condition = cc;
            v.m = m;
            v.status = Status::Undetermined;
            v.provenance.push_back("compound matrices undefined: m exceeds min(I, J, R)");
            out.push_back(verdict_json(v));
        }
    }
    return out;
}

std::string render(const json& report, OutputFormat format);

/// Core dispatch shared by run() and replay.
template <class S>
json run_typed(const JobSpec& job, const TypedInput<S>& in) {
    const CheckOptions opts = make_options(job);
    json report;
    report["version"] = kVersion;
    report["command"] = job.command;
    report["settings"] = settings_json<S>(job);
    report["inputs"] = inputs_json(in);

    if (job.command == "krank") {
        const Matrix<S>& m = in.by_target(job.target);
        report["matrix"] = job.target == 1 ? "A" : (job.target == 2 ? "B" : "C");
        report["k_rank"] = k_rank(m, opts);
        report["rank"] = rank(m, opts);
        return report;
    }
    if (job.command == "compound") {
        if (!job.m_override) input_error("compound requires --m");
        const Matrix<S>& m = in.by_target(job.target);
        const auto cm = compound(m, *job.m_override, opts.cap);
        report["matrix"] = job.target == 1 ? "A" : (job.target == 2 ? "B" : "C");
        report["m"] = *job.m_override;
        report["rows"] = cm.data.rows();
        report["cols"] = cm.data.cols();
        json row_labels = json::array(), col_labels = json::array();
        CombinadicTable rt(cm.source_rows, cm.order, opts.cap);
        CombinadicTable ct(cm.source_cols, cm.order, opts.cap);
        for (std::int64_t i = 1; i <= rt.count(); ++i) row_labels.push_back(subset_json(rt.unrank(i)));
        for (std::int64_t j = 1; j <= ct.count(); ++j) col_labels.push_back(subset_json(ct.unrank(j)));
        report["row_labels"] = std::move(row_labels);
        report["col_labels"] = std::move(col_labels);
        report["entries"] = matrix_json(cm.data);
        report["rank"] = rank(cm.data, opts);
        return report;
    }
    if (job.command == "hprofile") {
        const auto profile = h_profile(in.need('A'), in.need('B'), opts);
        json values = json::array(), argmin = json::array();
        for (int v : profile.values) values.push_back(v);
        for (const auto& s : profile.argmin) argmin.push_back(subset_json(s));
        report["H"] = std::move(values);
        report["argmin_subsets"] = std::move(argmin);
        return report;
    }

    FactorTriple<S> f{in.need('A'), in.need('B'), in.need('C')};
    f.validate();
    if (job.m_override) {
        const int m = *job.m_override;
        if (m < 1 || m > std::min({f.a.rows(), f.b.rows(), f.terms()}))
            input_error("--m must satisfy 1 <= m <= min(I, J, R)");
    }
    const FactorTriple<S> rot = mode_rotate(f, job.target);

    if (job.command == "certify-third") {
        auto cert = certify_third(rot.a, rot.b, rot.c, opts);
        cert.target_mode = job.target;
        report["analysis"] = analysis_json(rot, opts);
        report["certificate"] = certificate_json(cert);
        return report;
    }
    if (job.command == "certify-overall") {
        const auto cert = certify_overall(f.a, f.b, f.c, opts);
        report["analysis"] = analysis_json(f, opts);
        report["certificate"] = certificate_json(cert);
        return report;
    }
    if (job.command == "analyze") {
        json analysis = analysis_json(rot, opts);
        const int m = job.m_override ? *job.m_override : m_for_C(rot.terms(), rot.c, opts);
        analysis["conditions_at_m"] = m;
        analysis["conditions"] = conditions_json(rot, m, opts);
        report["analysis"] = std::move(analysis);
        auto third = certify_third(rot.a, rot.b, rot.c, opts);
        third.target_mode = job.target;
        report["certificates"] = {{"third_factor", certificate_json(third)},
                                  {"overall", certificate_json(certify_overall(f.a, f.b, f.c, opts))}};
        return report;
    }
    input_error("unknown command '" + job.command + "'");
}

template <class S>
json run_match(const JobSpec& job) {
    if (job.inputs.size() != 2) input_error("match requires two input files");
    const auto raw1 = load_input({job.inputs[0]});
    const auto raw2 = load_input({job.inputs[1]});
    const auto in1 = materialize_all<S>(raw1);
    const auto in2 = materialize_all<S>(raw2);
    const CheckOptions opts = make_options(job);
    json report;
    report["version"] = kVersion;
    report["command"] = job.command;
    report["settings"] = settings_json<S>(job);
    report["inputs"] = {{"first", inputs_json(in1)}, {"second", inputs_json(in2)}};
    EquivalenceReport<S> eq;
    if (in1.b || in1.c || in2.b || in2.c) {
        FactorTriple<S> f1{in1.need('A'), in1.need('B'), in1.need('C')};
        FactorTriple<S> f2{in2.need('A'), in2.need('B'), in2.need('C')};
        eq = match_factors(f1, f2, opts);
    } else {
        eq = match_single_factor(in1.need('A'), in2.need('A'), opts);
    }
    report["matched"] = eq.matched;
    report["permutation"] = eq.permutation ? subset_json(*eq.permutation) : json(nullptr);
    report["scalings"] = json(nullptr);
    if (eq.matched && eq.scale_c) {
        json s;
        if (eq.scale_a) s["A"] = vector_json(*eq.scale_a);
        if (eq.scale_b) s["B"] = vector_json(*eq.scale_b);
        s["C"] = vector_json(*eq.scale_c);
        report["scalings"] = std::move(s);
    }
    return report;
}

RawMatrix raw_from_report_matrix(const json& j) { return raw_from_json(j, "stored"); }

json run_replay(const JobSpec& job) {
    const json stored = load_json_file(*job.replay_path);
    if (!stored.is_object() || !stored.contains("command") || !stored.contains("inputs") ||
        !stored.contains("settings"))
        input_error("replay: not a report file");
    JobSpec re;
    re.command = stored.at("command").get<std::string>();
    const json& settings = stored.at("settings");
    re.backend = settings.at("backend").get<std::string>() == "exact" ? Backend::Exact : Backend::Float;
    re.tolerance = settings.at("tolerance").get<double>();
    re.seed = settings.at("seed").get<std::uint64_t>();
    re.cap = settings.at("cap").get<std::int64_t>();
    re.target = settings.at("target").get<int>();
    if (!settings.at("m").is_null()) re.m_override = settings.at("m").get<int>();
    re.format = OutputFormat::Json;

    RawInput raw;
    const json& inputs = stored.at("inputs");
    if (inputs.contains("A")) raw.a = raw_from_report_matrix(inputs.at("A"));
    if (inputs.contains("B")) raw.b = raw_from_report_matrix(inputs.at("B"));
    if (inputs.contains("C")) raw.c = raw_from_report_matrix(inputs.at("C"));

    json fresh;
    if (re.backend == Backend::Exact) fresh = run_typed(re, materialize_all<Rat>(raw));
    else fresh = run_typed(re, materialize_all<double>(raw));

    auto conclusions = [](const json& rep) {
        json out = json::array();
        if (rep.contains("certificate"))
            out.push_back(rep.at("certificate").at("conclusion"));
        if (rep.contains("certificates"))
            for (const auto& [key, cert] : rep.at("certificates").items())
                out.push_back(json{{key, cert.at("conclusion")}});
        if (rep.contains("k_rank")) out.push_back(rep.at("k_rank"));
        if (rep.contains("matched")) out.push_back(rep.at("matched"));
        return out;
    };
    const bool match = conclusions(stored) == conclusions(fresh);
    json report;
    report["command"] = "replay";
    report["replay"] = {{"source", *job.replay_path},
                        {"match", match},
                        {"stored_conclusions", conclusions(stored)},
                        {"fresh_conclusions", conclusions(fresh)}};
    report["version"] = kVersion;
    return report;
}

void render_text_value(const json& v, const std::string& indent, std::ostringstream& os);

void render_text_object(const json& obj, const std::string& indent, std::ostringstream& os) {
    for (const auto& [key, value] : obj.items()) {
        if (value.is_object() || value.is_array()) {
            os << indent << key << ":\n";
            render_text_value(value, indent + "  ", os);
        } else {
            os << indent << key << ": " << value.dump() << "\n";
        }
    }
}

void render_text_value(const json& v, const std::string& indent, std::ostringstream& os) {
    if (v.is_object()) {
        render_text_object(v, indent, os);
    } else if (v.is_array()) {
        bool scalar_only = true;
        for (const auto& e : v)
            if (e.is_object() || e.is_array()) scalar_only = false;
        if (scalar_only) {
            os << indent << v.dump() << "\n";
        } else {
            for (const auto& e : v) {
                os << indent << "-\n";
                render_text_value(e, indent + "  ", os);
            }
        }
    } else {
        os << indent << v.dump() << "\n";
    }
}

std::string render(const json& report, OutputFormat format) {
    if (format == OutputFormat::Json) return report.dump(2) + "\n";
    std::ostringstream os;
    render_text_object(report, "", os);
    return os.str();
}

} // namespace

RunResult run(const JobSpec& job) {
    RunResult result;
    try {
        json report;
        if (job.replay_path) {
            report = run_replay(job);
            result.output = render(report, job.format);
            result.exit_code = report.at("replay").at("match").get<bool>() ? 0 : 1;
            return result;
        }
        if (job.command == "match") {
            if (job.inputs.size() != 2) input_error("match requires two input files");
            const auto raw1 = load_input({job.inputs[0]});
            const auto raw2 = load_input({job.inputs[1]});
            const bool exact = choose_exact(raw1, job.backend) || choose_exact(raw2, job.backend);
            const bool use_exact = job.backend == Backend::Float ? false
                                   : job.backend == Backend::Exact ? true
                                                                   : exact;
            report = use_exact ? run_match<Rat>(job) : run_match<double>(job);
        } else {
            const RawInput raw = load_input(job.inputs);
            if (choose_exact(raw, job.backend))
                report = run_typed(job, materialize_all<Rat>(raw));
            else
                report = run_typed(job, materialize_all<double>(raw));
        }
        result.output = render(report, job.format);
        result.exit_code = 0;
        return result;
    } catch (const resource_error& e) {
        json err;
        err["error"] = e.what();
        err["kind"] = "resource_cap";
        result.output = render(err, job.format);
        result.exit_code = 2;
        return result;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        err["kind"] = "input";
        result.output = render(err, job.format);
        result.exit_code = 1;
        return result;
    }
}

} // namespace cpdcert
