#include "fracbilin/problem.hpp"

#include "fracbilin/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace fracbilin {

double SpaceFunc::operator()(double x) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Gaussian: {
            const double z = (x - center) / width;
            return amp * std::exp(-z * z);
        }
        case Kind::Polynomial: {
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
            return acc;
        }
    }
    return 0.0;
}

double TimeFunc::operator()(double t) const {
    switch (kind) {
        case Kind::One: return 1.0;
        case Kind::Constant: return value;
        case Kind::Exp: return std::exp(rate * t);
        case Kind::Sine: return std::sin(freq * t + phase);
    }
    return 0.0;
}

double KernelSpec::operator()(double t, double tau, double x) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::ExpDecay: return amp * std::exp(-rate * (t - tau));
        case Kind::Gaussian: {
            const double z = (x - center) / width;
            return amp * std::exp(-z * z);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// config text parsing: a small flat-table reader ([section], key = value,
// values are numbers, quoted strings, [a, b, ...] arrays, or {k = v, ...}
// inline tables, possibly nested).  Unknown sections and keys are errors.

namespace {

struct Value {
    enum class Type { Num, Str, Table, Array } type = Type::Num;
    double num = 0.0;
    std::string str;
    std::vector<std::pair<std::string, Value>> table;
    std::vector<Value> array;
};

struct Cursor {
    const char* p;
    int line;
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
    throw ParseError("config line " + std::to_string(c.line) + ": " + msg);
}

void skip_ws(Cursor& c) {
    while (*c.p == ' ' || *c.p == '\t') ++c.p;
}

std::string parse_key(Cursor& c) {
    skip_ws(c);
    std::string k;
    while (std::isalnum(static_cast<unsigned char>(*c.p)) || *c.p == '_') k.push_back(*c.p++);
    if (k.empty()) fail(c, "expected a key");
    return k;
}

Value parse_value(Cursor& c);

Value parse_table(Cursor& c) {
    Value v;
    v.type = Value::Type::Table;
    ++c.p; // consume '{'
    skip_ws(c);
    if (*c.p == '}') {
        ++c.p;
        return v;
    }
    for (;;) {
        std::string k = parse_key(c);
        skip_ws(c);
        if (*c.p != '=') fail(c, "expected '=' in inline table");
        ++c.p;
        v.table.emplace_back(std::move(k), parse_value(c));
        skip_ws(c);
        if (*c.p == ',') {
            ++c.p;
            continue;
        }
        if (*c.p == '}') {
            ++c.p;
            return v;
        }
        fail(c, "expected ',' or '}' in inline table");
    }
}

Value parse_array(Cursor& c) {
    Value v;
    v.type = Value::Type::Array;
    ++c.p; // consume '['
    skip_ws(c);
    if (*c.p == ']') {
        ++c.p;
        return v;
    }
    for (;;) {
        v.array.push_back(parse_value(c));
        skip_ws(c);
        if (*c.p == ',') {
            ++c.p;
            continue;
        }
        if (*c.p == ']') {
            ++c.p;
            return v;
        }
        fail(c, "expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c) {
    skip_ws(c);
    if (*c.p == '{') return parse_table(c);
    if (*c.p == '[') return parse_array(c);
    if (*c.p == '"') {
        Value v;
        v.type = Value::Type::Str;
        ++c.p;
        while (*c.p && *c.p != '"') v.str.push_back(*c.p++);
        if (*c.p != '"') fail(c, "unterminated string");
        ++c.p;
        return v;
    }
    char* end = nullptr;
    double d = std::strtod(c.p, &end);
    if (end == c.p) fail(c, "expected a value");
    Value v;
    v.type = Value::Type::Num;
    v.num = d;
    c.p = end;
    return v;
}

using Section = std::vector<std::pair<std::string, Value>>;

std::map<std::string, Section> parse_sections(const std::string& text) {
    std::map<std::string, Section> out;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        // strip comment (quotes respected)
        bool in_str = false;
        std::string line;
        for (char ch : raw) {
            if (ch == '"') in_str = !in_str;
            if (ch == '#' && !in_str) break;
            line.push_back(ch);
        }
        Cursor c{line.c_str(), lineno};
        skip_ws(c);
        if (*c.p == '\0' || *c.p == '\r') continue;
        if (*c.p == '[') {
            ++c.p;
            std::string name = parse_key(c);
            skip_ws(c);
            if (*c.p != ']') fail(c, "expected ']'");
            section = name;
            out[section]; // create even if empty
            continue;
        }
        if (section.empty()) fail(c, "key outside any [section]");
        std::string k = parse_key(c);
        skip_ws(c);
        if (*c.p != '=') fail(c, "expected '=' after key '" + k + "'");
        ++c.p;
        Value v = parse_value(c);
        skip_ws(c);
        if (*c.p != '\0' && *c.p != '\r') fail(c, "trailing characters after value of '" + k + "'");
        out[section].emplace_back(std::move(k), std::move(v));
    }
    return out;
}

// schema interpretation helpers -------------------------------------------

struct TableReader {
    const std::string where;
    std::vector<std::pair<std::string, Value>> kv;
    std::vector<bool> used;

    TableReader(std::string w, const Section& s) : where(std::move(w)), kv(s), used(s.size(), false) {}
    TableReader(std::string w, const Value& v) : where(std::move(w)) {
        if (v.type != Value::Type::Table) throw ParseError(where + ": expected an inline table");
        kv = v.table;
        used.assign(kv.size(), false);
    }

    const Value* find(const std::string& k) {
        for (size_t i = 0; i < kv.size(); ++i) {
            if (kv[i].first == k) {
                if (used[i]) throw ParseError(where + ": duplicate key '" + k + "'");
                used[i] = true;
                return &kv[i].second;
            }
        }
        return nullptr;
    }

    const Value& require(const std::string& k) {
        const Value* v = find(k);
        if (!v) throw ParseError(where + ": missing key '" + k + "'");
        return *v;
    }

    double num(const std::string& k) {
        const Value& v = require(k);
        if (v.type != Value::Type::Num) throw ParseError(where + "." + k + ": expected a number");
        return v.num;
    }

    double num_or(const std::string& k, double dflt) {
        const Value* v = find(k);
        if (!v) return dflt;
        if (v->type != Value::Type::Num) throw ParseError(where + "." + k + ": expected a number");
        return v->num;
    }

    long long integer(const std::string& k) {
        double d = num(k);
        if (d != std::floor(d)) throw ParseError(where + "." + k + ": expected an integer");
        return static_cast<long long>(d);
    }

    std::string str(const std::string& k) {
        const Value& v = require(k);
        if (v.type != Value::Type::Str) throw ParseError(where + "." + k + ": expected a string");
        return v.str;
    }

    std::vector<double> numbers(const std::string& k) {
        const Value& v = require(k);
        if (v.type != Value::Type::Array) throw ParseError(where + "." + k + ": expected an array");
        std::vector<double> out;
        for (const Value& e : v.array) {
            if (e.type != Value::Type::Num) throw ParseError(where + "." + k + ": array entries must be numbers");
            out.push_back(e.num);
        }
        return out;
    }

    void finish() {
        for (size_t i = 0; i < kv.size(); ++i)
            if (!used[i]) throw ParseError(where + ": unknown key '" + kv[i].first + "'");
    }
};

SpaceFunc read_space_func(const std::string& where, const Value& v) {
    TableReader r(where, v);
    const std::string kind = r.str("kind");
    SpaceFunc f;
    if (kind == "constant") {
        f.kind = SpaceFunc::Kind::Constant;
        f.value = r.num("value");
    } else if (kind == "gaussian") {
        f.kind = SpaceFunc::Kind::Gaussian;
        f.amp = r.num("amp");
        f.center = r.num("center");
        f.width = r.num("width");
        if (!(f.width > 0.0)) throw ValidationError(where + ".width must be > 0");
    } else if (kind == "polynomial") {
        f.kind = SpaceFunc::Kind::Polynomial;
        f.coeffs = r.numbers("coeffs");
        if (f.coeffs.empty()) throw ValidationError(where + ".coeffs must be nonempty");
    } else {
        throw ParseError(where + ".kind: unknown kind '" + kind + "'");
    }
    r.finish();
    return f;
}

TimeFunc read_time_func(const std::string& where, const Value& v) {
    TableReader r(where, v);
    const std::string kind = r.str("kind");
    TimeFunc f;
    if (kind == "constant") {
        f.kind = TimeFunc::Kind::Constant;
        f.value = r.num("value");
    } else if (kind == "exp") {
        f.kind = TimeFunc::Kind::Exp;
        f.rate = r.num("rate");
    } else if (kind == "sine") {
        f.kind = TimeFunc::Kind::Sine;
        f.freq = r.num("freq");
        f.phase = r.num("phase");
    } else {
        throw ParseError(where + ".kind: unknown kind '" + kind + "'");
    }
    r.finish();
    return f;
}

DataFunc read_data_func(const std::string& where, const Value& v, bool allow_time) {
    TableReader peek(where, v);
    const std::string kind = peek.str("kind");
    DataFunc f;
    if (kind == "separable") {
        if (!allow_time)
            throw ValidationError(where + ": time dependence not allowed for this field");
        f.space = read_space_func(where + ".space", peek.require("space"));
        f.time = read_time_func(where + ".time", peek.require("time"));
        peek.finish();
    } else {
        f.space = read_space_func(where, v);
        f.time.kind = TimeFunc::Kind::One;
    }
    return f;
}

KernelSpec read_kernel(const std::string& where, const Value& v) {
    TableReader r(where, v);
    const std::string kind = r.str("kind");
    KernelSpec k;
    if (kind == "constant") {
        k.kind = KernelSpec::Kind::Constant;
        k.value = r.num("value");
    } else if (kind == "exp_decay") {
        k.kind = KernelSpec::Kind::ExpDecay;
        k.amp = r.num("amp");
        k.rate = r.num("rate");
    } else if (kind == "gaussian") {
        k.kind = KernelSpec::Kind::Gaussian;
        k.amp = r.num("amp");
        k.center = r.num("center");
        k.width = r.num("width");
        if (!(k.width > 0.0)) throw ValidationError(where + ".width must be > 0");
    } else {
        throw ParseError(where + ".kind: unknown kind '" + kind + "'");
    }
    k.sup_bound = r.num("sup_bound");
    r.finish();
    return k;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_space_func(std::ostream& os, const SpaceFunc& f) {
    switch (f.kind) {
        case SpaceFunc::Kind::Constant:
            os << "{ kind = \"constant\", value = " << fmt17(f.value) << " }";
            break;
        case SpaceFunc::Kind::Gaussian:
            os << "{ kind = \"gaussian\", amp = " << fmt17(f.amp) << ", center = " << fmt17(f.center)
               << ", width = " << fmt17(f.width) << " }";
            break;
        case SpaceFunc::Kind::Polynomial:
            os << "{ kind = \"polynomial\", coeffs = [";
            for (size_t i = 0; i < f.coeffs.size(); ++i)
                os << (i ? ", " : "") << fmt17(f.coeffs[i]);
            os << "] }";
            break;
    }
}

void emit_time_func(std::ostream& os, const TimeFunc& f) {
    switch (f.kind) {
        case TimeFunc::Kind::One:
        case TimeFunc::Kind::Constant:
            os << "{ kind = \"constant\", value = " << fmt17(f.kind == TimeFunc::Kind::One ? 1.0 : f.value) << " }";
            break;
        case TimeFunc::Kind::Exp:
            os << "{ kind = \"exp\", rate = " << fmt17(f.rate) << " }";
            break;
        case TimeFunc::Kind::Sine:
            os << "{ kind = \"sine\", freq = " << fmt17(f.freq) << ", phase = " << fmt17(f.phase) << " }";
            break;
    }
}

void emit_data_func(std::ostream& os, const DataFunc& f) {
    if (f.time.kind == TimeFunc::Kind::One) {
        emit_space_func(os, f.space);
        return;
    }
    os << "{ kind = \"separable\", space = ";
    emit_space_func(os, f.space);
    os << ", time = ";
    emit_time_func(os, f.time);
    os << " }";
}

void emit_kernel(std::ostream& os, const KernelSpec& k) {
    switch (k.kind) {
        case KernelSpec::Kind::Constant:
            os << "{ kind = \"constant\", value = " << fmt17(k.value);
            break;
        case KernelSpec::Kind::ExpDecay:
            os << "{ kind = \"exp_decay\", amp = " << fmt17(k.amp) << ", rate = " << fmt17(k.rate);
            break;
        case KernelSpec::Kind::Gaussian:
            os << "{ kind = \"gaussian\", amp = " << fmt17(k.amp) << ", center = " << fmt17(k.center)
               << ", width = " << fmt17(k.width);
            break;
    }
    os << ", sup_bound = " << fmt17(k.sup_bound) << " }";
}

} // namespace

CaseConfig parse_case(const std::string& text) {
    auto sections = parse_sections(text);
    const std::vector<std::string> known = {"domain", "cost", "data", "discretization", "optimizer"};
    for (const auto& [name, _] : sections)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ParseError("unknown section [" + name + "]");
    for (const std::string& name : known)
        if (!sections.count(name)) throw ParseError("missing section [" + name + "]");

    CaseConfig c;
    {
        TableReader r("domain", sections["domain"]);
        c.spec.domain_lo = r.num("lo");
        c.spec.domain_hi = r.num("hi");
        c.spec.omega_lo = r.num("omega_lo");
        c.spec.omega_hi = r.num("omega_hi");
        c.spec.T = r.num("T");
        c.spec.s = r.num("s");
        r.finish();
    }
    {
        TableReader r("cost", sections["cost"]);
        c.spec.alpha = r.num("alpha");
        c.spec.m = r.num("m");
        c.spec.M = r.num("M");
        r.finish();
    }
    {
        TableReader r("data", sections["data"]);
        c.spec.y0 = read_data_func("data.y0", r.require("y0"), false);
        c.spec.yd = read_data_func("data.yd", r.require("yd"), false);
        c.spec.f = read_data_func("data.f", r.require("f"), true);
        c.spec.kappa = read_kernel("data.kappa", r.require("kappa"));
        r.finish();
    }
    {
        TableReader r("discretization", sections["discretization"]);
        c.disc.n_interior = static_cast<int>(r.integer("n_interior"));
        c.disc.n_steps = static_cast<int>(r.integer("n_steps"));
        r.finish();
    }
    {
        TableReader r("optimizer", sections["optimizer"]);
        c.opt.tol = r.num("tol");
        c.opt.max_iters = static_cast<int>(r.integer("max_iters"));
        c.opt.step0 = r.num("step0");
        double seed = r.num("seed");
        if (seed < 0 || seed != std::floor(seed)) throw ParseError("optimizer.seed: expected a non-negative integer");
        c.opt.seed = static_cast<std::uint64_t>(seed);
        c.opt.armijo_c = r.num_or("armijo_c", 0.1);
        c.opt.armijo_shrink = r.num_or("armijo_shrink", 0.5);
        c.opt.large_alpha = r.num_or("large_alpha", 10.0);
        r.finish();
    }
    validate_case(c);
    return c;
}

CaseConfig load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

std::string canonical_serialize(const CaseConfig& c) {
    std::ostringstream os;
    os << "[domain]\n";
    os << "lo = " << fmt17(c.spec.domain_lo) << "\n";
    os << "hi = " << fmt17(c.spec.domain_hi) << "\n";
    os << "omega_lo = " << fmt17(c.spec.omega_lo) << "\n";
    os << "omega_hi = " << fmt17(c.spec.omega_hi) << "\n";
    os << "T = " << fmt17(c.spec.T) << "\n";
    os << "s = " << fmt17(c.spec.s) << "\n";
    os << "[cost]\n";
    os << "alpha = " << fmt17(c.spec.alpha) << "\n";
    os << "m = " << fmt17(c.spec.m) << "\n";
    os << "M = " << fmt17(c.spec.M) << "\n";
    os << "[data]\n";
    os << "y0 = ";
    emit_data_func(os, c.spec.y0);
    os << "\nyd = ";
    emit_data_func(os, c.spec.yd);
    os << "\nf = ";
    emit_data_func(os, c.spec.f);
    os << "\nkappa = ";
    emit_kernel(os, c.spec.kappa);
    os << "\n[discretization]\n";
    os << "n_interior = " << c.disc.n_interior << "\n";
    os << "n_steps = " << c.disc.n_steps << "\n";
    os << "[optimizer]\n";
    os << "tol = " << fmt17(c.opt.tol) << "\n";
    os << "max_iters = " << c.opt.max_iters << "\n";
    os << "step0 = " << fmt17(c.opt.step0) << "\n";
    os << "seed = " << c.opt.seed << "\n";
    os << "armijo_c = " << fmt17(c.opt.armijo_c) << "\n";
    os << "armijo_shrink = " << fmt17(c.opt.armijo_shrink) << "\n";
    os << "large_alpha = " << fmt17(c.opt.large_alpha) << "\n";
    return os.str();
}

void validate_case(const CaseConfig& c) {
    const ProblemSpec& s = c.spec;
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    need(s.domain_lo < s.domain_hi, "domain: lo < hi violated");
    need(s.domain_lo < s.omega_lo && s.omega_lo < s.omega_hi && s.omega_hi < s.domain_hi,
         "domain: need lo < omega_lo < omega_hi < hi");
    need(s.T > 0.0, "domain.T must be > 0");
    need(s.s > 0.0 && s.s < 1.0, "domain.s must lie in (0,1)");
    need(s.alpha > 0.0, "cost.alpha must be > 0");
    need(s.M > s.m, "cost: M > m violated");
    need(s.kappa.sup_bound >= 0.0, "data.kappa.sup_bound must be >= 0");
    need(c.disc.n_interior >= 2, "discretization.n_interior must be >= 2");
    need(c.disc.n_interior <= 1024, "discretization.n_interior exceeds the dense-storage cap 1024");
    need(c.disc.n_steps >= 1, "discretization.n_steps must be >= 1");
    need(c.opt.tol > 0.0, "optimizer.tol must be > 0");
    need(c.opt.max_iters >= 1, "optimizer.max_iters must be >= 1");
    need(c.opt.step0 > 0.0, "optimizer.step0 must be > 0");
    need(c.opt.armijo_c > 0.0 && c.opt.armijo_c < 1.0, "optimizer.armijo_c must lie in (0,1)");
    need(c.opt.armijo_shrink > 0.0 && c.opt.armijo_shrink < 1.0, "optimizer.armijo_shrink must lie in (0,1)");

    Grid grid = make_grid(s, c.disc.n_interior);
    TimeGrid tg = make_time_grid(s, c.disc.n_steps);
    int n_omega = 0;
    for (auto b : grid.omega_mask) n_omega += b ? 1 : 0;
    need(n_omega > 0, "discretization: no grid node falls inside omega");

    auto check_finite = [&](const DataFunc& fn, const char* name) {
        for (double t : tg.t)
            for (double x : grid.x)
                if (!std::isfinite(fn(t, x)))
                    throw NonFiniteSample(std::string("data.") + name + " not finite at a sample point");
    };
    check_finite(s.y0, "y0");
    check_finite(s.yd, "yd");
    check_finite(s.f, "f");

    // Kernel sweep over the (t_k, t_j, x_i) triples the stepper will touch.
    // Past 256 levels we thin the time sampling to keep load time bounded.
    const int kt = std::min(c.disc.n_steps, 256);
    for (int a = 0; a <= kt; ++a) {
        const double t = tg.T * a / kt;
        for (int b = 0; b <= a; ++b) {
            const double tau = tg.T * b / kt;
            for (double x : grid.x) {
                const double kv = s.kappa(t, tau, x);
                if (!std::isfinite(kv)) throw NonFiniteSample("data.kappa not finite at a sample point");
                if (kv < 0.0)
                    throw ValidationError("data.kappa: negative value at a sampled (t,tau,x)");
                if (std::abs(kv) > s.kappa.sup_bound * (1.0 + 1e-12))
                    throw ValidationError("data.kappa: sampled value exceeds declared sup_bound");
            }
        }
    }
}

Grid make_grid(const ProblemSpec& spec, int n_interior) {
    Grid g = Grid::make(spec.domain_lo, spec.domain_hi, n_interior);
    g.omega_mask.resize(g.n);
    for (int i = 0; i < g.n; ++i)
        g.omega_mask[i] = (spec.omega_lo < g.x[i] && g.x[i] < spec.omega_hi) ? 1 : 0;
    return g;
}

Field sample_field(const DataFunc& func, const Grid& grid, const TimeGrid& tg) {
    Field out(tg.n_steps + 1, grid.n);
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < grid.n; ++i) {
            const double v = func(tg.t[k], grid.x[i]);
            if (!std::isfinite(v)) throw NonFiniteSample("sample_field: non-finite value");
            out(k, i) = v;
        }
    return out;
}

Eigen::VectorXd sample_space(const DataFunc& func, const Grid& grid, double t) {
    Eigen::VectorXd out(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double v = func(t, grid.x[i]);
        if (!std::isfinite(v)) throw NonFiniteSample("sample_space: non-finite value");
        out[i] = v;
    }
    return out;
}

ControlField project_control(const Field& raw, const ProblemSpec& spec, const Grid& grid) {
    if (raw.cols() != grid.n) throw DimensionMismatch("project_control: column count != n_interior");
    ControlField out = Field::Zero(raw.rows(), raw.cols());
    for (int k = 0; k < raw.rows(); ++k)
        for (int i = 0; i < grid.n; ++i)
            if (grid.omega_mask[i])
                out(k, i) = std::min(spec.M, std::max(spec.m, raw(k, i)));
    return out;
}

ControlField random_control(const ProblemSpec& spec, const Grid& grid, const TimeGrid& tg, Rng& rng) {
    ControlField out = zero_field(tg, grid);
    for (int k = 0; k <= tg.n_steps; ++k)
        for (int i = 0; i < grid.n; ++i)
            if (grid.omega_mask[i]) out(k, i) = rng.uniform(spec.m, spec.M);
    return out;
}

double sup_abs(const Field& f) {
    return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

double sup_abs_space(const DataFunc& f, const Grid& grid) {
    double m = 0.0;
    for (double x : grid.x) m = std::max(m, std::abs(f(0.0, x)));
    return m;
}

double sup_abs_spacetime(const DataFunc& f, const Grid& grid, const TimeGrid& tg) {
    double m = 0.0;
    for (double t : tg.t)
        for (double x : grid.x) m = std::max(m, std::abs(f(t, x)));
    return m;
}

} // namespace fracbilin
