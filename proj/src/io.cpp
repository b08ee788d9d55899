#include "scnd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "scnd/error.hpp"
#include "scnd/rng.hpp"

namespace scnd {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& field(const json& doc, const std::string& parent, const char* name) {
    if (!doc.is_object()) bad(parent.empty() ? "document" : parent, "expected an object");
    const auto it = doc.find(name);
    if (it == doc.end()) bad(parent.empty() ? name : parent + "." + name, "missing");
    return *it;
}

std::string join(const std::string& parent, const char* name) { return parent.empty() ? name : parent + "." + name; }

double number(const json& v, const std::string& path) {
    if (!v.is_number()) bad(path, "expected a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(path, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::vector<double> vec(const json& doc, const std::string& parent, const char* name, std::size_t n) {
    const std::string path = join(parent, name);
    const json& v = field(doc, parent, name);
    if (!v.is_array() || v.size() != n) bad(path, "expected an array of " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Grid grid(const json& doc, const std::string& parent, const char* name, std::size_t rows, std::size_t cols) {
    const std::string path = join(parent, name);
    const json& v = field(doc, parent, name);
    if (!v.is_array() || v.size() != rows) bad(path, "expected " + std::to_string(rows) + " rows");
    Grid g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!v[r].is_array() || v[r].size() != cols) bad(rp, "expected " + std::to_string(cols) + " columns");
        for (std::size_t c = 0; c < cols; ++c) g(r, c) = number(v[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return g;
}

Grid grid_or_zero(const json& doc, const char* name, std::size_t rows, std::size_t cols) {
    if (!doc.contains(name)) return Grid(rows, cols);
    return grid(doc, "", name, rows, cols);
}

json rows(const Grid& g) {
    json out = json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json bit_rows(const std::vector<std::uint8_t>& v, std::size_t rows_n, std::size_t cols) {
    json out = json::array();
    for (std::size_t r = 0; r < rows_n; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < cols; ++c) row.push_back(static_cast<int>(v[r * cols + c]));
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::uint8_t> bits(const Grid& g, const std::string& path) {
    std::vector<std::uint8_t> out;
    for (double v : g.flat()) {
        if (v != 0.0 && v != 1.0) bad(path, "expected 0 or 1 entries");
        out.push_back(v != 0.0);
    }
    return out;
}

// NaN and infinities have no JSON spelling; they are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

MilpStatus parse_status(const std::string& s) {
    for (auto st : {MilpStatus::Optimal, MilpStatus::FeasibleWithGap, MilpStatus::Infeasible, MilpStatus::TimeLimit})
        if (s == to_string(st)) return st;
    bad("status", "unknown solver status '" + s + "'");
}

}  // namespace

json to_json(const InstanceSpec& s) {
    json d;
    d["n_plants"] = s.n_plants;
    d["n_warehouses"] = s.n_warehouses;
    d["n_customers"] = s.n_customers;
    d["p_upper"] = s.p_upper;
    d["p_lower"] = s.p_lower;
    d["q_upper_ij"] = rows(s.q_upper_ij);
    d["q_upper_jk"] = rows(s.q_upper_jk);
    d["q_lower_ij"] = rows(s.q_lower_ij);
    d["q_lower_jk"] = rows(s.q_lower_jk);
    d["w_upper"] = s.w_upper;
    d["inventory"] = s.inventory;
    json demand = json::array();
    for (const auto& dm : s.demand) demand.push_back({{"mu", dm.mu}, {"sigma", dm.sigma}});
    d["demand"] = std::move(demand);
    d["a"] = s.a;
    d["beta"] = rows(s.beta);
    d["gamma"] = rows(s.gamma);
    d["h"] = rows(s.h);
    d["t_upper"] = s.t_upper;
    d["t_lower"] = s.t_lower;
    const auto& c = s.costs;
    d["costs"] = {{"c_prod", c.c_prod},         {"c_var_ij", rows(c.c_var_ij)}, {"c_fix_ij", rows(c.c_fix_ij)},
                  {"c_var_jk", rows(c.c_var_jk)}, {"c_fix_jk", rows(c.c_fix_jk)}, {"c_install", c.c_install},
                  {"c_po", rows(c.c_po)},         {"c_pu", rows(c.c_pu)}};
    return d;
}

InstanceSpec instance_from_json(const json& d) {
    const std::size_t I = count(field(d, "", "n_plants"), "n_plants");
    const std::size_t J = count(field(d, "", "n_warehouses"), "n_warehouses");
    const std::size_t K = count(field(d, "", "n_customers"), "n_customers");
    InstanceSpec s = make_zero_instance(I, J, K);
    s.p_upper = vec(d, "", "p_upper", I);
    s.p_lower = vec(d, "", "p_lower", I);
    s.q_upper_ij = grid(d, "", "q_upper_ij", I, J);
    s.q_upper_jk = grid(d, "", "q_upper_jk", J, K);
    s.q_lower_ij = grid_or_zero(d, "q_lower_ij", I, J);
    s.q_lower_jk = grid_or_zero(d, "q_lower_jk", J, K);
    s.w_upper = vec(d, "", "w_upper", J);
    s.inventory = vec(d, "", "inventory", J);
    const json& demand = field(d, "", "demand");
    if (!demand.is_array() || demand.size() != K) bad("demand", "expected " + std::to_string(K) + " entries");
    for (std::size_t k = 0; k < K; ++k) {
        const std::string p = "demand[" + std::to_string(k) + "]";
        s.demand[k].mu = number(field(demand[k], p, "mu"), p + ".mu");
        s.demand[k].sigma = number(field(demand[k], p, "sigma"), p + ".sigma");
    }
    s.a = vec(d, "", "a", J);
    s.beta = grid(d, "", "beta", J, K);
    s.gamma = grid(d, "", "gamma", J, K);
    s.h = grid(d, "", "h", J, K);
    s.t_upper = number(field(d, "", "t_upper"), "t_upper");
    s.t_lower = number(field(d, "", "t_lower"), "t_lower");
    const json& c = field(d, "", "costs");
    s.costs.c_prod = vec(c, "costs", "c_prod", I);
    s.costs.c_var_ij = grid(c, "costs", "c_var_ij", I, J);
    s.costs.c_fix_ij = grid(c, "costs", "c_fix_ij", I, J);
    s.costs.c_var_jk = grid(c, "costs", "c_var_jk", J, K);
    s.costs.c_fix_jk = grid(c, "costs", "c_fix_jk", J, K);
    s.costs.c_install = vec(c, "costs", "c_install", J);
    s.costs.c_po = grid(c, "costs", "c_po", J, K);
    s.costs.c_pu = grid(c, "costs", "c_pu", J, K);
    return s;
}

json to_json(const Stage1Solution& s) {
    const std::size_t I = s.p.size(), J = s.w.size(), K = s.q_jk.cols();
    json d;
    d["status"] = to_string(s.status);
    d["gap"] = num(s.gap);
    d["tc"] = s.tc;
    d["p"] = s.p;
    d["q_ij"] = rows(s.q_ij);
    d["q_jk"] = rows(s.q_jk);
    d["w"] = s.w;
    json y = json::array();
    for (auto v : s.y) y.push_back(static_cast<int>(v));
    d["y"] = std::move(y);
    d["x_ij"] = bit_rows(s.x_ij, I, J);
    d["x_jk"] = bit_rows(s.x_jk, J, K);
    return d;
}

Stage1Solution stage1_from_json(const json& d) {
    Stage1Solution s;
    const json& p = field(d, "", "p");
    const json& w = field(d, "", "w");
    const json& qjk = field(d, "", "q_jk");
    if (!p.is_array() || !w.is_array() || !qjk.is_array()) bad("document", "p, w and q_jk must be arrays");
    const std::size_t I = p.size(), J = w.size();
    const std::size_t K = J > 0 && qjk[0].is_array() ? qjk[0].size() : 0;
    s.status = parse_status(field(d, "", "status").get<std::string>());
    const json& gap = field(d, "", "gap");
    s.gap = gap.is_null() ? kInf : number(gap, "gap");
    s.tc = number(field(d, "", "tc"), "tc");
    s.p = vec(d, "", "p", I);
    s.q_ij = grid(d, "", "q_ij", I, J);
    s.q_jk = grid(d, "", "q_jk", J, K);
    s.w = vec(d, "", "w", J);
    const auto y = vec(d, "", "y", J);
    for (double v : y) {
        if (v != 0.0 && v != 1.0) bad("y", "expected 0 or 1 entries");
        s.y.push_back(v != 0.0);
    }
    s.x_ij = bits(grid(d, "", "x_ij", I, J), "x_ij");
    s.x_jk = bits(grid(d, "", "x_jk", J, K), "x_jk");
    return s;
}

json to_json(const Stage2Report& r) {
    const auto& p = r.profile;
    json d;
    d["realized_demand"] = r.realized_demand;
    d["delta"] = p.delta;
    d["delta_lo"] = p.delta_lo;
    d["delta_mid"] = p.delta_mid;
    d["delta_hi"] = p.delta_hi;
    d["delta_bar"] = p.delta_bar;
    d["sigma_delta"] = p.sigma_delta;
    d["delta_mean"] = r.delta_mean;
    d["rule"] = to_string(p.rule);
    d["degenerate"] = p.degenerate;
    json lambda = json::array(), zeta = json::array(), sign = json::array();
    for (std::size_t k = 0; k < p.delta.size(); ++k) {
        lambda.push_back(static_cast<int>(p.lambda[k]));
        zeta.push_back(static_cast<int>(p.zeta[k]));
        sign.push_back(to_string(p.sign[k]));
    }
    d["lambda"] = std::move(lambda);
    d["zeta"] = std::move(zeta);
    d["sign"] = std::move(sign);
    const auto& pl = r.plan;
    d["kq"] = bit_rows(pl.kq, pl.n_warehouses, pl.n_customers);
    d["omega"] = bit_rows(pl.omega, pl.n_warehouses, pl.n_customers);
    d["r"] = rows(pl.r);
    d["e"] = rows(pl.e);
    d["qu"] = pl.qu;
    d["qo"] = pl.qo;
    d["recovery_warehouse"] = pl.warehouse;
    d["clamp_events"] = pl.clamp_events;
    d["p_under"] = r.probabilities.p_under;
    d["p_over"] = r.probabilities.p_over;
    json zs = json::array();
    for (auto z : r.probabilities.zero_sigma) zs.push_back(static_cast<int>(z));
    d["zero_sigma"] = std::move(zs);
    d["eld"] = r.eld;
    d["cost"] = {{"tc", r.cost.tc},
                 {"overstock", r.cost.overstock},
                 {"understock", r.cost.understock},
                 {"lead_time", r.cost.lead_time},
                 {"tc1", r.cost.tc1}};
    return d;
}

json to_json(const NoiseSpec& n) {
    json d;
    d["label"] = n.label;
    d["family"] = to_string(n.family);
    if (n.log_scale) d["log_scale"] = num(*n.log_scale);
    else d["scale"] = n.scale;
    switch (n.family) {
        case NoiseFamily::Gaussian: d["gaussian_sigma"] = n.gaussian_sigma; break;
        case NoiseFamily::Lognormal:
            d["lognormal_mu"] = n.lognormal_mu;
            d["lognormal_sigma"] = n.lognormal_sigma;
            break;
        case NoiseFamily::Pareto:
            d["pareto_alpha"] = n.pareto_alpha;
            d["pareto_xm"] = n.pareto_xm;
            break;
    }
    d["signed"] = n.signed_noise;
    return d;
}

NoiseSpec noise_from_json(const json& d) {
    if (!d.is_object()) bad("noise", "expected an object");
    NoiseSpec n;
    n.family = parse_noise_family(field(d, "noise", "family").get<std::string>());
    n.label = d.value("label", std::string(to_string(n.family)));
    const auto opt = [&](const char* name, double& target) {
        if (d.contains(name)) target = number(d[name], std::string("noise.") + name);
    };
    if (d.contains("scale") && d["scale"].is_number()) n.scale = d["scale"].get<double>();
    if (d.contains("log_scale")) n.log_scale = number(d["log_scale"], "noise.log_scale");
    opt("gaussian_sigma", n.gaussian_sigma);
    opt("lognormal_mu", n.lognormal_mu);
    opt("lognormal_sigma", n.lognormal_sigma);
    opt("pareto_alpha", n.pareto_alpha);
    opt("pareto_xm", n.pareto_xm);
    if (d.contains("signed")) {
        if (!d["signed"].is_boolean()) bad("noise.signed", "expected true or false");
        n.signed_noise = d["signed"].get<bool>();
    }
    validate(n);
    return n;
}

json summary_json(const NoiseEnsemble& ens) {
    json d;
    d["noise"] = to_json(ens.noise);
    d["n"] = ens.n;
    d["n_plants"] = ens.n_plants;
    d["n_warehouses"] = ens.n_warehouses;
    d["n_customers"] = ens.n_customers;
    d["feasible_count"] = ens.feasible_count;
    d["include_infeasible"] = ens.include_infeasible;
    json flags = json::array(), viol = json::array();
    for (std::size_t e = 0; e < ens.n; ++e) {
        flags.push_back(static_cast<int>(ens.feasible[e]));
        viol.push_back(num(ens.max_violation[e]));
    }
    d["feasible"] = std::move(flags);
    d["max_violation"] = std::move(viol);
    json rms = json::object();
    for (auto g : {VariableGroup::P, VariableGroup::Qij, VariableGroup::Qjk}) {
        const auto& r = ens.rms[static_cast<int>(g)];
        rms[to_string(g)] = {{"defined", r.defined}, {"negative", r.negative}, {"radicand", num(r.radicand)},
                             {"value", num(r.value)}};
    }
    d["rms"] = std::move(rms);
    json means = json::array();
    for (double v : ens.cell_mean) means.push_back(num(v));
    d["cell_mean"] = std::move(means);
    return d;
}

NoiseEnsemble ensemble_from_summary(const json& d) {
    NoiseEnsemble ens;
    ens.noise = noise_from_json(field(d, "", "noise"));
    ens.n = count(field(d, "", "n"), "n");
    ens.n_plants = count(field(d, "", "n_plants"), "n_plants");
    ens.n_warehouses = count(field(d, "", "n_warehouses"), "n_warehouses");
    ens.n_customers = count(field(d, "", "n_customers"), "n_customers");
    ens.feasible_count = count(field(d, "", "feasible_count"), "feasible_count");
    const json& inc = field(d, "", "include_infeasible");
    if (!inc.is_boolean()) bad("include_infeasible", "expected true or false");
    ens.include_infeasible = inc.get<bool>();
    const json& flags = field(d, "", "feasible");
    const json& viol = field(d, "", "max_violation");
    if (!flags.is_array() || flags.size() != ens.n || !viol.is_array() || viol.size() != ens.n)
        bad("feasible", "expected one entry per replicate");
    for (std::size_t e = 0; e < ens.n; ++e) {
        ens.feasible.push_back(flags[e].get<int>() != 0);
        ens.max_violation.push_back(viol[e].is_null() ? kInf : number(viol[e], "max_violation"));
    }
    const json& means = field(d, "", "cell_mean");
    if (!means.is_array() || means.size() != ens.cells()) bad("cell_mean", "expected one entry per cell");
    for (const auto& v : means)
        ens.cell_mean.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : number(v, "cell_mean"));
    const json& rms = field(d, "", "rms");
    for (auto g : {VariableGroup::P, VariableGroup::Qij, VariableGroup::Qjk}) {
        const json& r = field(rms, "rms", to_string(g));
        auto& out = ens.rms[static_cast<int>(g)];
        out.defined = r.at("defined").get<bool>();
        out.negative = r.at("negative").get<bool>();
        out.radicand = r.at("radicand").is_null() ? std::numeric_limits<double>::quiet_NaN() : r.at("radicand").get<double>();
        out.value = r.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN() : r.at("value").get<double>();
    }
    return ens;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoFailure("cannot open " + path.string() + ": " + std::strerror(errno));
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    os << doc.dump(2) << '\n';
    if (!os) throw IoFailure("write to " + path.string() + " failed");
}

std::string fnv_hex(std::string_view bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::uint64_t h = hash_name(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xF];
    return out;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoFailure("cannot open " + path.string() + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << is.rdbuf();
    return fnv_hex(ss.str());
}

}  // namespace scnd
