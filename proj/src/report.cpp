#include "scnd/report.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "scnd/error.hpp"
#include "scnd/format.hpp"

namespace scnd {

namespace {

const std::vector<double>& deterministic(const Stage1Solution& det, VariableGroup g) {
    switch (g) {
        case VariableGroup::P: return det.p;
        case VariableGroup::Qij: return det.q_ij.flat();
        case VariableGroup::Qjk: return det.q_jk.flat();
    }
    return det.p;
}

const char* row_index(VariableGroup g) { return g == VariableGroup::Qjk ? "j" : "i"; }

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double field_value(const std::string& text, std::size_t line) {
    const auto v = parse_double(text);
    if (!v) throw IoFailure("line " + std::to_string(line) + ": '" + text + "' is not a number");
    return *v;
}

std::size_t field_count(const std::string& text, std::size_t line) {
    const double v = field_value(text, line);
    if (!(v >= 0.0) || v != std::floor(v)) throw IoFailure("line " + std::to_string(line) + ": bad count '" + text + "'");
    return static_cast<std::size_t>(v);
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& write, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw IoFailure("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    write(os);
    os.flush();
    if (!os) throw IoFailure("write to " + path.string() + " failed: " + std::strerror(errno));
}

}  // namespace

DiffMatrix diff_matrix(const Stage1Solution& det, const NoiseEnsemble& ens, VariableGroup group) {
    if (ens.contributing() == 0)
        throw ConfigError("ensemble '" + ens.noise.label + "' has no replicate to average");
    DiffMatrix m;
    m.group = group;
    switch (group) {
        case VariableGroup::P: m.rows = ens.n_plants, m.cols = 1; break;
        case VariableGroup::Qij: m.rows = ens.n_plants, m.cols = ens.n_warehouses; break;
        case VariableGroup::Qjk: m.rows = ens.n_warehouses, m.cols = ens.n_customers; break;
    }
    const auto& base = deterministic(det, group);
    if (base.size() != m.rows * m.cols) throw ConfigError("solution and ensemble sizes differ");
    const std::size_t off = ens.group_offset(group);
    m.values.resize(base.size());
    for (std::size_t c = 0; c < base.size(); ++c) m.values[c] = base[c] - ens.cell_mean[off + c];
    return m;
}

double sample_std(std::span<const double> v) {
    if (v.size() < 2) throw SingleCell("standard deviation needs at least two cells, got " + std::to_string(v.size()));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

DeviationTable deviation_table(const Stage1Solution& det, std::span<const NoiseEnsemble> ensembles) {
    DeviationTable t;
    for (const auto& ens : ensembles) {
        DeviationRow row;
        row.label = ens.noise.label;
        row.feasible = ens.feasible_count;
        row.n = ens.n;
        if (ens.contributing() == 0) {
            if (det.q_ij.size() < 2) throw SingleCell("Qij has fewer than two cells");
            row.sigma = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.sigma = sample_std(diff_matrix(det, ens, VariableGroup::Qij).values);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(std::ostream& os, const DiffMatrix& m) {
    os << row_index(m.group);
    for (std::size_t c = 0; c < m.cols; ++c) os << ',' << c;
    os << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
        os << r;
        for (std::size_t c = 0; c < m.cols; ++c) os << ',' << format_double(m(r, c));
        os << '\n';
    }
}

void write_csv(std::ostream& os, const DeviationTable& t) {
    os << "label,sigma,feasible,n\n";
    for (const auto& r : t.rows) {
        if (r.label.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : r.label) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            os << quoted << '"';
        } else {
            os << r.label;
        }
        os << ',' << format_double(r.sigma) << ',' << r.feasible << ',' << r.n << '\n';
    }
}

void write_csv(std::ostream& os, const Stage2Report& r) {
    os << "k,delta,lambda,p_under,p_over,eld\n";
    for (std::size_t k = 0; k < r.eld.size(); ++k) {
        os << k << ',' << format_double(r.profile.delta[k]) << ',' << int{r.profile.lambda[k]} << ','
           << format_double(r.probabilities.p_under[k]) << ',' << format_double(r.probabilities.p_over[k]) << ','
           << format_double(r.eld[k]) << '\n';
    }
}

DiffMatrix parse_diff_csv(std::istream& is, VariableGroup group) {
    DiffMatrix m;
    m.group = group;
    std::string line;
    if (!std::getline(is, line)) throw IoFailure("empty matrix file");
    const auto header = split(line);
    if (header.empty() || header[0] != row_index(group)) throw IoFailure("line 1: unexpected header '" + line + "'");
    m.cols = header.size() - 1;
    for (std::size_t c = 0; c < m.cols; ++c)
        if (field_count(header[c + 1], 1) != c) throw IoFailure("line 1: column indices out of order");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        const auto f = split(line);
        if (f.size() != m.cols + 1) throw IoFailure("line " + std::to_string(lineno) + ": wrong field count");
        if (field_count(f[0], lineno) != m.rows) throw IoFailure("line " + std::to_string(lineno) + ": row index out of order");
        for (std::size_t c = 0; c < m.cols; ++c) m.values.push_back(field_value(f[c + 1], lineno));
        ++m.rows;
    }
    return m;
}

DeviationTable parse_deviation_csv(std::istream& is) {
    DeviationTable t;
    std::string line;
    if (!std::getline(is, line) || line != "label,sigma,feasible,n") throw IoFailure("line 1: unexpected header");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        DeviationRow row;
        std::string rest = line;
        if (!line.empty() && line[0] == '"') {
            std::size_t pos = 1;
            while (true) {
                const std::size_t q = line.find('"', pos);
                if (q == std::string::npos) throw IoFailure("line " + std::to_string(lineno) + ": unterminated quote");
                row.label += line.substr(pos, q - pos);
                if (q + 1 < line.size() && line[q + 1] == '"') {
                    row.label += '"';
                    pos = q + 2;
                    continue;
                }
                rest = line.substr(q + 1);
                break;
            }
        } else {
            const std::size_t comma = line.find(',');
            row.label = line.substr(0, comma);
            rest = comma == std::string::npos ? std::string() : line.substr(comma);
        }
        const auto f = split(rest);
        if (f.size() != 4 || !f[0].empty()) throw IoFailure("line " + std::to_string(lineno) + ": wrong field count");
        row.sigma = field_value(f[1], lineno);
        row.feasible = field_count(f[2], lineno);
        row.n = field_count(f[3], lineno);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void export_csv(const DiffMatrix& m, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& os) { write_csv(os, m); });
}
void export_csv(const DeviationTable& t, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& os) { write_csv(os, t); });
}
void export_csv(const Stage2Report& r, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& os) { write_csv(os, r); });
}

void write_production_series(std::ostream& os, const Stage1Solution& det, std::span<const NoiseEnsemble> ensembles) {
    os << "i,deterministic";
    for (const auto& e : ensembles) os << ',' << e.noise.label;
    os << '\n';
    for (std::size_t i = 0; i < det.p.size(); ++i) {
        os << i << ',' << format_double(det.p[i]);
        for (const auto& e : ensembles) os << ',' << format_double(e.cell_mean[i]);
        os << '\n';
    }
}

void write_plot_script(std::ostream& os, const std::vector<std::string>& labels) {
    os << "#!/usr/bin/env python3\n"
          "\"\"\"Renders the CSV output of an scnd run. Usage: python3 plot.py [run-directory]\"\"\"\n"
          "import sys\n"
          "from pathlib import Path\n\n"
          "import matplotlib\n"
          "matplotlib.use(\"Agg\")\n"
          "import matplotlib.pyplot as plt\n"
          "import numpy as np\n\n"
          "run = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent\n"
          "labels = [";
    for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? ", " : "") << '"' << labels[i] << '"';
    os << "]\n\n"
          "for label in labels:\n"
          "    for group in (\"qij\", \"qjk\"):\n"
          "        path = run / f\"diff_{group}_{label}.csv\"\n"
          "        if not path.exists():\n"
          "            continue\n"
          "        data = np.genfromtxt(path, delimiter=\",\", skip_header=1)[:, 1:]\n"
          "        fig, ax = plt.subplots()\n"
          "        im = ax.imshow(np.atleast_2d(data), cmap=\"coolwarm\")\n"
          "        fig.colorbar(im, ax=ax)\n"
          "        ax.set_title(f\"{group} deterministic - mean, {label}\")\n"
          "        fig.savefig(run / f\"diff_{group}_{label}.png\", dpi=120)\n"
          "        plt.close(fig)\n\n"
          "series = run / \"production_series.csv\"\n"
          "if series.exists():\n"
          "    data = np.genfromtxt(series, delimiter=\",\", names=True)\n"
          "    fig, ax = plt.subplots()\n"
          "    for name in data.dtype.names[1:]:\n"
          "        ax.plot(data[\"i\"], data[name], marker=\"o\", label=name)\n"
          "    ax.set_xlabel(\"plant\")\n"
          "    ax.set_ylabel(\"production\")\n"
          "    ax.legend()\n"
          "    fig.savefig(run / \"production_series.png\", dpi=120)\n";
}

namespace {

constexpr char kMagic[8] = {'S', 'C', 'N', 'D', 'T', 'E', 'N', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoFailure("tensor file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_tensor(std::ostream& os, std::span<const std::uint64_t> dims, std::span<const double> values) {
    std::uint64_t count = 1;
    for (auto d : dims) count *= d;
    if (count != values.size()) throw IoFailure("tensor dimensions do not match the value count");
    os.write(kMagic, sizeof kMagic);
    put_u64(os, dims.size());
    for (auto d : dims) put_u64(os, d);
    for (double v : values) put_u64(os, std::bit_cast<std::uint64_t>(v));
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint64_t> dims,
                  std::span<const double> values) {
    write_file(path, [&](std::ostream& os) { write_tensor(os, dims, values); }, std::ios::out | std::ios::binary);
}

Tensor read_tensor(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoFailure("not a tensor file");
    Tensor t;
    const std::uint64_t rank = get_u64(is);
    if (rank > 16) throw IoFailure("implausible tensor rank " + std::to_string(rank));
    std::uint64_t count = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
        t.dims.push_back(get_u64(is));
        count *= t.dims.back();
    }
    t.values.reserve(count);
    for (std::uint64_t c = 0; c < count; ++c) t.values.push_back(std::bit_cast<double>(get_u64(is)));
    return t;
}

}  // namespace scnd
