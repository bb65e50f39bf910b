#include "tcast/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tcast {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

void expect_line(std::istream& in, const std::string& expected, const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(in, line) || line != expected)
        throw IoError("malformed file (expected '" + expected + "'): " + path.string());
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad numeric value '" + s + "' in " + path.string());
    }
}

void write_matrix_rows(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Matrix read_matrix_rows(std::istream& in, Index rows, Index cols, const std::filesystem::path& path) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (!(in >> m(i, j))) throw IoError("truncated matrix block in " + path.string());
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_events(const std::filesystem::path& path, const std::vector<EventRecord>& events,
                  char delimiter) {
    auto out = open_out(path);
    out << "source" << delimiter << "target" << delimiter << "timestamp" << delimiter << "value\n";
    for (const auto& e : events)
        out << e.source << delimiter << e.target << delimiter << format_double(e.timestamp)
            << delimiter << format_double(e.value) << '\n';
}

std::vector<EventRecord> read_events(const std::filesystem::path& path, char delimiter) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty event log: " + path.string());
    const auto header = split(line, delimiter);
    if (header.size() != 4 || header[0] != "source" || header[1] != "target" ||
        header[2] != "timestamp" || header[3] != "value")
        throw IoError("event log header must name source, target, timestamp, value: " + path.string());
    std::vector<EventRecord> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, delimiter);
        if (cells.size() != 4) throw IoError("event row with wrong field count in " + path.string());
        events.push_back({cells[0], cells[1], parse_double(cells[2], path), parse_double(cells[3], path)});
    }
    return events;
}

void write_tensor(const std::filesystem::path& path, const Tensor3& x) {
    auto out = open_out(path);
    out << "tensor3 v1\n";
    out << "dims " << x.rows() << ' ' << x.cols() << ' ' << x.depth() << '\n';
    for (Index k = 0; k < x.depth(); ++k)
        for (Index i = 0; i < x.rows(); ++i) {
            for (Index j = 0; j < x.cols(); ++j) {
                if (j) out << ' ';
                out << format_double(x(i, j, k));
            }
            out << '\n';
        }
}

Tensor3 read_tensor(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_line(in, "tensor3 v1", path);
    std::string tag;
    Index rows = 0, cols = 0, depth = 0;
    if (!(in >> tag >> rows >> cols >> depth) || tag != "dims" || rows <= 0 || cols <= 0 || depth <= 0)
        throw IoError("bad tensor dims header in " + path.string());
    Tensor3 x(rows, cols, depth);
    for (Index k = 0; k < depth; ++k)
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j)
                if (!(in >> x(i, j, k))) throw IoError("truncated tensor data in " + path.string());
    return x;
}

void write_model(const std::filesystem::path& path, const Paratuck2Model& m) {
    auto out = open_out(path);
    out << "paratuck2 v1\n";
    out << "dims " << m.n_rows() << ' ' << m.n_cols() << ' ' << m.n_slices() << ' ' << m.rank_p()
        << ' ' << m.rank_q() << '\n';
    out << "nonneg " << (m.nonnegative ? 1 : 0) << '\n';
    out << "A\n";
    write_matrix_rows(out, m.a);
    out << "H\n";
    write_matrix_rows(out, m.h);
    out << "B\n";
    write_matrix_rows(out, m.b);
    out << "DA\n";
    for (const auto& d : m.da) write_matrix_rows(out, d.transpose());
    out << "DB\n";
    for (const auto& d : m.db) write_matrix_rows(out, d.transpose());
}

Paratuck2Model read_model(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_line(in, "paratuck2 v1", path);
    std::string tag;
    Index rows = 0, cols = 0, slices = 0, p = 0, q = 0;
    if (!(in >> tag >> rows >> cols >> slices >> p >> q) || tag != "dims" || rows <= 0 || cols <= 0 ||
        slices <= 0 || p <= 0 || q <= 0)
        throw IoError("bad model dims header in " + path.string());
    int nonneg = 0;
    if (!(in >> tag >> nonneg) || tag != "nonneg" || (nonneg != 0 && nonneg != 1))
        throw IoError("bad nonneg flag in " + path.string());
    auto expect_block = [&](const char* name) {
        std::string s;
        if (!(in >> s) || s != name)
            throw IoError("expected factor block '" + std::string(name) + "' in " + path.string());
    };
    Paratuck2Model m;
    m.nonnegative = nonneg == 1;
    expect_block("A");
    m.a = read_matrix_rows(in, rows, p, path);
    expect_block("H");
    m.h = read_matrix_rows(in, p, q, path);
    expect_block("B");
    m.b = read_matrix_rows(in, cols, q, path);
    expect_block("DA");
    for (Index k = 0; k < slices; ++k) m.da.push_back(read_matrix_rows(in, 1, p, path).row(0).transpose());
    expect_block("DB");
    for (Index k = 0; k < slices; ++k) m.db.push_back(read_matrix_rows(in, 1, q, path).row(0).transpose());
    if (m.nonnegative) {
        bool ok = m.a.minCoeff() >= 0.0 && m.h.minCoeff() >= 0.0 && m.b.minCoeff() >= 0.0;
        for (const auto& d : m.da) ok = ok && d.minCoeff() >= 0.0;
        for (const auto& d : m.db) ok = ok && d.minCoeff() >= 0.0;
        if (!ok) throw IoError("model flagged non-negative has negative entries: " + path.string());
    }
    return m;
}

void write_lstm(const std::filesystem::path& path, const LstmParams& p) {
    auto out = open_out(path);
    out << "lstm v1\n";
    out << "dims " << p.input_dim() << ' ' << p.hidden_dim() << ' ' << p.output_dim() << '\n';
    static constexpr const char* gate_names = "icfo";
    for (int g = 0; g < kNumGates; ++g) {
        out << "W_" << gate_names[g] << '\n';
        write_matrix_rows(out, p.w[g]);
        out << "U_" << gate_names[g] << '\n';
        write_matrix_rows(out, p.u[g]);
        out << "b_" << gate_names[g] << '\n';
        write_matrix_rows(out, p.b[g].transpose());
    }
    out << "W_y\n";
    write_matrix_rows(out, p.w_y);
    out << "b_y\n";
    write_matrix_rows(out, p.b_y.transpose());
}

LstmParams read_lstm(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_line(in, "lstm v1", path);
    std::string tag;
    Index input = 0, hidden = 0, output = 0;
    if (!(in >> tag >> input >> hidden >> output) || tag != "dims" || input <= 0 || hidden <= 0 ||
        output <= 0)
        throw IoError("bad lstm dims header in " + path.string());
    auto expect_block = [&](const std::string& name) {
        std::string s;
        if (!(in >> s) || s != name)
            throw IoError("expected block '" + name + "' in " + path.string());
    };
    static constexpr const char* gate_names = "icfo";
    LstmParams p;
    for (int g = 0; g < kNumGates; ++g) {
        expect_block(std::string("W_") + gate_names[g]);
        p.w[g] = read_matrix_rows(in, hidden, input, path);
        expect_block(std::string("U_") + gate_names[g]);
        p.u[g] = read_matrix_rows(in, hidden, hidden, path);
        expect_block(std::string("b_") + gate_names[g]);
        p.b[g] = read_matrix_rows(in, 1, hidden, path).row(0).transpose();
    }
    expect_block("W_y");
    p.w_y = read_matrix_rows(in, output, hidden, path);
    expect_block("b_y");
    p.b_y = read_matrix_rows(in, 1, output, path).row(0).transpose();
    return p;
}

void write_series(const std::filesystem::path& path, const Matrix& values, Index history,
                  const std::string& side) {
    if (history < 0 || history > values.cols())
        throw IoError("write_series: history split outside column range");
    auto out = open_out(path);
    out << "# latent-series side=" << side << " factors=" << values.rows() << " history=" << history
        << " forecast=" << values.cols() - history << '\n';
    out << "factor";
    for (Index c = 0; c < values.cols(); ++c) {
        if (c == history) out << ",|";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%c%03lld", c < history ? 'h' : 'p',
                      static_cast<long long>(c < history ? c : c - history));
        out << ',' << buf;
    }
    if (history == values.cols()) out << ",|";
    out << '\n';
    for (Index r = 0; r < values.rows(); ++r) {
        out << r;
        for (Index c = 0; c < values.cols(); ++c) {
            if (c == history) out << ",|";
            out << ',' << format_double(values(r, c));
        }
        if (history == values.cols()) out << ",|";
        out << '\n';
    }
}

SeriesFile read_series(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# latent-series", 0) != 0)
        throw IoError("missing latent-series header in " + path.string());
    SeriesFile sf;
    const auto side_pos = line.find("side=");
    if (side_pos != std::string::npos) sf.side = line.substr(side_pos + 5, 1);
    if (!std::getline(in, line)) throw IoError("missing column header in " + path.string());
    const auto header = split(line, ',');
    Index marker = -1;
    for (std::size_t c = 1; c < header.size(); ++c)
        if (header[c] == "|") marker = static_cast<Index>(c) - 1;  // columns before the marker
    if (marker < 0) throw IoError("series file lacks the history/forecast marker: " + path.string());
    sf.history = marker;
    const auto n_cols = static_cast<Index>(header.size()) - 2;  // minus factor and marker cells
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (static_cast<Index>(cells.size()) != n_cols + 2)
            throw IoError("series row width mismatch in " + path.string());
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c] == "|") continue;
            row.push_back(parse_double(cells[c], path));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("series file has no data rows: " + path.string());
    sf.values = Matrix(static_cast<Index>(rows.size()), n_cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Index c = 0; c < n_cols; ++c)
            sf.values(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    return sf;
}

void write_index_map(const std::filesystem::path& path, const IndexMap& m) {
    auto out = open_out(path);
    out << "id,index\n";
    for (std::size_t i = 0; i < m.ids.size(); ++i) out << m.ids[i] << ',' << i << '\n';
}

void write_scores(const std::filesystem::path& path, const std::optional<LatentScores>& side_a,
                  const std::optional<LatentScores>& side_b) {
    auto out = open_out(path);
    out << "test,DA,DB\n";
    const std::size_t n_a = side_a ? side_a->per_factor.size() : 0;
    const std::size_t n_b = side_b ? side_b->per_factor.size() : 0;
    char label[32];
    for (std::size_t r = 0; r < std::max(n_a, n_b); ++r) {
        std::snprintf(label, sizeof(label), "latent %02zu", r);
        out << label << " MAE,";
        if (r < n_a) out << format_double(side_a->per_factor[r].mae);
        out << ',';
        if (r < n_b) out << format_double(side_b->per_factor[r].mae);
        out << '\n';
        out << label << " MDA,";
        if (r < n_a) out << format_double(side_a->per_factor[r].mda);
        out << ',';
        if (r < n_b) out << format_double(side_b->per_factor[r].mda);
        out << '\n';
    }
    out << "Average MAE,";
    if (side_a) out << format_double(side_a->average.mae);
    out << ',';
    if (side_b) out << format_double(side_b->average.mae);
    out << '\n';
    out << "Average MDA,";
    if (side_a) out << format_double(side_a->average.mda);
    out << ',';
    if (side_b) out << format_double(side_b->average.mda);
    out << '\n';
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path);
    out << "matrix v1\n";
    out << "dims " << m.rows() << ' ' << m.cols() << '\n';
    write_matrix_rows(out, m);
}

Matrix read_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_line(in, "matrix v1", path);
    std::string tag;
    Index rows = 0, cols = 0;
    if (!(in >> tag >> rows >> cols) || tag != "dims" || rows <= 0 || cols <= 0)
        throw IoError("bad matrix dims header in " + path.string());
    return read_matrix_rows(in, rows, cols, path);
}

}  // namespace tcast
