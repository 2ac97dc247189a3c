#include "lelab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lelab/error.hpp"

namespace lelab {

namespace {

double parse_double(const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InputError("not a number: '" + text + "'");
    }
    if (used != text.size()) throw InputError("not a number: '" + text + "'");
    return v;
}

std::string csv_escape(const std::string& cell)
{
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

Json number(double v)
{
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

} // namespace

std::vector<double> parse_sweep(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw InputError("sweep must have the form start:stop:count");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]);
    const double n = parse_double(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n)) throw InputError("sweep count must be a positive integer");
    const int count = static_cast<int>(n);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    return out;
}

void validate(const RunConfig& config)
{
    if (!(config.q > 1.0 && config.q < 2.0)) throw InputError("q must lie in (1, 2)");
    if (config.level < 0 || config.level > 12) throw InputError("level must lie in [0, 12]");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& value) { write_atomic(path, value.dump(2) + "\n"); }

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells)
{
    if (cells.size() != header_.size()) throw InputError("row width does not match the header");
    rows_.push_back(cells);
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_escape(cells[i]);
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

Json to_json(const CheckResult& check)
{
    Json j;
    j["name"] = check.name;
    j["pass"] = check.pass;
    j["margin"] = number(check.margin);
    j["slack"] = number(check.slack);
    j["samples"] = check.samples;
    if (!check.offending.empty()) j["offending"] = check.offending;
    Json details = Json::object();
    for (const auto& [k, v] : check.details) details[k] = number(v);
    j["details"] = details;
    return j;
}

Json to_json(const SolveReport& report, bool include_field)
{
    Json j;
    j["q"] = report.q;
    j["lambda1"] = report.lambda1;
    j["energy"] = report.energy;
    j["residual"] = report.residual;
    j["iterations"] = report.iterations;
    j["sup_norm"] = report.w.size() ? report.w.cwiseAbs().maxCoeff() : 0.0;
    j["component_masses"] = report.component_masses;
    if (include_field) j["w"] = std::vector<double>(report.w.data(), report.w.data() + report.w.size());
    return j;
}

Json to_json(const SpectrumEntry& entry)
{
    return Json{{"lambda", entry.lambda}, {"bumps", entry.bumps}, {"spin", entry.spin}};
}

CsvTable mesh_field_table(const Mesh& mesh, const Vector& values)
{
    if (values.size() != mesh.num_nodes()) throw InputError("field does not match the mesh");
    CsvTable t({"x", "y", "value"});
    for (int i = 0; i < mesh.num_nodes(); ++i) t.add_row(std::vector<double>{mesh.nodes[i].x, mesh.nodes[i].y, values[i]});
    return t;
}

} // namespace lelab
