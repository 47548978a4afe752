#include "rawls/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rawls::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line_no) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

long parse_int(const std::string& s, int line_no) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

stats::LabeledDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file");
    line = strip_cr(line);

    auto header = split(line, ',');
    if (header.size() < 3 || header[0] != "z" || header[1] != "y")
        throw ParseError("line 1: header must be z,y,f1,...,fd or z,y,score");
    int d = static_cast<int>(header.size()) - 2;
    if (d == 1) {
        if (header[2] != "f1" && header[2] != "score")
            throw ParseError("line 1: third column must be f1 or score");
    } else {
        for (int k = 0; k < d; ++k)
            if (header[2 + k] != "f" + std::to_string(k + 1))
                throw ParseError("line 1: feature column " + std::to_string(k + 3) +
                                 " must be named f" + std::to_string(k + 1));
    }

    stats::LabeledDataset data;
    data.d = d;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != d + 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(d + 2) + " columns, got " +
                             std::to_string(cells.size()));
        stats::LabeledRow row;
        row.z = static_cast<int>(parse_int(cells[0], line_no));
        long y = parse_int(cells[1], line_no);
        if (y != 0 && y != 1)
            throw ParseError("line " + std::to_string(line_no) + ": label must be 0 or 1");
        row.y = static_cast<int>(y);
        if (row.z < 1)
            throw ParseError("line " + std::to_string(line_no) + ": group must be >= 1");
        row.features.resize(d);
        for (int k = 0; k < d; ++k) row.features(k) = parse_double(cells[2 + k], line_no);
        data.rows.push_back(std::move(row));
        data.p = std::max(data.p, data.rows.back().z);
    }
    return data;
}

void write_dataset_csv(const stats::LabeledDataset& data, const std::string& path) {
    std::ostringstream out;
    out << "z,y";
    for (int k = 1; k <= data.d; ++k) out << ",f" << k;
    out << "\n";
    for (const auto& row : data.rows) {
        out << row.z << "," << row.y;
        for (int k = 0; k < data.d; ++k) out << "," << format_double(row.features(k));
        out << "\n";
    }
    write_text_file(out.str(), path);
}

json stats_to_json(const MomentTable& table) {
    json subpops = json::array();
    for (const auto& [id, e] : table.entries) {
        json mean = json::array();
        for (int k = 0; k < e.mean.size(); ++k) mean.push_back(e.mean(k));
        json cov = json::array();
        for (int r = 0; r < e.cov.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < e.cov.cols(); ++c) row.push_back(e.cov(r, c));
            cov.push_back(row);
        }
        subpops.push_back({{"y", id.label},
                           {"z", id.group},
                           {"count", e.count},
                           {"mean", mean},
                           {"cov", cov}});
    }
    return {{"tool_version", kToolVersion},
            {"p", table.p},
            {"d", table.d},
            {"subpops", subpops}};
}

MomentTable stats_from_json(const json& j) {
    try {
        MomentTable table;
        table.p = j.at("p").get<int>();
        table.d = j.at("d").get<int>();
        for (const auto& s : j.at("subpops")) {
            SubPopId id{s.at("y").get<int>(), s.at("z").get<int>()};
            MomentEntry e;
            e.count = s.at("count").get<std::int64_t>();
            const auto& mean = s.at("mean");
            e.mean.resize(mean.size());
            for (std::size_t k = 0; k < mean.size(); ++k) e.mean(k) = mean[k].get<double>();
            const auto& cov = s.at("cov");
            e.cov.resize(cov.size(), cov.empty() ? 0 : cov[0].size());
            for (std::size_t r = 0; r < cov.size(); ++r) {
                if (cov[r].size() != static_cast<std::size_t>(e.cov.cols()))
                    throw ParseError("ragged covariance matrix");
                for (std::size_t c = 0; c < cov[r].size(); ++c)
                    e.cov(r, c) = cov[r][c].get<double>();
            }
            table.entries[id] = std::move(e);
        }
        require_valid(table);
        return table;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("stats file: ") + ex.what());
    }
}

json model_to_json(const eval::AnyModel& model, const std::string& method) {
    json j;
    j["tool_version"] = kToolVersion;
    j["method"] = method;
    if (std::holds_alternative<ScoreThresholdModel>(model)) {
        const auto& m = std::get<ScoreThresholdModel>(model);
        j["type"] = "threshold";
        j["b"] = m.b;
        j["r_star"] = m.guarantee ? json(m.guarantee->r_star) : json(nullptr);
        j["j_star"] = m.guarantee ? json(m.guarantee->j_star) : json(nullptr);
    } else {
        const auto& m = std::get<LinearThresholdModel>(model);
        j["type"] = "linear";
        json w = json::array();
        for (int k = 0; k < m.w.size(); ++k) w.push_back(m.w(k));
        j["w"] = w;
        j["b"] = m.b;
        j["r_star"] = m.guarantee ? json(m.guarantee->r_star) : json(nullptr);
        j["j_star"] = m.guarantee ? json(m.guarantee->j_star) : json(nullptr);
    }
    return j;
}

std::pair<eval::AnyModel, std::string> model_from_json(const json& j) {
    try {
        std::string type = j.at("type").get<std::string>();
        std::string method = j.value("method", "external");
        std::optional<Guarantee> guarantee;
        if (j.contains("r_star") && !j["r_star"].is_null()) {
            Guarantee g;
            g.r_star = j["r_star"].get<double>();
            g.j_star = (j.contains("j_star") && !j["j_star"].is_null())
                           ? j["j_star"].get<int>()
                           : 1;
            guarantee = g;
        }
        if (type == "threshold") {
            ScoreThresholdModel m;
            m.b = j.at("b").get<double>();
            m.guarantee = guarantee;
            return {m, method};
        }
        if (type == "linear") {
            LinearThresholdModel m;
            const auto& w = j.at("w");
            if (w.empty()) throw ParseError("linear model: empty w");
            m.w.resize(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) m.w(k) = w[k].get<double>();
            m.b = j.at("b").get<double>();
            m.guarantee = guarantee;
            return {m, method};
        }
        throw ParseError("model type must be 'threshold' or 'linear', got '" + type + "'");
    } catch (const json::exception& ex) {
        throw ParseError(std::string("model file: ") + ex.what());
    }
}

oracle::FiniteDistribution distribution_from_json(const json& j) {
    try {
        std::vector<std::string> points;
        for (const auto& pt : j.at("points")) points.push_back(pt.get<std::string>());
        oracle::FiniteDistribution dist(points, j.at("p").get<int>());
        std::map<std::string, int> index;
        for (int x = 0; x < dist.n(); ++x) index[points[x]] = x;
        for (const auto& entry : j.at("mass")) {
            std::string x = entry.at("x").get<std::string>();
            auto it = index.find(x);
            if (it == index.end()) throw ParseError("mass references unknown point '" + x + "'");
            int y = entry.at("y").get<int>();
            int z = entry.at("z").get<int>();
            if (y != 0 && y != 1) throw ParseError("mass label must be 0 or 1");
            if (z < 1 || z > dist.p) throw ParseError("mass group out of range");
            dist.set_mass(it->second, y, z,
                          dist.mass(it->second, y, z) + entry.at("prob").get<double>());
        }
        dist.validate();
        return dist;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("distribution file: ") + ex.what());
    }
}

json distribution_to_json(const oracle::FiniteDistribution& dist) {
    json mass = json::array();
    for (int x = 0; x < dist.n(); ++x)
        for (int i = 0; i <= 1; ++i)
            for (int z = 1; z <= dist.p; ++z)
                if (dist.mass(x, i, z) > 0.0)
                    mass.push_back({{"x", dist.points[x]},
                                    {"y", i},
                                    {"z", z},
                                    {"prob", dist.mass(x, i, z)}});
    return {{"points", dist.points}, {"p", dist.p}, {"mass", mass}};
}

json report_to_json(const EvaluationReport& report) {
    json per = json::array();
    for (const auto& [id, r] : report.per_subpop_error)
        per.push_back({{"y", id.label}, {"z", id.group}, {"error", r}});
    json argmax = json::array();
    for (const auto& id : report.argmax_set)
        argmax.push_back({{"y", id.label}, {"z", id.group}});
    json empty = json::array();
    for (const auto& id : report.empty_subpops)
        empty.push_back({{"y", id.label}, {"z", id.group}});
    return {{"tool_version", kToolVersion},
            {"per_subpop_error", per},
            {"max_error", report.max_error},
            {"argmax_set", argmax},
            {"fpr_range", {report.fpr_range.first, report.fpr_range.second}},
            {"fnr_range", {report.fnr_range.first, report.fnr_range.second}},
            {"accuracy", report.accuracy},
            {"empty_subpops", empty}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw ParseError("'" + path + "': " + ex.what());
    }
}

void write_json_file(const json& j, const std::string& path) {
    write_text_file(j.dump(2) + "\n", path);
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace rawls::io
