#include "swafdi/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace swafdi {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw IoError("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    if (!j[0].is_array()) throw IoError("matrix rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw IoError("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw IoError("vector must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

namespace {

Eigen::MatrixXd matrix_or_zero(const json& j, const char* key, int rows, int cols) {
    if (!j.contains(key) || j[key].is_null()) return Eigen::MatrixXd::Zero(rows, cols);
    Eigen::MatrixXd m = matrix_from_json(j[key]);
    // An all-empty-row matrix reads as 0x0; give it the declared shape.
    if (m.size() == 0 && rows * cols == 0) return Eigen::MatrixXd::Zero(rows, cols);
    return m;
}

Eigen::VectorXd vector_or_zero(const json& j, const char* key, int len) {
    if (!j.contains(key) || j[key].is_null()) return Eigen::VectorXd::Zero(len);
    return vector_from_json(j[key]);
}

Eigen::VectorXd bound_from_json(const json& j, const char* key, int len) {
    if (!j.contains(key) || j[key].is_null()) return Eigen::VectorXd::Zero(len);
    if (j[key].is_number()) return Eigen::VectorXd::Constant(len, j[key].get<double>());
    return vector_from_json(j[key]);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SwaModel model_from_json(const json& j) {
    try {
        SwaModel m;
        m.n = j.at("n").get<int>();
        m.n_u = j.value("n_u", 0);
        m.n_y = j.at("n_y").get<int>();
        m.name = j.value("name", std::string{});
        for (const auto& jm : j.at("modes")) {
            Mode md;
            md.A = matrix_from_json(jm.at("A"));
            md.B = matrix_or_zero(jm, "B", m.n, m.n_u);
            md.C = matrix_from_json(jm.at("C"));
            md.D = matrix_or_zero(jm, "D", m.n_y, m.n_u);
            md.f = vector_or_zero(jm, "f", m.n);
            md.g = vector_or_zero(jm, "g", m.n_y);
            m.modes.push_back(std::move(md));
        }
        const auto& js = j.at("sets");
        m.sets.P = matrix_from_json(js.at("P"));
        m.sets.p = vector_from_json(js.at("p"));
        m.sets.eps_eta = bound_from_json(js, "eps_eta", m.n_y);
        m.sets.eps_nu = bound_from_json(js, "eps_nu", m.n);
        if (js.contains("U") && !js["U"].is_null()) m.sets.input_bound = js["U"].get<double>();
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model JSON: ") + e.what());
    }
}

json model_to_json(const SwaModel& model) {
    json j;
    if (!model.name.empty()) j["name"] = model.name;
    j["n"] = model.n;
    j["n_u"] = model.n_u;
    j["n_y"] = model.n_y;
    j["modes"] = json::array();
    for (const auto& md : model.modes) {
        json jm;
        jm["A"] = matrix_to_json(md.A);
        if (model.n_u > 0) {
            jm["B"] = matrix_to_json(md.B);
            jm["D"] = matrix_to_json(md.D);
        }
        jm["C"] = matrix_to_json(md.C);
        jm["f"] = vector_to_json(md.f);
        jm["g"] = vector_to_json(md.g);
        j["modes"].push_back(std::move(jm));
    }
    json js;
    js["P"] = matrix_to_json(model.sets.P);
    js["p"] = vector_to_json(model.sets.p);
    js["eps_eta"] = vector_to_json(model.sets.eps_eta);
    js["eps_nu"] = vector_to_json(model.sets.eps_nu);
    js["U"] = model.sets.input_bound ? json(*model.sets.input_bound) : json(nullptr);
    j["sets"] = std::move(js);
    return j;
}

SwaModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
    SwaModel m = model_from_json(j);
    if (m.name.empty()) m.name = path;
    return m;
}

void save_model(const SwaModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << model_to_json(model).dump(2) << '\n';
}

void write_trajectory_csv(const Trajectory& data, std::ostream& out) {
    const int nu = data.inputs.empty() ? 0 : static_cast<int>(data.inputs.front().size());
    const int ny = data.outputs.empty() ? 0 : static_cast<int>(data.outputs.front().size());
    out << 't';
    for (int i = 1; i <= nu; ++i) out << ",u_" << i;
    for (int i = 1; i <= ny; ++i) out << ",y_" << i;
    out << '\n';
    for (int t = 0; t < data.length(); ++t) {
        out << t;
        for (int i = 0; i < nu; ++i) out << ',' << format_double(data.inputs[static_cast<std::size_t>(t)][i]);
        for (int i = 0; i < ny; ++i) out << ',' << format_double(data.outputs[static_cast<std::size_t>(t)][i]);
        out << '\n';
    }
}

void save_trajectory(const Trajectory& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_trajectory_csv(data, out);
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("trajectory CSV is empty");
    std::vector<char> kind;  // 't', 'u' or 'y' per column
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            if (cell == "t") kind.push_back('t');
            else if (cell.rfind("u_", 0) == 0) kind.push_back('u');
            else if (cell.rfind("y_", 0) == 0) kind.push_back('y');
            else throw IoError("unexpected trajectory column '" + cell + "'");
        }
    }
    const auto nu = std::count(kind.begin(), kind.end(), 'u');
    const auto ny = std::count(kind.begin(), kind.end(), 'y');
    if (ny == 0) throw IoError("trajectory CSV has no output columns");
    Trajectory data;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream row(line);
        std::string cell;
        Eigen::VectorXd u(nu), y(ny);
        Eigen::Index iu = 0, iy = 0;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            if (col >= kind.size()) throw IoError("too many columns on line " + std::to_string(lineno));
            double v = 0.0;
            try {
                v = std::stod(cell);
            } catch (const std::exception&) {
                throw IoError("bad number '" + cell + "' on line " + std::to_string(lineno));
            }
            if (kind[col] == 'u') u[iu++] = v;
            else if (kind[col] == 'y') y[iy++] = v;
            ++col;
        }
        if (col != kind.size()) throw IoError("missing columns on line " + std::to_string(lineno));
        data.push_back(u, y);
    }
    return data;
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file '" + path + "'");
    return read_trajectory_csv(in);
}

}  // namespace swafdi
