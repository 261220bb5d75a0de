/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "dsi/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "dsi/errors.hpp"

namespace dsi {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

// Line-oriented CSV scanner; keeps the current line number for messages.
class CsvReader {
public:
    CsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_)
            throw DataError("cannot open " + path);
    }

    bool next_row(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            fields.clear();
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                if (comma == std::string::npos) {
                    fields.push_back(line.substr(start));
                    break;
                }
                fields.push_back(line.substr(start, comma - start));
                start = comma + 1;
            }
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw DataError(path_ + ":" + std::to_string(line_) + ": " + message);
    }

    void expect_fields(const std::vector<std::string>& fields, std::size_t n) const {
        if (fields.size() != n)
            fail("expected " + std::to_string(n) + " fields, got " +
                 std::to_string(fields.size()));
    }

    double parse_double(const std::string& field) const {
        double v = 0.0;
        const char* begin = field.data();
        const char* end = begin + field.size();
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr != end)
            fail("invalid number '" + field + "'");
        return v;
    }

    bool parse_flag(const std::string& field) const {
        if (field == "1" || field == "true")
            return true;
        if (field == "0" || field == "false")
            return false;
        fail("invalid flag '" + field + "' (use 0/1 or true/false)");
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    int line_ = 0;
};

void check_plain_token(const std::string& token, const std::string& what) {
    if (token.empty())
        throw DataError(what + " is empty");
    if (token.find_first_of(",\r\n") != std::string::npos)
        throw DataError(what + " '" + token + "' contains a separator character");
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    return out;
}

std::string member_name(Eigen::Index j) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "m%04lld", static_cast<long long>(j + 1));
    return buf;
}

} // namespace

std::shared_ptr<const DataLayout> read_layout_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next_row(fields))
        reader.fail("empty file");
    static const std::vector<std::string> kHeader = {"id",   "well", "x",          "y",
                                                     "time", "kind", "is_history", "noise_std"};
    if (fields != kHeader)
        reader.fail("expected header id,well,x,y,time,kind,is_history,noise_std");

    std::vector<DataElement> elements;
    while (reader.next_row(fields)) {
        reader.expect_fields(fields, 8);
        DataElement e;
        e.id = fields[0];
        e.well_id = fields[1];
        e.x = reader.parse_double(fields[2]);
        e.y = reader.parse_double(fields[3]);
        e.time = reader.parse_double(fields[4]);
        try {
            e.kind = data_kind_from_string(fields[5]);
        } catch (const DataError& err) {
            reader.fail(err.what());
        }
        e.is_history = reader.parse_flag(fields[6]);
        e.noise_std = reader.parse_double(fields[7]);
        elements.push_back(std::move(e));
    }
    try {
        return std::make_shared<const DataLayout>(std::move(elements));
    } catch (const DataError& err) {
        throw DataError(path + ": " + err.what());
    }
}

void write_layout_csv(const std::string& path, const DataLayout& layout) {
    auto out = open_for_write(path);
    out << "id,well,x,y,time,kind,is_history,noise_std\n";
    for (const DataElement& e : layout.elements()) {
        check_plain_token(e.id, "element id");
        check_plain_token(e.well_id, "well id");
        out << e.id << ',' << e.well_id << ',' << format_double(e.x) << ','
            << format_double(e.y) << ',' << format_double(e.time) << ',' << to_string(e.kind)
            << ',' << (e.is_history ? '1' : '0') << ',' << format_double(e.noise_std) << '\n';
    }
    if (!out)
        throw DataError("write failed for " + path);
}

EnsembleMatrix read_ensemble_csv(const std::string& path,
                                 std::shared_ptr<const DataLayout> layout) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next_row(fields))
        reader.fail("empty file");
    if (fields.size() < 2 || fields[0] != "id")
        reader.fail("expected header id,m0001,...");
    const Eigen::Index n_members = static_cast<Eigen::Index>(fields.size()) - 1;

    Eigen::MatrixXd data(layout->size(), n_members);
    Eigen::Index row = 0;
    while (reader.next_row(fields)) {
        if (row >= layout->size())
            reader.fail("ensemble has more rows than the layout's " +
                        std::to_string(layout->size()) + " elements");
        reader.expect_fields(fields, static_cast<std::size_t>(n_members) + 1);
        if (fields[0] != (*layout)[row].id)
            reader.fail("element id '" + fields[0] + "' does not match layout order (expected '" +
                        (*layout)[row].id + "')");
        for (Eigen::Index j = 0; j < n_members; ++j)
            data(row, j) = reader.parse_double(fields[static_cast<std::size_t>(j) + 1]);
        ++row;
    }
    if (row != layout->size())
        throw DataError(path + ": ensemble has " + std::to_string(row) + " rows, layout has " +
                        std::to_string(layout->size()) + " elements");
    try {
        return EnsembleMatrix(std::move(data), std::move(layout));
    } catch (const DataError& err) {
        throw DataError(path + ": " + err.what());
    }
}

void write_ensemble_csv(const std::string& path, const EnsembleMatrix& ens) {
    auto out = open_for_write(path);
    out << "id";
    for (Eigen::Index j = 0; j < ens.members(); ++j)
        out << ',' << member_name(j);
    out << '\n';
    const DataLayout& layout = ens.layout();
    for (Eigen::Index i = 0; i < ens.size(); ++i) {
        check_plain_token(layout[i].id, "element id");
        out << layout[i].id;
        for (Eigen::Index j = 0; j < ens.members(); ++j)
            out << ',' << format_double(ens.data()(i, j));
        out << '\n';
    }
    if (!out)
        throw DataError("write failed for " + path);
}

Observations read_observations_csv(const std::string& path, const DataLayout& layout) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next_row(fields))
        reader.fail("empty file");
    if (!(fields.size() == 3 && fields[0] == "id" && fields[1] == "value" &&
          fields[2] == "noise_std"))
        reader.fail("expected header id,value,noise_std");

    // history position per element id; forecast ids map to -1 for the
    // dedicated non-history message.
    std::unordered_map<std::string, Eigen::Index> positions;
    for (Eigen::Index i = 0; i < layout.size(); ++i)
        positions.emplace(layout[i].id, -1);
    const auto& hist = layout.history_indices();
    for (std::size_t k = 0; k < hist.size(); ++k)
        positions[layout[hist[k]].id] = static_cast<Eigen::Index>(k);

    Observations obs;
    obs.values.resize(layout.history_size());
    obs.error_std = layout.history_noise_std();
    std::vector<bool> seen(static_cast<std::size_t>(layout.history_size()), false);

    while (reader.next_row(fields)) {
        if (fields.size() != 2 && fields.size() != 3)
            reader.fail("expected 2 or 3 fields, got " + std::to_string(fields.size()));
        const auto it = positions.find(fields[0]);
        if (it == positions.end())
            reader.fail("unknown element id '" + fields[0] + "'");
        if (it->second < 0)
            reader.fail("observation targets non-history element '" + fields[0] + "'");
        const auto k = static_cast<std::size_t>(it->second);
        if (seen[k])
            reader.fail("duplicate observation for element '" + fields[0] + "'");
        seen[k] = true;
        obs.values[it->second] = reader.parse_double(fields[1]);
        if (fields.size() == 3 && !fields[2].empty())
            obs.error_std[it->second] = reader.parse_double(fields[2]);
    }

    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k])
            throw DataError(path + ": missing observation for history element '" +
                            layout[hist[k]].id + "'");
    try {
        obs.validate(layout);
    } catch (const DataError& err) {
        throw DataError(path + ": " + err.what());
    }
    return obs;
}

void write_observations_csv(const std::string& path, const DataLayout& layout,
                            const Observations& obs) {
    obs.validate(layout);
    auto out = open_for_write(path);
    out << "id,value,noise_std\n";
    const auto& hist = layout.history_indices();
    for (std::size_t k = 0; k < hist.size(); ++k) {
        check_plain_token(layout[hist[k]].id, "element id");
        out << layout[hist[k]].id << ',' << format_double(obs.values[static_cast<Eigen::Index>(k)])
            << ',' << format_double(obs.error_std[static_cast<Eigen::Index>(k)]) << '\n';
    }
    if (!out)
        throw DataError("write failed for " + path);
}

Eigen::VectorXd read_vector_csv(const std::string& path, const DataLayout& layout) {
    CsvReader reader(path);
    std::vector<std::string> fields;
    if (!reader.next_row(fields))
        reader.fail("empty file");
    if (fields.size() != 2 || fields[0] != "id")
        reader.fail("expected header id,<value>");

    Eigen::VectorXd values(layout.size());
    Eigen::Index row = 0;
    while (reader.next_row(fields)) {
        if (row >= layout.size())
            reader.fail("more rows than the layout's " + std::to_string(layout.size()) +
                        " elements");
        reader.expect_fields(fields, 2);
        if (fields[0] != layout[row].id)
            reader.fail("element id '" + fields[0] + "' does not match layout order (expected '" +
                        layout[row].id + "')");
        values[row] = reader.parse_double(fields[1]);
        ++row;
    }
    if (row != layout.size())
        throw DataError(path + ": has " + std::to_string(row) + " rows, layout has " +
                        std::to_string(layout.size()) + " elements");
    return values;
}

void write_vector_csv(const std::string& path, const DataLayout& layout,
                      const Eigen::VectorXd& values, const std::string& value_header) {
    if (values.size() != layout.size())
        throw DataError("vector has " + std::to_string(values.size()) + " entries, layout has " +
                        std::to_string(layout.size()));
    check_plain_token(value_header, "column header");
    auto out = open_for_write(path);
    out << "id," << value_header << '\n';
    for (Eigen::Index i = 0; i < layout.size(); ++i) {
        check_plain_token(layout[i].id, "element id");
        out << layout[i].id << ',' << format_double(values[i]) << '\n';
    }
    if (!out)
        throw DataError("write failed for " + path);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);

    const auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t");
        if (first == std::string::npos)
            return std::string();
        const auto last = s.find_last_not_of(" \t");
        return s.substr(first, last - first + 1);
    };

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#')
            continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
    }
    return kv;
}

} // namespace dsi
