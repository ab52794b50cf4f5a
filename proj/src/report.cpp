#include "dimer/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dimer::report {

namespace {

std::string num(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// Statuses and messages are free text; quote when needed.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json jnum(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

std::string render_csv(const Report& r, int precision) {
    std::ostringstream os;
    if (r.command == "verify") {
        os << kCheckHeader << '\n';
        for (const auto& c : r.checks) {
            os << csv_field(c.identity) << ',' << num(c.t.real(), precision) << ',' << num(c.t.imag(), precision)
               << ',' << (c.n ? std::to_string(*c.n) : "") << ',' << num(c.residual, precision) << ','
               << num(c.threshold, precision) << ',' << (c.pass ? "true" : "false") << ',' << csv_field(c.status)
               << '\n';
        }
        return os.str();
    }
    os << kValueHeader << '\n';
    for (const auto& row : r.rows) {
        os << num(row.t.real(), precision) << ',' << num(row.t.imag(), precision) << ','
           << (row.n ? std::to_string(*row.n) : "") << ',';
        if (row.value) os << num(row.value->real(), precision) << ',' << num(row.value->imag(), precision) << ',';
        else os << ",,";
        if (row.target) os << num(row.target->real(), precision) << ',' << num(row.target->imag(), precision) << ',';
        else os << ",,";
        if (row.abs_error) os << num(*row.abs_error, precision);
        os << ',' << csv_field(row.status) << '\n';
    }
    return os.str();
}

std::string render_json(const Report& r) {
    nlohmann::json j;
    j["command"] = r.command;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json o;
        o["t_re"] = jnum(row.t.real());
        o["t_im"] = jnum(row.t.imag());
        o["n"] = row.n ? nlohmann::json(*row.n) : nlohmann::json(nullptr);
        o["value_re"] = row.value ? jnum(row.value->real()) : nullptr;
        o["value_im"] = row.value ? jnum(row.value->imag()) : nullptr;
        o["target_re"] = row.target ? jnum(row.target->real()) : nullptr;
        o["target_im"] = row.target ? jnum(row.target->imag()) : nullptr;
        o["abs_error"] = row.abs_error ? jnum(*row.abs_error) : nullptr;
        o["status"] = row.status;
        j["rows"].push_back(std::move(o));
    }
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json o;
        o["identity"] = c.identity;
        o["t_re"] = jnum(c.t.real());
        o["t_im"] = jnum(c.t.imag());
        o["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
        o["residual"] = jnum(c.residual);
        o["threshold"] = jnum(c.threshold);
        o["pass"] = c.pass;
        o["status"] = c.status;
        j["checks"].push_back(std::move(o));
    }
    if (r.error) j["error"] = {{"code", r.error->code}, {"message", r.error->message}, {"exit_code", r.error->exit_code}};
    return j.dump(2) + "\n";
}

}  // namespace dimer::report
