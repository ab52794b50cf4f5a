#pragma once

// Tabular results of a CLI run and their CSV / JSON renderings.

#include <optional>
#include <string>
#include <vector>

#include "dimer/spectral_core.hpp"

namespace dimer::report {

struct ValueRow {
    cplx t;
    std::optional<int> n;
    std::optional<cplx> value;
    std::optional<cplx> target;
    std::optional<double> abs_error;
    std::string status = "ok";
};

struct CheckRow {
    std::string identity;
    cplx t;
    std::optional<int> n;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string status;
};

struct ErrorInfo {
    std::string code;
    std::string message;
    int exit_code = 0;
};

struct Report {
    std::string command;
    std::vector<ValueRow> rows;
    std::vector<CheckRow> checks;
    std::optional<ErrorInfo> error;
};

inline const char* kValueHeader = "t_re,t_im,n,value_re,value_im,target_re,target_im,abs_error,status";
inline const char* kCheckHeader = "identity,t_re,t_im,n,residual,threshold,pass,status";

/// Value rows for every command except verify, which emits check rows.
/// Numbers use printf %.{precision}g; absent fields are empty.
std::string render_csv(const Report& r, int precision);

/// Doubles are written in shortest round-trip form; absent or non-finite
/// numbers become null.
std::string render_json(const Report& r);

}  // namespace dimer::report
