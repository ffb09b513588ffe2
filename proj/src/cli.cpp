#include "csa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "csa/de.hpp"
#include "csa/mc.hpp"

namespace csa::cli {

namespace {

using nlohmann::json;

// Raised for bad user input; maps to exit_usage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

// A result table plus the metadata needed to reproduce it.
struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string csv_cell(const json& cell) {
    if (cell.is_null()) return "";
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_number_unsigned()) return std::to_string(cell.get<std::uint64_t>());
    if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
    return format_number(cell.get<double>());
}

void write_csv(std::ostream& os, const Table& table) {
    for (const auto& [key, value] : table.metadata) {
        os << "# " << key << ": " << value << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        os << (c ? "," : "") << table.columns[c];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << csv_cell(row[c]);
        }
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& table) {
    json doc;
    doc["metadata"] = json::object();
    for (const auto& [key, value] : table.metadata) doc["metadata"][key] = value;
    doc["columns"] = table.columns;
    doc["rows"] = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
        doc["rows"].push_back(std::move(obj));
    }
    os << doc.dump(2) << '\n';
}

struct OutputOptions {
    std::string path = "-";
    std::string format = "csv";
};

void emit(const Table& table, const OutputOptions& opts, std::ostream& out) {
    auto write = [&](std::ostream& os) {
        if (opts.format == "json") {
            write_json(os, table);
        } else {
            write_csv(os, table);
        }
    };
    if (opts.path == "-") {
        write(out);
        return;
    }
    std::ofstream file(opts.path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + opts.path);
    write(file);
    if (!file.flush()) throw std::runtime_error("failed writing " + opts.path);
}

CodeParams parse_code(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw UsageError("code '" + text + "' must be written n,k");
    }
    int n = 0;
    int k = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto rn = std::from_chars(first, first + comma, n);
    const auto rk = std::from_chars(first + comma + 1, last, k);
    if (rn.ec != std::errc{} || rn.ptr != first + comma || rk.ec != std::errc{} || rk.ptr != last) {
        throw UsageError("code '" + text + "' must be written n,k");
    }
    try {
        return CodeParams(n, k);
    } catch (const std::invalid_argument&) {
        throw UsageError("invalid code pair (" + std::to_string(n) + "," + std::to_string(k) +
                         "): need 1 <= k < n");
    }
}

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw UsageError(what + ": '" + text + "' is not a number");
    }
    return v;
}

// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        const double lo = parse_double(text.substr(0, c1), "g-grid start");
        const double hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "g-grid stop");
        const double step = parse_double(text.substr(c2 + 1), "g-grid step");
        if (!(step > 0.0) || hi < lo) throw UsageError("g-grid: need step > 0 and stop >= start");
        const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (count > 100000) throw UsageError("g-grid: too many points");
        for (long long i = 0; i < count; ++i) {
            grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
        }
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(parse_double(item, "g-grid value"));
    }
    if (grid.empty()) throw UsageError("g-grid is empty");
    for (const double g : grid) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw UsageError("g-grid: offered load " + format_number(g) + " must be non-negative");
        }
    }
    return grid;
}

std::string join_codes(const std::vector<CodeParams>& codes) {
    std::string s;
    for (const auto& c : codes) s += (s.empty() ? "" : " ") + std::to_string(c.n()) + "," + std::to_string(c.k());
    return s;
}

std::string join_grid(const std::vector<double>& grid) {
    std::string s;
    for (const double g : grid) s += (s.empty() ? "" : ",") + format_number(g);
    return s;
}

// Default code set for the threshold-versus-power-penalty comparison.
const std::vector<std::pair<int, int>> fig3_codes = {
    {2, 1}, {3, 1}, {4, 1}, {3, 2}, {4, 2}, {4, 3}, {5, 3}, {5, 4}, {6, 3},
    {6, 4}, {6, 5}, {7, 4}, {7, 5}, {7, 6}, {8, 4}, {8, 6}, {8, 7}, {9, 8},
};

// Reads `key = value` lines and appends `--key value...` for every key the
// command line did not already set.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    auto it = std::find_if(args.begin(), args.end(),
                           [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (it == args.end()) return args;
    std::string path;
    if (*it == "--config") {
        if (std::next(it) == args.end()) throw UsageError("--config needs a file path");
        path = *std::next(it);
        it = args.erase(it, std::next(it, 2));
    } else {
        path = it->substr(std::string("--config=").size());
        args.erase(it);
    }
    std::ifstream file(path);
    if (!file) throw UsageError("cannot read config file " + path);

    auto given = [&](const std::string& key) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    std::vector<std::string> extra;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (given(key)) continue;
        if (value == "true") {
            extra.push_back("--" + key);
            continue;
        }
        extra.push_back("--" + key);
        std::stringstream ss(value);
        std::string token;
        while (ss >> token) extra.push_back(token);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--out", opts.path, "Output file ('-' for stdout)");
    cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

struct ThresholdArgs {
    std::vector<std::string> codes;
    bool fig3 = false;
    double lo = 0.01;
    double hi = 2.0;
    double tol = 1e-4;
    int max_iter = 5000;
    double epsilon = 1e-10;
    OutputOptions output;
};

struct SweepArgs {
    std::string protocol = "csa";
    std::string code = "7,4";
    long long n_sa = 400;
    bool asymptotic = false;
    std::string grid = "0.05:1.4:0.05";
    int frames = 1000;
    int i_max = default_ic_iterations;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool fig4 = false;
    std::string out_dir = "fig4";
    OutputOptions output;
};

struct TraceArgs {
    std::string code = "4,2";
    double g = 0.4;
    int max_iter = 5000;
    double epsilon = 1e-10;
    OutputOptions output;
};

struct BoundArgs {
    std::vector<int> ks;
    OutputOptions output;
};

struct PenaltyArgs {
    std::vector<std::string> codes;
    OutputOptions output;
};

DeSettings checked_settings(int max_iter, double epsilon) {
    if (max_iter < 1) throw UsageError("max-iter must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0, 1)");
    return DeSettings{max_iter, epsilon};
}

// Each command validates all input first (throwing UsageError) and returns
// the work to run.
using Job = std::function<void(std::ostream&)>;

Job plan_threshold(const ThresholdArgs& a) {
    std::vector<CodeParams> codes;
    if (a.fig3) {
        for (const auto& [n, k] : fig3_codes) codes.emplace_back(n, k);
    }
    for (const auto& text : a.codes) codes.push_back(parse_code(text));
    if (codes.empty()) throw UsageError("threshold: give at least one --code n,k (or --fig3)");
    const ThresholdSearch search{a.lo, a.hi, a.tol, checked_settings(a.max_iter, a.epsilon)};
    if (!(search.tol > 0.0) || !(search.bracket_lo > 0.0) || !(search.bracket_lo < search.bracket_hi)) {
        throw UsageError("threshold: need 0 < lo < hi and tol > 0");
    }
    return [codes, search, output = a.output](std::ostream& out) {
        std::vector<ThresholdResult> results;
        for (const auto& code : codes) results.push_back(threshold(code, search));
        std::stable_sort(results.begin(), results.end(), [](const auto& x, const auto& y) {
            return x.code.power_penalty_db() < y.code.power_penalty_db();
        });
        Table table;
        table.metadata = {{"tool", tool_version},
                          {"command", "threshold"},
                          {"codes", join_codes(codes)},
                          {"lo", format_number(search.bracket_lo)},
                          {"hi", format_number(search.bracket_hi)},
                          {"tol", format_number(search.tol)},
                          {"max_iter", std::to_string(search.settings.max_iterations)},
                          {"epsilon", format_number(search.settings.epsilon)}};
        table.columns = {"n", "k", "rate", "delta_p_db", "g_star", "spc_bound"};
        for (const auto& r : results) {
            const json bound = r.code.n() == r.code.k() + 1 ? json(spc_bound(r.code.k())) : json();
            table.rows.push_back({r.code.n(), r.code.k(), r.code.rate(), power_penalty(r.code), r.g_star, bound});
        }
        emit(table, output, out);
    };
}

std::vector<json> stats_row(const ThroughputStats& s) {
    return {std::string(to_string(s.protocol)),
            s.code.n(),
            s.code.k(),
            s.n_sa ? json(*s.n_sa) : json("inf"),
            s.g_nominal,
            s.g_realized,
            s.frames,
            s.i_max,
            s.seed,
            s.t_mean,
            s.t_stderr,
            s.plr_mean,
            s.plr_stderr};
}

const std::vector<std::string> sweep_columns = {"protocol", "n", "k", "n_sa", "g_nominal", "g_realized", "frames",
                                                "i_max", "seed", "t_mean", "t_stderr", "plr_mean", "plr_stderr"};

Table sweep_table(const std::vector<ThroughputStats>& rows, const std::string& protocol, const CodeParams& code,
                  const std::string& n_sa, const std::vector<double>& grid, int frames, int i_max,
                  std::uint64_t seed) {
    Table table;
    table.metadata = {{"tool", tool_version}, {"command", "sweep"},
                      {"protocol", protocol},  {"code", join_codes({code})},
                      {"n_sa", n_sa},          {"g_grid", join_grid(grid)},
                      {"frames", std::to_string(frames)},
                      {"i_max", std::to_string(i_max)},
                      {"seed", std::to_string(seed)}};
    table.columns = sweep_columns;
    for (const auto& r : rows) table.rows.push_back(stats_row(r));
    return table;
}

Job plan_sweep(const SweepArgs& a) {
    const CodeParams code = parse_code(a.code);
    const auto grid = parse_grid(a.grid);
    if (a.frames < 1) throw UsageError("frames must be >= 1");
    if (a.i_max < 1) throw UsageError("i-max must be >= 1");
    if (a.jobs < 1) throw UsageError("jobs must be >= 1");
    if (!a.asymptotic || a.fig4) {
        if (a.n_sa < 1) throw UsageError("n-sa must be >= 1");
        for (const long long n_sa : a.fig4 ? std::vector<long long>{100, 400} : std::vector<long long>{a.n_sa}) {
            for (const double g : grid) {
                try {
                    FrameConfig::from_load(n_sa, code, g);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(std::string("sweep: ") + e.what());
                }
            }
        }
    }

    if (a.fig4) {
        return [a, code, grid](std::ostream& out) {
            std::filesystem::create_directories(a.out_dir);
            const std::string ext = a.output.format == "json" ? ".json" : ".csv";
            for (const Protocol protocol : {Protocol::sa, Protocol::thma, Protocol::csa}) {
                const std::string name(to_string(protocol));
                for (const long long n_sa : {100LL, 400LL}) {
                    const SimulationConfig config{protocol, code, n_sa, a.frames, a.i_max, a.seed, a.jobs};
                    const auto rows = sweep(config, grid);
                    OutputOptions o{(std::filesystem::path(a.out_dir) / (name + "_nsa" + std::to_string(n_sa) + ext)).string(),
                                    a.output.format};
                    emit(sweep_table(rows, name, code, std::to_string(n_sa), grid, a.frames, a.i_max, a.seed), o, out);
                }
                const auto rows = asymptotic_sweep(protocol, code, grid, a.i_max);
                OutputOptions o{(std::filesystem::path(a.out_dir) / (name + "_asymptotic" + ext)).string(), a.output.format};
                emit(sweep_table(rows, name, code, "inf", grid, 0, a.i_max, a.seed), o, out);
            }
        };
    }

    const Protocol protocol = [&] {
        try {
            return parse_protocol(a.protocol);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    return [a, code, grid, protocol](std::ostream& out) {
        std::vector<ThroughputStats> rows;
        if (a.asymptotic) {
            rows = asymptotic_sweep(protocol, code, grid, a.i_max);
        } else {
            rows = sweep(SimulationConfig{protocol, code, a.n_sa, a.frames, a.i_max, a.seed, a.jobs}, grid);
        }
        emit(sweep_table(rows, a.protocol, code, a.asymptotic ? "inf" : std::to_string(a.n_sa), grid,
                         a.asymptotic ? 0 : a.frames, a.i_max, a.seed),
             a.output, out);
    };
}

Job plan_trace(const TraceArgs& a) {
    const CodeParams code = parse_code(a.code);
    if (!(a.g > 0.0) || !std::isfinite(a.g)) throw UsageError("g must be positive");
    const DeSettings settings = checked_settings(a.max_iter, a.epsilon);
    return [a, code, settings](std::ostream& out) {
        const DeTrace trace = de_run(a.g, code, settings);
        Table table;
        table.metadata = {{"tool", tool_version},
                          {"command", "de-trace"},
                          {"code", join_codes({code})},
                          {"g", format_number(a.g)},
                          {"max_iter", std::to_string(settings.max_iterations)},
                          {"epsilon", format_number(settings.epsilon)},
                          {"converged", trace.converged ? "true" : "false"},
                          {"iterations_used", std::to_string(trace.iterations_used)},
                          {"final_p", format_number(trace.final_p)}};
        table.columns = {"i", "p", "q"};
        for (const auto& s : trace.steps) table.rows.push_back({s.iteration, s.p, s.q});
        emit(table, a.output, out);
    };
}

Job plan_bound(const BoundArgs& a) {
    std::vector<int> ks = a.ks;
    if (ks.empty()) ks = {1, 2, 3, 4, 5, 6, 7, 8};
    for (const int k : ks) {
        if (k < 1) throw UsageError("bound: k must be >= 1, got " + std::to_string(k));
    }
    return [ks, output = a.output](std::ostream& out) {
        Table table;
        std::string list;
        for (const int k : ks) list += (list.empty() ? "" : ",") + std::to_string(k);
        table.metadata = {{"tool", tool_version}, {"command", "bound"}, {"k", list}};
        table.columns = {"k", "n", "spc_bound", "g_star"};
        for (const int k : ks) {
            const CodeParams code(k + 1, k);
            table.rows.push_back({k, k + 1, spc_bound(k), threshold(code).g_star});
        }
        emit(table, output, out);
    };
}

Job plan_penalty(const PenaltyArgs& a) {
    std::vector<CodeParams> codes;
    for (const auto& text : a.codes) codes.push_back(parse_code(text));
    if (codes.empty()) throw UsageError("penalty: give at least one --code n,k");
    return [codes, output = a.output](std::ostream& out) {
        Table table;
        table.metadata = {{"tool", tool_version}, {"command", "penalty"}, {"codes", join_codes(codes)}};
        table.columns = {"n", "k", "rate", "delta_p_db"};
        for (const auto& c : codes) table.rows.push_back({c.n(), c.k(), c.rate(), power_penalty(c)});
        emit(table, output, out);
    };
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coded slotted ALOHA: density-evolution thresholds and Monte Carlo throughput"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    ThresholdArgs threshold_args;
    auto* threshold_cmd = app.add_subcommand("threshold", "Convergence threshold G* per (n,k) code");
    threshold_cmd->add_option("--code", threshold_args.codes, "Code as n,k (repeatable)");
    threshold_cmd->add_flag("--fig3", threshold_args.fig3, "Add the preset comparison code set");
    threshold_cmd->add_option("--lo", threshold_args.lo, "Lower bisection bracket");
    threshold_cmd->add_option("--hi", threshold_args.hi, "Upper bisection bracket");
    threshold_cmd->add_option("--tol", threshold_args.tol, "Bisection half-width");
    threshold_cmd->add_option("--max-iter", threshold_args.max_iter, "DE iteration cap");
    threshold_cmd->add_option("--epsilon", threshold_args.epsilon, "DE success level for p");
    add_output_options(threshold_cmd, threshold_args.output);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Throughput versus offered load");
    sweep_cmd->add_option("--protocol", sweep_args.protocol, "sa, thma or csa");
    sweep_cmd->add_option("--code", sweep_args.code, "Code as n,k");
    sweep_cmd->add_option("--n-sa", sweep_args.n_sa, "SA-equivalent slots per frame");
    sweep_cmd->add_flag("--asymptotic", sweep_args.asymptotic, "Use density evolution (N_SA -> infinity)");
    sweep_cmd->add_option("--g-grid,--g", sweep_args.grid, "Loads as start:stop:step or a comma list");
    sweep_cmd->add_option("--frames", sweep_args.frames, "Frames per point");
    sweep_cmd->add_option("--i-max", sweep_args.i_max, "Maximum IC iterations");
    sweep_cmd->add_option("--seed", sweep_args.seed, "Master seed")->envname("CSA_SEED");
    sweep_cmd->add_option("--jobs", sweep_args.jobs, "Worker threads");
    sweep_cmd->add_flag("--fig4", sweep_args.fig4, "SA, THMA and CSA curves at N_SA 100, 400 and asymptotic");
    sweep_cmd->add_option("--out-dir", sweep_args.out_dir, "Directory for --fig4 files");
    add_output_options(sweep_cmd, sweep_args.output);

    TraceArgs trace_args;
    auto* trace_cmd = app.add_subcommand("de-trace", "Per-iteration density-evolution state");
    trace_cmd->add_option("--code", trace_args.code, "Code as n,k");
    trace_cmd->add_option("--g", trace_args.g, "Offered load");
    trace_cmd->add_option("--max-iter", trace_args.max_iter, "Iteration cap");
    trace_cmd->add_option("--epsilon", trace_args.epsilon, "Success level for p");
    add_output_options(trace_cmd, trace_args.output);

    BoundArgs bound_args;
    auto* bound_cmd = app.add_subcommand("bound", "Single parity-check threshold bound 1/(k+1)");
    bound_cmd->add_option("--k", bound_args.ks, "Values of k (default 1..8)");
    add_output_options(bound_cmd, bound_args.output);

    PenaltyArgs penalty_args;
    auto* penalty_cmd = app.add_subcommand("penalty", "Average power penalty 10 log10(n/k)");
    penalty_cmd->add_option("--code", penalty_args.codes, "Code as n,k (repeatable)");
    add_output_options(penalty_cmd, penalty_args.output);

    Job job;
    try {
        const auto args = merge_config(raw_args);
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());

        if (threshold_cmd->parsed()) job = plan_threshold(threshold_args);
        if (sweep_cmd->parsed()) job = plan_sweep(sweep_args);
        if (trace_cmd->parsed()) job = plan_trace(trace_args);
        if (bound_cmd->parsed()) job = plan_bound(bound_args);
        if (penalty_cmd->parsed()) job = plan_penalty(penalty_args);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e, out, err);
        return status == 0 ? exit_ok : exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        job(out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_ok;
}

}  // namespace csa::cli
