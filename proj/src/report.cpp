#include "jdweak/report.hpp"

#include <cstdio>
#include <optional>
#include <sstream>

namespace jdweak {

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json budget_json(const ToleranceBudget& b) {
    return {{"total", b.total},
            {"statistical", b.statistical},
            {"time", b.time},
            {"time_mesh", b.time_mesh},
            {"time_statistical", b.time_statistical}};
}

}  // namespace

json to_json(const AdaptiveRunReport& r) {
    json iterations = json::array();
    for (const auto& it : r.iterations) {
        iterations.push_back({{"iteration", it.iteration},
                              {"N", it.n},
                              {"M", it.m},
                              {"mean_payoff", it.mean_payoff},
                              {"E_C", opt(it.computational_error)},
                              {"E_T", opt(it.time_error)},
                              {"E_TT", opt(it.indicator_sum)},
                              {"E_TS", opt(it.time_statistical)},
                              {"E_S", it.statistical},
                              {"max_indicator", opt(it.max_indicator)},
                              {"action", it.action},
                              {"final_phase", it.final_phase}});
    }
    json batches = json::array();
    for (const auto& b : r.batches) {
        batches.push_back({{"batch", b.batch},
                           {"M", b.m},
                           {"nbar_used", b.nbar_used},
                           {"mean_payoff", b.mean_payoff},
                           {"std_payoff", b.std_payoff},
                           {"E_S", b.statistical},
                           {"mean_NA", b.mean_steps},
                           {"min_NA", b.min_steps},
                           {"max_NA", b.max_steps},
                           {"std_NA", b.std_steps},
                           {"max_jumps", b.max_jumps},
                           {"floor_hits", b.floor_hits}});
    }
    json meshes = json::array();
    for (const auto& m : r.mesh_history) meshes.push_back(m);
    return {{"algorithm", r.algorithm},
            {"model", r.model},
            {"tol", r.tol},
            {"budget", budget_json(r.budget)},
            {"density", to_string(r.options.density)},
            {"estimate", r.estimate},
            {"E_S", r.statistical},
            {"E_TT", opt(r.indicator_sum)},
            {"E_TS", opt(r.time_statistical)},
            {"exact", opt(r.exact)},
            {"E_C", opt(r.computational_error)},
            {"final_M", r.final_m},
            {"iterations", iterations},
            {"batches", batches},
            {"mesh_history", meshes},
            {"M_history", r.m_history},
            {"work",
             {{"realizations", r.work.realizations},
              {"final_steps", r.work.final_steps},
              {"total_steps", r.work.total_steps}}}};
}

json to_json(const SimulationSummary& s) {
    return {{"N", s.n},
            {"M", s.m},
            {"mean", s.mean},
            {"std", s.std},
            {"E_S", s.statistical},
            {"exact", opt(s.exact)},
            {"E_C", opt(s.computational_error)},
            {"mean_NA", s.mean_steps},
            {"mean_jumps", s.mean_jumps},
            {"work", s.work}};
}

json to_json(const EfficiencyResult& e) {
    return {{"N", e.n},
            {"M", e.m},
            {"density", to_string(e.density)},
            {"mean_payoff", e.mean_payoff},
            {"E_T", e.time_error},
            {"E_S", e.statistical},
            {"E_TS", e.time_statistical},
            {"exact", opt(e.exact)},
            {"E_C", opt(e.computational_error)},
            {"interval_low", opt(e.lower)},
            {"interval_high", opt(e.upper)},
            {"efficiency_index", opt(e.efficiency_index)}};
}

json report_envelope(const std::string& command, const std::string& config_hash, const json& config,
                     json payload) {
    return {{"schema_version", kReportSchemaVersion},
            {"command", command},
            {"config_hash", config_hash},
            {"config", config},
            {"result", std::move(payload)}};
}

void write_iterations_csv(std::ostream& out, const AdaptiveRunReport& r, const std::string& hash) {
    out << "config_hash,iter,N,M,mean_payoff,E_C,E_T,E_TT,E_TS,E_S,max_indicator,action\n";
    for (const auto& it : r.iterations) {
        out << hash << ',' << it.iteration << ',' << it.n << ',' << it.m << ',' << num(it.mean_payoff) << ','
            << num(it.computational_error) << ',' << num(it.time_error) << ',' << num(it.indicator_sum) << ','
            << num(it.time_statistical) << ',' << num(it.statistical) << ',' << num(it.max_indicator) << ','
            << it.action << '\n';
    }
}

void write_batches_csv(std::ostream& out, const AdaptiveRunReport& r, const std::string& hash) {
    out << "config_hash,batch,TOL,M,nbar_used,mean_payoff,mean_NA,min_NA,max_NA,std_NA,max_jumps,"
           "E_S,E_C,floor_hits\n";
    for (const auto& b : r.batches) {
        std::optional<double> ec;
        if (r.exact) ec = *r.exact - b.mean_payoff;
        out << hash << ',' << b.batch << ',' << num(r.tol) << ',' << b.m << ',' << num(b.nbar_used) << ','
            << num(b.mean_payoff) << ',' << num(b.mean_steps) << ',' << b.min_steps << ',' << b.max_steps << ','
            << num(b.std_steps) << ',' << b.max_jumps << ',' << num(b.statistical) << ',' << num(ec) << ','
            << b.floor_hits << '\n';
    }
}

void write_simulation_csv(std::ostream& out, const SimulationSummary& s, const std::string& hash) {
    out << "config_hash,N,M,mean,std,E_S,E_C,mean_NA,mean_jumps\n";
    out << hash << ',' << s.n << ',' << s.m << ',' << num(s.mean) << ',' << num(s.std) << ','
        << num(s.statistical) << ',' << num(s.computational_error) << ',' << num(s.mean_steps) << ','
        << num(s.mean_jumps) << '\n';
}

void write_efficiency_csv(std::ostream& out, const EfficiencyResult& e, const std::string& hash) {
    out << "config_hash,N,M,density,mean_payoff,E_T,E_S,E_TS,E_C,interval_low,interval_high,efficiency_index\n";
    out << hash << ',' << e.n << ',' << e.m << ',' << to_string(e.density) << ',' << num(e.mean_payoff) << ','
        << num(e.time_error) << ',' << num(e.statistical) << ',' << num(e.time_statistical) << ','
        << num(e.computational_error) << ',' << num(e.lower) << ',' << num(e.upper) << ','
        << num(e.efficiency_index) << '\n';
}

}  // namespace jdweak
