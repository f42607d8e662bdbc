#include "qet/scenario.hpp"

#include "qet/fft.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace qet {

namespace {

constexpr const char* kSchema = "qet.report.v1";
constexpr const char* kToolName = "qet";
constexpr const char* kToolVersion = "0.1.0";

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw validation_error("config field '" + path + "': " + why);
}

const Json& get_required(const Json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        bad_field(path.empty() ? key : path + "." + key, "missing");
    }
    return *it;
}

std::string join_path(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const Json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) {
            if (it.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            bad_field(join_path(path, it.key().c_str()), "unknown key");
        }
    }
}

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) bad_field(path, "expected an object");
}

double get_number(const Json& j, const std::string& path, const char* key) {
    const Json& v = get_required(j, path, key);
    if (!v.is_number()) bad_field(join_path(path, key), "expected a number");
    return v.get<double>();
}

double get_number_or(const Json& j, const std::string& path, const char* key,
                     double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) bad_field(join_path(path, key), "expected a number");
    return it->get<double>();
}

Eigen::Index get_integer(const Json& j, const std::string& path, const char* key) {
    const Json& v = get_required(j, path, key);
    if (!v.is_number_integer()) bad_field(join_path(path, key), "expected an integer");
    return v.get<Eigen::Index>();
}

std::string get_string(const Json& j, const std::string& path, const char* key) {
    const Json& v = get_required(j, path, key);
    if (!v.is_string()) bad_field(join_path(path, key), "expected a string");
    return v.get<std::string>();
}

Complex parse_complex(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        bad_field(path, "expected a complex number as [re, im]");
    }
    return Complex(v[0].get<double>(), v[1].get<double>());
}

Eigen::VectorXcd parse_cvector(const Json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) bad_field(path, "expected a non-empty array");
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] =
            parse_complex(v[i], path + "[" + std::to_string(i) + "]");
    }
    return out;
}

Eigen::MatrixXcd parse_cmatrix(const Json& v, const std::string& path,
                               Eigen::Index dim) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
        bad_field(path, "expected " + std::to_string(dim) + " rows");
    }
    Eigen::MatrixXcd out(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const Json& row = v[static_cast<std::size_t>(r)];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            bad_field(rpath, "expected " + std::to_string(dim) + " entries");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            out(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                      rpath + "[" + std::to_string(c) + "]");
        }
    }
    return out;
}

bool is_power_of_two_index(Eigen::Index n) {
    return n >= 2 && fft::is_power_of_two(static_cast<std::size_t>(n));
}

void parse_tolerances(const Json& j, Tolerances& tol) {
    require_object(j, "tolerances");
    check_keys(j, "tolerances",
               {"hermiticity", "state_norm", "projector_idempotency",
                "projector_spectrum", "expectation_imag", "probability_floor",
                "probability_negative", "probability_sum", "commuting_gate",
                "slice_consistency", "boundary_window_fraction",
                "boundary_mass_threshold", "max_joint_dimension",
                "oracle_dimension_cap"});
    const auto num = [&](const char* key, double& slot) {
        auto it = j.find(key);
        if (it == j.end()) return;
        if (!it->is_number() || !(it->get<double>() > 0.0)) {
            bad_field(join_path("tolerances", key), "expected a positive number");
        }
        slot = it->get<double>();
    };
    num("hermiticity", tol.hermiticity);
    num("state_norm", tol.state_norm);
    num("projector_idempotency", tol.projector_idempotency);
    num("projector_spectrum", tol.projector_spectrum);
    num("expectation_imag", tol.expectation_imag);
    num("probability_floor", tol.probability_floor);
    num("probability_negative", tol.probability_negative);
    num("probability_sum", tol.probability_sum);
    num("commuting_gate", tol.commuting_gate);
    num("slice_consistency", tol.slice_consistency);
    num("boundary_window_fraction", tol.boundary_window_fraction);
    num("boundary_mass_threshold", tol.boundary_mass_threshold);
    const auto cap = [&](const char* key, std::size_t& slot) {
        auto it = j.find(key);
        if (it == j.end()) return;
        if (!it->is_number_integer() || it->get<long long>() <= 0) {
            bad_field(join_path("tolerances", key), "expected a positive integer");
        }
        slot = it->get<std::size_t>();
    };
    cap("max_joint_dimension", tol.max_joint_dimension);
    cap("oracle_dimension_cap", tol.oracle_dimension_cap);
}

PacketSpec parse_packet(const Json& j, const std::string& path) {
    require_object(j, path);
    PacketSpec p;
    const std::string type = get_string(j, path, "type");
    if (type == "gaussian") {
        p.type = PacketSpec::Type::gaussian;
        check_keys(j, path, {"type", "omega0", "sigma", "n", "halfwidth"});
        p.omega0 = get_number(j, path, "omega0");
        p.sigma = get_number(j, path, "sigma");
        p.n = get_integer(j, path, "n");
        p.halfwidth = get_number_or(j, path, "halfwidth", 0.0);
    } else if (type == "chirped_gaussian") {
        p.type = PacketSpec::Type::chirped_gaussian;
        check_keys(j, path, {"type", "omega0", "sigma", "beta", "n", "halfwidth"});
        p.omega0 = get_number(j, path, "omega0");
        p.sigma = get_number(j, path, "sigma");
        p.beta = get_number(j, path, "beta");
        p.n = get_integer(j, path, "n");
        p.halfwidth = get_number_or(j, path, "halfwidth", 0.0);
    } else if (type == "rectangular") {
        p.type = PacketSpec::Type::rectangular;
        check_keys(j, path, {"type", "omega0", "width", "n", "span"});
        p.omega0 = get_number(j, path, "omega0");
        p.width = get_number(j, path, "width");
        p.n = get_integer(j, path, "n");
        p.span = get_number_or(j, path, "span", 2.0);
    } else if (type == "samples") {
        p.type = PacketSpec::Type::samples;
        check_keys(j, path, {"type", "omega_min", "domega", "values"});
        p.omega_min = get_number(j, path, "omega_min");
        p.domega = get_number(j, path, "domega");
        p.values = parse_cvector(get_required(j, path, "values"),
                                 join_path(path, "values"));
        p.n = p.values.size();
    } else {
        bad_field(join_path(path, "type"),
                  "unknown packet type '" + type +
                      "' (expected gaussian, chirped_gaussian, rectangular or samples)");
    }
    if (p.type != PacketSpec::Type::samples) {
        if (!is_power_of_two_index(p.n) || p.n < 4) {
            bad_field(join_path(path, "n"), "expected a power of two >= 4");
        }
        if (p.type != PacketSpec::Type::rectangular && !(p.sigma > 0.0)) {
            bad_field(join_path(path, "sigma"), "expected a positive number");
        }
        if (p.type == PacketSpec::Type::rectangular && !(p.width > 0.0)) {
            bad_field(join_path(path, "width"), "expected a positive number");
        }
    } else if (!is_power_of_two_index(p.n) || p.n < 4) {
        bad_field(join_path(path, "values"),
                  "expected a power of two >= 4 entries");
    }
    return p;
}

SpectralAmplitude build_packet(const PacketSpec& p, const Tolerances& tol) {
    switch (p.type) {
        case PacketSpec::Type::gaussian:
            return SpectralAmplitude::gaussian(p.omega0, p.sigma, p.n, p.halfwidth);
        case PacketSpec::Type::chirped_gaussian:
            return SpectralAmplitude::chirped_gaussian(p.omega0, p.sigma, p.beta,
                                                       p.n, p.halfwidth);
        case PacketSpec::Type::rectangular:
            return SpectralAmplitude::rectangular(p.omega0, p.width, p.n, p.span);
        case PacketSpec::Type::samples:
            return SpectralAmplitude::normalized(p.omega_min, p.domega, p.values, tol);
    }
    throw contract_error("build_packet: unreachable");
}

double max_abs_matrix(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void validate_finite_dim_values(const ScenarioConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    const Eigen::MatrixXcd& h = cfg.hamiltonian;
    if (max_abs_matrix(h - h.adjoint()) >
        tol.hermiticity * (1.0 + max_abs_matrix(h))) {
        bad_field("system.hamiltonian", "not Hermitian within tolerance");
    }
    if (!(cfg.initial_state.norm() > 0.0)) {
        bad_field("initial_state", "zero vector");
    }
    const Eigen::MatrixXcd& p = cfg.projector;
    if (max_abs_matrix(p - p.adjoint()) >
        tol.hermiticity * (1.0 + max_abs_matrix(p))) {
        bad_field("event.projector", "not Hermitian within tolerance");
    }
    if (max_abs_matrix(p * p - p) > tol.projector_idempotency) {
        bad_field("event.projector", "not idempotent within tolerance");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_utc_iso() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json tolerances_json(const Tolerances& t) {
    Json j = Json::object();
    j["hermiticity"] = t.hermiticity;
    j["state_norm"] = t.state_norm;
    j["projector_idempotency"] = t.projector_idempotency;
    j["projector_spectrum"] = t.projector_spectrum;
    j["expectation_imag"] = t.expectation_imag;
    j["probability_floor"] = t.probability_floor;
    j["probability_negative"] = t.probability_negative;
    j["probability_sum"] = t.probability_sum;
    j["commuting_gate"] = t.commuting_gate;
    j["slice_consistency"] = t.slice_consistency;
    j["boundary_window_fraction"] = t.boundary_window_fraction;
    j["boundary_mass_threshold"] = t.boundary_mass_threshold;
    j["max_joint_dimension"] = t.max_joint_dimension;
    j["oracle_dimension_cap"] = t.oracle_dimension_cap;
    return j;
}

Json report_skeleton(const ScenarioConfig& cfg) {
    Json j = Json::object();
    j["schema"] = kSchema;
    j["generated_at"] = now_utc_iso();
    j["units"] = "hbar=1";
    j["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
    const char* kind = cfg.kind == ScenarioConfig::Kind::finite_dim ? "finite_dim"
                       : cfg.kind == ScenarioConfig::Kind::photon_arrival
                           ? "photon_arrival"
                           : "photon_frequency";
    j["config"] = Json{{"path", cfg.source_path},
                       {"hash", cfg.source_hash},
                       {"name", cfg.name},
                       {"kind", kind}};
    j["tolerances"] = tolerances_json(cfg.tolerances);
    return j;
}

struct FiniteDimObjects {
    std::shared_ptr<const ClockRegister> clock;
    HistoryState history;
    EventSpec event;
};

FiniteDimObjects build_finite_dim(const ScenarioConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    auto clock = std::make_shared<const ClockRegister>(
        build_clock(cfg.clock_d, cfg.clock_dt, tol));
    HilbertLabel sys = HilbertLabel::make("system", cfg.system_dimension);
    HermitianOperator hs(sys, cfg.hamiltonian, Units::energy, tol);
    StateVector psi0 = StateVector::normalized(sys, cfg.initial_state, tol);
    Projector pi(HermitianOperator(sys, cfg.projector, Units::dimensionless, tol),
                 tol);
    HistoryState h = build_history(clock, hs, psi0, tol);
    return FiniteDimObjects{std::move(clock), std::move(h),
                            EventSpec{std::move(pi), cfg.event_label}};
}

Json energy_moments_json(const EnergyMoments& m) {
    return Json{{"mean", m.mean}, {"std", m.std}};
}

ScenarioResult run_finite_dim(const ScenarioConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    FiniteDimObjects obj = build_finite_dim(cfg);
    const EventReport r = uncertainty_report(obj.history, obj.event, tol);
    const double cres = constraint_residual(obj.history);
    const double comres =
        commutator_residual(*obj.clock, diagnostic_probe(*obj.clock));
    const EnergyEqualityReport eq = energy_equality_check(obj.history);

    Json result = Json::object();
    result["clock"] = Json{{"d", obj.clock->d},
                           {"dt", obj.clock->dt},
                           {"total_time", obj.clock->total_time}};
    result["system_dimension"] = cfg.system_dimension;
    result["event_label"] = r.label;
    result["p_event"] = r.p_event;
    result["alpha_t"] = r.alpha_t;
    result["time"] = Json{{"mean", r.time.mean}, {"std", r.time.std}};
    result["energy"] = Json{{"mean", r.energy.mean},
                            {"std", r.energy.std},
                            {"path", r.commuting ? "commuting" : "clock"}};
    result["energy_clock_path"] = energy_moments_json(r.energy_clock_path);
    result["energy_commuting_path"] =
        r.energy_commuting_path ? energy_moments_json(*r.energy_commuting_path)
                                : Json(nullptr);
    result["system_energy"] = energy_moments_json(r.system_energy);
    result["commuting"] = r.commuting;
    result["products"] =
        Json{{"conditional", r.product_conditional},
             {"bound_conditional", r.bound_conditional},
             {"margin_conditional", r.product_conditional - r.bound_conditional},
             {"unconditional", r.product_unconditional},
             {"bound_unconditional", r.bound_unconditional},
             {"margin_unconditional",
              r.product_unconditional - r.bound_unconditional}};
    result["boundary"] = Json{{"flag", r.boundary_flag},
                              {"mass", r.boundary_mass},
                              {"window_fraction", tol.boundary_window_fraction},
                              {"mass_threshold", tol.boundary_mass_threshold}};
    result["diagnostics"] =
        Json{{"constraint_residual", cres},
             {"commutator_residual_probe", comres},
             {"energy_equality",
              Json{{"system_mean", eq.system_mean},
                   {"clock_mean", eq.clock_mean},
                   {"system_std", eq.system_std},
                   {"clock_std", eq.clock_std},
                   {"mean_discrepancy", eq.mean_discrepancy()},
                   {"std_discrepancy", eq.std_discrepancy()}}}};

    ScenarioResult out;
    out.report = report_skeleton(cfg);
    out.report["result"] = std::move(result);
    out.times = r.times;
    out.p = r.p_conditional;
    return out;
}

Json grid_json(const SpectralAmplitude& phi) {
    return Json{{"n", phi.size()},
                {"omega_min", phi.omega_min()},
                {"domega", phi.domega()},
                {"omega_center", phi.omega_center()},
                {"dual_dt", 2.0 * std::numbers::pi /
                                (static_cast<double>(phi.size()) * phi.domega())},
                {"dual_window", 2.0 * std::numbers::pi / phi.domega()}};
}

ScenarioResult run_photon_arrival(const ScenarioConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    const SpectralAmplitude phi = build_packet(cfg.packet, tol);
    const ArrivalEvent ev{cfg.screen_position, cfg.speed};
    const TimeBandwidthReport r = time_bandwidth_report(phi, ev, tol);
    const ArrivalDistribution arr = arrival_distribution(phi, ev, tol);

    Json result = Json::object();
    result["grid"] = grid_json(phi);
    result["event"] = Json{{"screen_position", ev.screen_position},
                           {"speed", ev.speed},
                           {"arrival_time", ev.arrival_time()}};
    result["time"] = Json{{"mean", r.t_mean}, {"std", r.t_std}};
    result["energy"] = Json{{"mean", r.e_mean}, {"std", r.e_std}};
    result["product"] = r.product;
    result["bound"] = r.bound;
    result["margin"] = r.product - r.bound;
    result["offgrid_warning"] = r.offgrid_warning;

    ScenarioResult out;
    out.report = report_skeleton(cfg);
    out.report["result"] = std::move(result);
    out.times = arr.times;
    out.p = arr.p;
    return out;
}

ScenarioResult run_photon_frequency(const ScenarioConfig& cfg) {
    const Tolerances& tol = cfg.tolerances;
    const SpectralAmplitude phi = build_packet(cfg.packet, tol);
    const FrequencyEventReport r =
        frequency_event_report(phi, cfg.omega0, cfg.total_time, tol);

    const double mean_u = r.p_uniform.mean();
    double max_dev = 0.0;
    for (Eigen::Index k = 0; k < r.p_uniform.size(); ++k) {
        max_dev = std::max(max_dev, std::abs(r.p_uniform[k] - mean_u));
    }

    Json result = Json::object();
    result["grid"] = grid_json(phi);
    result["omega0_requested"] = cfg.omega0;
    result["omega_bin"] = r.omega_bin;
    result["p_event"] = r.p_event;
    result["total_time"] = r.total_time;
    result["time_std"] = r.t_std;
    result["energy_std"] = r.e_std;
    result["product"] = r.product;
    result["uniformity_max_deviation"] = mean_u > 0.0 ? max_dev / mean_u : 0.0;

    ScenarioResult out;
    out.report = report_skeleton(cfg);
    out.report["result"] = std::move(result);

    // realized conditional distribution on the dual grid
    const double dual_dt = 2.0 * std::numbers::pi /
                           (static_cast<double>(phi.size()) * phi.domega());
    out.times.resize(r.p_uniform.size());
    for (Eigen::Index k = 0; k < r.p_uniform.size(); ++k) {
        out.times[k] =
            (static_cast<double>(k) - static_cast<double>(r.p_uniform.size()) / 2.0) *
            dual_dt;
    }
    out.p = r.p_uniform;
    return out;
}

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw io_error("read failure on config file '" + path.string() + "'");
    }
    const std::string bytes = ss.str();
    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("config '" + path.string() +
                               "': " + std::string(e.what()));
    }
    return parse_scenario(j, path.string(), fnv1a64_hex(bytes));
}

ScenarioConfig parse_scenario(const Json& j, const std::string& source_path,
                              const std::string& source_hash) {
    require_object(j, "(root)");
    ScenarioConfig cfg;
    cfg.source_path = source_path;
    cfg.source_hash = source_hash;

    const std::string kind = get_string(j, "", "kind");
    cfg.name = get_string(j, "", "name");
    if (cfg.name.empty()) bad_field("name", "must not be empty");

    if (auto it = j.find("tolerances"); it != j.end()) {
        parse_tolerances(*it, cfg.tolerances);
    }

    if (kind == "finite_dim") {
        cfg.kind = ScenarioConfig::Kind::finite_dim;
        check_keys(j, "",
                   {"name", "kind", "clock", "system", "initial_state", "event",
                    "tolerances", "sweep"});
        const Json& clock = get_required(j, "", "clock");
        require_object(clock, "clock");
        check_keys(clock, "clock", {"d", "dt"});
        cfg.clock_d = get_integer(clock, "clock", "d");
        if (!is_power_of_two_index(cfg.clock_d) || cfg.clock_d < 4) {
            bad_field("clock.d", "expected a power of two >= 4");
        }
        cfg.clock_dt = get_number(clock, "clock", "dt");
        if (!(cfg.clock_dt > 0.0)) bad_field("clock.dt", "expected a positive number");

        const Json& system = get_required(j, "", "system");
        require_object(system, "system");
        check_keys(system, "system", {"dimension", "hamiltonian"});
        cfg.system_dimension = get_integer(system, "system", "dimension");
        if (cfg.system_dimension < 1) bad_field("system.dimension", "must be >= 1");
        cfg.hamiltonian =
            parse_cmatrix(get_required(system, "system", "hamiltonian"),
                          "system.hamiltonian", cfg.system_dimension);

        cfg.initial_state = parse_cvector(get_required(j, "", "initial_state"),
                                          "initial_state");
        if (cfg.initial_state.size() != cfg.system_dimension) {
            bad_field("initial_state", "expected " +
                                           std::to_string(cfg.system_dimension) +
                                           " amplitudes");
        }

        const Json& event = get_required(j, "", "event");
        require_object(event, "event");
        check_keys(event, "event", {"projector", "label"});
        cfg.projector = parse_cmatrix(get_required(event, "event", "projector"),
                                      "event.projector", cfg.system_dimension);
        cfg.event_label = get_string(event, "event", "label");

        validate_finite_dim_values(cfg);
    } else if (kind == "photon_arrival") {
        cfg.kind = ScenarioConfig::Kind::photon_arrival;
        check_keys(j, "",
                   {"name", "kind", "packet", "screen_position", "speed",
                    "tolerances", "sweep"});
        cfg.packet = parse_packet(get_required(j, "", "packet"), "packet");
        cfg.screen_position = get_number_or(j, "", "screen_position", 0.0);
        cfg.speed = get_number_or(j, "", "speed", 1.0);
        if (!(cfg.speed > 0.0)) bad_field("speed", "expected a positive number");
    } else if (kind == "photon_frequency") {
        cfg.kind = ScenarioConfig::Kind::photon_frequency;
        check_keys(j, "",
                   {"name", "kind", "packet", "omega0", "total_time", "tolerances",
                    "sweep"});
        cfg.packet = parse_packet(get_required(j, "", "packet"), "packet");
        cfg.omega0 = get_number(j, "", "omega0");
        cfg.total_time = get_number(j, "", "total_time");
        if (!(cfg.total_time > 0.0)) {
            bad_field("total_time", "expected a positive number");
        }
    } else {
        bad_field("kind", "unknown kind '" + kind +
                              "' (expected finite_dim, photon_arrival or "
                              "photon_frequency)");
    }

    if (auto it = j.find("sweep"); it != j.end()) {
        require_object(*it, "sweep");
        check_keys(*it, "sweep", {"parameter", "values"});
        SweepSpec sweep;
        sweep.parameter = get_string(*it, "sweep", "parameter");
        const Json& values = get_required(*it, "sweep", "values");
        if (!values.is_array() || values.size() < 2) {
            bad_field("sweep.values", "expected an array of at least 2 numbers");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!values[i].is_number()) {
                bad_field("sweep.values[" + std::to_string(i) + "]",
                          "expected a number");
            }
            sweep.values.push_back(values[i].get<double>());
        }
        const bool ok =
            (cfg.kind == ScenarioConfig::Kind::finite_dim &&
             (sweep.parameter == "d" || sweep.parameter == "dt")) ||
            (cfg.kind == ScenarioConfig::Kind::photon_arrival &&
             sweep.parameter == "n") ||
            (cfg.kind == ScenarioConfig::Kind::photon_frequency &&
             sweep.parameter == "total_time");
        if (!ok) {
            bad_field("sweep.parameter",
                      "'" + sweep.parameter + "' is not sweepable for kind '" +
                          kind + "'");
        }
        if ((sweep.parameter == "d" || sweep.parameter == "n")) {
            if (cfg.packet.type == PacketSpec::Type::samples &&
                sweep.parameter == "n") {
                bad_field("sweep.parameter",
                          "'n' requires a parametric packet, not samples");
            }
            for (double v : sweep.values) {
                const auto iv = static_cast<Eigen::Index>(std::llround(v));
                if (static_cast<double>(iv) != v || !is_power_of_two_index(iv) ||
                    iv < 4) {
                    bad_field("sweep.values",
                              "'" + sweep.parameter +
                                  "' values must be powers of two >= 4");
                }
            }
        } else {
            for (double v : sweep.values) {
                if (!(v > 0.0)) {
                    bad_field("sweep.values", "values must be positive");
                }
            }
        }
        cfg.sweep = std::move(sweep);
    }
    return cfg;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
        case ScenarioConfig::Kind::finite_dim:
            return run_finite_dim(cfg);
        case ScenarioConfig::Kind::photon_arrival:
            return run_photon_arrival(cfg);
        case ScenarioConfig::Kind::photon_frequency:
            return run_photon_frequency(cfg);
    }
    throw contract_error("run_scenario: unreachable");
}

ScenarioResult run_scenario_oracle(const ScenarioConfig& cfg) {
    if (cfg.kind != ScenarioConfig::Kind::finite_dim) {
        throw validation_error(
            "config field 'kind': the oracle route requires finite_dim");
    }
    const Tolerances& tol = cfg.tolerances;
    FiniteDimObjects obj = build_finite_dim(cfg);
    const EventReport r = oracle::event_report(obj.history, obj.event, tol);

    // dense diagnostics: (Hc⊗I + I⊗(Hs−⟨Hs⟩))|Ψ⟩⟩ formed as explicit matrices
    const double e0 =
        expectation(obj.history.initial_state, obj.history.system_hamiltonian, tol);
    Eigen::MatrixXcd hs_shifted = obj.history.system_hamiltonian.matrix();
    hs_shifted.diagonal().array() -= Complex(e0, 0.0);
    const HermitianOperator constraint_op =
        tensor_product(obj.clock->energy_op,
                       HermitianOperator::identity(obj.history.system), tol);
    const HermitianOperator drift_op = tensor_product(
        HermitianOperator::identity(obj.clock->space),
        HermitianOperator(obj.history.system, hs_shifted, Units::energy, tol), tol);
    const Eigen::VectorXcd cpsi =
        (constraint_op.matrix() + drift_op.matrix()) * obj.history.psi.amplitudes();
    const double cres = cpsi.norm();

    const double comres = oracle::commutator_residual_dense(
        *obj.clock, diagnostic_probe(*obj.clock));

    const HermitianOperator sys_op = tensor_product(
        HermitianOperator::identity(obj.clock->space),
        obj.history.system_hamiltonian, tol);
    const oracle::DenseMoments sys_m = oracle::dense_moments(obj.history, sys_op, tol);
    const oracle::DenseMoments clk_m =
        oracle::dense_moments(obj.history, constraint_op, tol);
    const auto std_of = [](const oracle::DenseMoments& m) {
        return std::sqrt(std::max(0.0, m.second - m.first * m.first));
    };
    const EnergyEqualityReport eq{sys_m.first, clk_m.first, std_of(sys_m),
                                  std_of(clk_m)};

    Json result = Json::object();
    result["clock"] = Json{{"d", obj.clock->d},
                           {"dt", obj.clock->dt},
                           {"total_time", obj.clock->total_time}};
    result["system_dimension"] = cfg.system_dimension;
    result["event_label"] = r.label;
    result["p_event"] = r.p_event;
    result["alpha_t"] = r.alpha_t;
    result["time"] = Json{{"mean", r.time.mean}, {"std", r.time.std}};
    result["energy"] = Json{{"mean", r.energy.mean},
                            {"std", r.energy.std},
                            {"path", r.commuting ? "commuting" : "clock"}};
    result["energy_clock_path"] = energy_moments_json(r.energy_clock_path);
    result["energy_commuting_path"] =
        r.energy_commuting_path ? energy_moments_json(*r.energy_commuting_path)
                                : Json(nullptr);
    result["system_energy"] = energy_moments_json(r.system_energy);
    result["commuting"] = r.commuting;
    result["products"] =
        Json{{"conditional", r.product_conditional},
             {"bound_conditional", r.bound_conditional},
             {"margin_conditional", r.product_conditional - r.bound_conditional},
             {"unconditional", r.product_unconditional},
             {"bound_unconditional", r.bound_unconditional},
             {"margin_unconditional",
              r.product_unconditional - r.bound_unconditional}};
    result["boundary"] = Json{{"flag", r.boundary_flag},
                              {"mass", r.boundary_mass},
                              {"window_fraction", tol.boundary_window_fraction},
                              {"mass_threshold", tol.boundary_mass_threshold}};
    result["diagnostics"] =
        Json{{"constraint_residual", cres},
             {"commutator_residual_probe", comres},
             {"energy_equality",
              Json{{"system_mean", eq.system_mean},
                   {"clock_mean", eq.clock_mean},
                   {"system_std", eq.system_std},
                   {"clock_std", eq.clock_std},
                   {"mean_discrepancy", eq.mean_discrepancy()},
                   {"std_discrepancy", eq.std_discrepancy()}}}};

    ScenarioResult out;
    out.report = report_skeleton(cfg);
    out.report["result"] = std::move(result);
    out.times = r.times;
    out.p = r.p_conditional;
    return out;
}

namespace {

void compare_json(const Json& a, const Json& b, const std::string& where,
                  double tolerance, ReportComparison& out) {
    if (a.is_object() && b.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) {
                out.mismatches.push_back(where + "." + it.key() +
                                         ": missing on one side");
                continue;
            }
            compare_json(*it, b.at(it.key()), where + "." + it.key(), tolerance, out);
        }
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (!a.contains(it.key())) {
                out.mismatches.push_back(where + "." + it.key() +
                                         ": missing on one side");
            }
        }
        return;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) {
            out.mismatches.push_back(where + ": array sizes differ");
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            compare_json(a[i], b[i], where + "[" + std::to_string(i) + "]",
                         tolerance, out);
        }
        return;
    }
    if (a.is_number() && b.is_number()) {
        const double x = a.get<double>();
        const double y = b.get<double>();
        const double dev = std::abs(x - y) / (1.0 + std::abs(x) + std::abs(y));
        out.max_deviation = std::max(out.max_deviation, dev);
        if (dev > tolerance) {
            out.mismatches.push_back(where + ": " + format_double(x) + " vs " +
                                     format_double(y) + " (deviation " +
                                     format_double(dev) + ")");
        }
        return;
    }
    if (a != b) {
        out.mismatches.push_back(where + ": values differ");
    }
}

} // namespace

ReportComparison compare_reports(const Json& a, const Json& b, double tolerance) {
    ReportComparison out;
    const auto* ra = a.contains("result") ? &a.at("result") : &a;
    const auto* rb = b.contains("result") ? &b.at("result") : &b;
    compare_json(*ra, *rb, "result", tolerance, out);
    return out;
}

SweepResult run_sweep(const ScenarioConfig& cfg) {
    if (!cfg.sweep) {
        throw validation_error("config field 'sweep': missing (sweep requested)");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SweepResult out;

    for (double value : cfg.sweep->values) {
        ScenarioConfig point = cfg;
        point.sweep.reset();
        if (cfg.sweep->parameter == "d") {
            const double total = static_cast<double>(cfg.clock_d) * cfg.clock_dt;
            point.clock_d = static_cast<Eigen::Index>(std::llround(value));
            point.clock_dt = total / value; // fixed window, finer grid
        } else if (cfg.sweep->parameter == "dt") {
            point.clock_dt = value;
        } else if (cfg.sweep->parameter == "n") {
            point.packet.n = static_cast<Eigen::Index>(std::llround(value));
        } else { // total_time
            point.total_time = value;
        }

        const ScenarioResult res = run_scenario(point);
        const Json& r = res.report.at("result");
        SweepRow row;
        row.parameter = value;
        if (point.kind == ScenarioConfig::Kind::finite_dim) {
            row.t_std = r.at("time").at("std").get<double>();
            row.e_std = r.at("energy").at("std").get<double>();
            row.product = r.at("products").at("conditional").get<double>();
            row.margin = r.at("products").at("margin_conditional").get<double>();
            row.constraint_residual =
                r.at("diagnostics").at("constraint_residual").get<double>();
            row.commutator_residual =
                r.at("diagnostics").at("commutator_residual_probe").get<double>();
        } else if (point.kind == ScenarioConfig::Kind::photon_arrival) {
            row.t_std = r.at("time").at("std").get<double>();
            row.e_std = r.at("energy").at("std").get<double>();
            row.product = r.at("product").get<double>();
            row.margin = r.at("margin").get<double>();
            row.constraint_residual = nan;
            row.commutator_residual = nan;
        } else {
            row.t_std = r.at("time_std").get<double>();
            row.e_std = r.at("energy_std").get<double>();
            row.product = r.at("product").get<double>();
            row.margin = row.product - 0.5;
            row.constraint_residual = nan;
            row.commutator_residual = nan;
        }
        out.rows.push_back(row);
    }

    out.margin_monotone = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (out.rows[i].margin < out.rows[i - 1].margin - 1e-12) {
            out.margin_monotone = false;
            break;
        }
    }
    return out;
}

std::string render_report(const Json& report) {
    validate_report_json(report);
    return report.dump(2) + "\n";
}

std::string distribution_csv(const Eigen::VectorXd& times, const Eigen::VectorXd& p) {
    if (times.size() != p.size()) {
        throw contract_error("distribution_csv: grid and distribution sizes differ");
    }
    std::string out = "t,p\n";
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        out += format_double(times[k]);
        out += ',';
        out += format_double(p[k]);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out =
        "parameter,t_std,E_std,product,margin,constraint_residual,"
        "commutator_residual\n";
    for (const SweepRow& r : sweep.rows) {
        out += format_double(r.parameter);
        out += ',';
        out += format_double(r.t_std);
        out += ',';
        out += format_double(r.e_std);
        out += ',';
        out += format_double(r.product);
        out += ',';
        out += format_double(r.margin);
        out += ',';
        out += format_double(r.constraint_residual);
        out += ',';
        out += format_double(r.commutator_residual);
        out += '\n';
    }
    return out;
}

namespace {

[[noreturn]] void bad_report(const std::string& where, const std::string& why) {
    throw validation_error("report field '" + where + "': " + why);
}

const Json& report_get(const Json& j, const std::string& where, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad_report(where + "." + key, "missing");
    return *it;
}

void expect_finite_number(const Json& j, const std::string& where,
                          bool allow_nan = false) {
    if (!j.is_number()) bad_report(where, "expected a number");
    const double v = j.get<double>();
    if (!allow_nan && !std::isfinite(v)) bad_report(where, "not finite");
}

void expect_string(const Json& j, const std::string& where) {
    if (!j.is_string()) bad_report(where, "expected a string");
}

void expect_mean_std(const Json& j, const std::string& where) {
    if (!j.is_object()) bad_report(where, "expected an object");
    expect_finite_number(report_get(j, where, "mean"), where + ".mean");
    expect_finite_number(report_get(j, where, "std"), where + ".std");
}

} // namespace

void validate_report_json(const Json& report) {
    if (!report.is_object()) bad_report("(root)", "expected an object");
    const Json& schema = report_get(report, "(root)", "schema");
    expect_string(schema, "schema");
    if (schema.get<std::string>() != kSchema) {
        bad_report("schema", "expected '" + std::string(kSchema) + "'");
    }
    expect_string(report_get(report, "(root)", "generated_at"), "generated_at");
    const Json& units = report_get(report, "(root)", "units");
    expect_string(units, "units");
    if (units.get<std::string>() != "hbar=1") bad_report("units", "expected 'hbar=1'");

    const Json& tool = report_get(report, "(root)", "tool");
    expect_string(report_get(tool, "tool", "name"), "tool.name");
    expect_string(report_get(tool, "tool", "version"), "tool.version");

    const Json& config = report_get(report, "(root)", "config");
    expect_string(report_get(config, "config", "path"), "config.path");
    expect_string(report_get(config, "config", "hash"), "config.hash");
    expect_string(report_get(config, "config", "name"), "config.name");
    const Json& kind = report_get(config, "config", "kind");
    expect_string(kind, "config.kind");

    const Json& tolerances = report_get(report, "(root)", "tolerances");
    if (!tolerances.is_object()) bad_report("tolerances", "expected an object");
    for (auto it = tolerances.begin(); it != tolerances.end(); ++it) {
        if (!it->is_number()) bad_report("tolerances." + it.key(), "expected a number");
    }

    const Json& result = report_get(report, "(root)", "result");
    if (!result.is_object()) bad_report("result", "expected an object");

    const std::string k = kind.get<std::string>();
    if (k == "finite_dim") {
        expect_finite_number(report_get(result, "result", "p_event"),
                             "result.p_event");
        expect_finite_number(report_get(result, "result", "alpha_t"),
                             "result.alpha_t");
        expect_mean_std(report_get(result, "result", "time"), "result.time");
        const Json& energy = report_get(result, "result", "energy");
        expect_mean_std(energy, "result.energy");
        expect_string(report_get(energy, "result.energy", "path"),
                      "result.energy.path");
        expect_mean_std(report_get(result, "result", "energy_clock_path"),
                        "result.energy_clock_path");
        expect_mean_std(report_get(result, "result", "system_energy"),
                        "result.system_energy");
        const Json& products = report_get(result, "result", "products");
        for (const char* key :
             {"conditional", "bound_conditional", "margin_conditional",
              "unconditional", "bound_unconditional", "margin_unconditional"}) {
            expect_finite_number(report_get(products, "result.products", key),
                                 std::string("result.products.") + key);
        }
        const Json& boundary = report_get(result, "result", "boundary");
        if (!report_get(boundary, "result.boundary", "flag").is_boolean()) {
            bad_report("result.boundary.flag", "expected a boolean");
        }
        expect_finite_number(report_get(boundary, "result.boundary", "mass"),
                             "result.boundary.mass");
        const Json& diag = report_get(result, "result", "diagnostics");
        expect_finite_number(
            report_get(diag, "result.diagnostics", "constraint_residual"),
            "result.diagnostics.constraint_residual");
        expect_finite_number(
            report_get(diag, "result.diagnostics", "commutator_residual_probe"),
            "result.diagnostics.commutator_residual_probe");
    } else if (k == "photon_arrival") {
        expect_mean_std(report_get(result, "result", "time"), "result.time");
        expect_mean_std(report_get(result, "result", "energy"), "result.energy");
        expect_finite_number(report_get(result, "result", "product"),
                             "result.product");
        expect_finite_number(report_get(result, "result", "bound"), "result.bound");
    } else if (k == "photon_frequency") {
        expect_finite_number(report_get(result, "result", "p_event"),
                             "result.p_event");
        expect_finite_number(report_get(result, "result", "time_std"),
                             "result.time_std");
        expect_finite_number(report_get(result, "result", "energy_std"),
                             "result.energy_std");
        expect_finite_number(report_get(result, "result", "product"),
                             "result.product");
    } else {
        bad_report("config.kind", "unknown kind '" + k + "'");
    }
}

RandomScenario make_random_scenario(std::mt19937_64& rng,
                                    const RandomScenarioOptions& opt) {
    if (opt.system_dims.empty()) {
        throw contract_error("make_random_scenario: no system dimensions given");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, opt.system_dims.size() - 1);
    const Eigen::Index dim = opt.system_dims[pick(rng)];

    const auto random_hermitian = [&](Eigen::Index n) {
        Eigen::MatrixXcd r(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                r(i, j) = Complex(normal(rng), normal(rng));
            }
        }
        return Eigen::MatrixXcd((r + r.adjoint()) / 2.0);
    };

    HilbertLabel sys = HilbertLabel::make("system", dim);
    Eigen::MatrixXcd hm = random_hermitian(dim);
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm, Eigen::EigenvaluesOnly);
        const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
        hm *= opt.hamiltonian_norm / std::max(norm, 1e-12);
    }
    HermitianOperator hs(sys, std::move(hm), Units::energy);

    Eigen::VectorXcd psi_raw(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        psi_raw[i] = Complex(normal(rng), normal(rng));
    }
    StateVector psi0 = StateVector::normalized(sys, std::move(psi_raw));

    std::uniform_int_distribution<Eigen::Index> rank_pick(1, dim - 1);
    const Eigen::Index rank = dim == 1 ? 1 : rank_pick(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> basis(random_hermitian(dim));
    const Eigen::MatrixXcd v = basis.eigenvectors().leftCols(rank);
    Projector pi(HermitianOperator(sys, v * v.adjoint(), Units::dimensionless));

    const double dt = opt.norm_times_dt / opt.hamiltonian_norm;
    return RandomScenario{opt.clock_d, dt, std::move(hs), std::move(psi0),
                          std::move(pi)};
}

VerifySummary run_verification(std::uint64_t seed, int trials) {
    if (trials < 1) {
        throw contract_error("run_verification: trials must be >= 1");
    }
    std::mt19937_64 rng(seed);
    const Tolerances& tol = Tolerances::defaults();
    VerifySummary summary;
    summary.trials = trials;

    for (int trial = 0; trial < trials; ++trial) {
        const bool oracle_trial = trial % 8 == 0;
        RandomScenarioOptions opt;
        opt.clock_d = oracle_trial ? 32 : 256;
        // oracle trials shrink d for the dense route; keep the physical window
        // d·dt fixed so the event stays resolved and the margin laws apply
        if (oracle_trial) {
            opt.system_dims = {2, 3, 4};
            opt.norm_times_dt *= 256.0 / 32.0;
        }
        const RandomScenario sc = make_random_scenario(rng, opt);

        auto fail = [&](const std::string& what) {
            ++summary.failures;
            summary.messages.push_back("trial " + std::to_string(trial) + ": " + what);
        };

        try {
            auto clock = std::make_shared<const ClockRegister>(
                build_clock(sc.d, sc.dt, tol));
            const HistoryState h =
                build_history(clock, sc.hamiltonian, sc.initial_state, tol);
            const EventSpec ev{sc.projector, "random"};
            const EventReport r = uncertainty_report(h, ev, tol);

            // conditional distribution is normalized
            if (std::abs(r.p_conditional.sum() - 1.0) > tol.probability_sum) {
                fail("conditional mass deviates from 1 by " +
                     std::to_string(std::abs(r.p_conditional.sum() - 1.0)));
            }

            // p_event equals the projector expectation on |Ψ⟩⟩
            const auto g = h.slices();
            const Eigen::MatrixXcd pg = ev.projector.matrix() * g;
            const double p_direct =
                std::real((g.array().conjugate() * pg.array()).sum());
            if (std::abs(p_direct - r.p_event) > 1e-12) {
                fail("p_event mismatch vs ⟨I⊗Π⟩: " +
                     std::to_string(std::abs(p_direct - r.p_event)));
            }

            // conditional time variance equals αT·(recentered Tπ moment), and the
            // uncentered mismatch is exactly ⟨Tπ⟩²(1−p)/p²
            const Eigen::VectorXd joint = joint_time_distribution(h, ev, tol);
            const double m1 = joint.dot(h.clock->times);
            const double m2 = joint.dot(
                h.clock->times.cwiseProduct(h.clock->times).eval());
            const double p = r.p_event;
            const double tvar = r.time.std * r.time.std;
            double recentered = 0.0;
            for (Eigen::Index k = 0; k < joint.size(); ++k) {
                const double dtk = h.clock->times[k] - r.time.mean;
                recentered += dtk * dtk * joint[k];
            }
            const double scale_t = 1.0 + tvar;
            if (std::abs(tvar - recentered / p) > 1e-10 * scale_t) {
                fail("recentered time-variance identity violated");
            }
            const double uncentered_gap = (m2 - m1 * m1) / p - tvar;
            const double predicted = m1 * m1 * (1.0 - p) / (p * p);
            if (std::abs(uncentered_gap - predicted) > 1e-10 * (1.0 + predicted)) {
                fail("uncentered discrepancy formula violated: gap " +
                     std::to_string(uncentered_gap) + " vs " +
                     std::to_string(predicted));
            }

            // global time-origin shift moves the mean, not the spread
            const double shift = 3.7;
            const Eigen::VectorXd shifted = h.clock->times.array() + shift;
            const TimeStatistics ts = time_statistics(r.p_conditional, shifted);
            if (std::abs(ts.mean - (r.time.mean + shift)) > 1e-10 ||
                std::abs(ts.std - r.time.std) > 1e-10) {
                fail("time-origin shift invariance violated");
            }

            // Robertson chain along the clock path
            const Eigen::MatrixXcd& tc = h.clock->time_op.matrix();
            const Eigen::MatrixXcd& hc = h.clock->energy_op.matrix();
            const Eigen::MatrixXcd comm = tc * hc - hc * tc;
            const Eigen::MatrixXcd cg =
                ev.projector.matrix() * g * comm.transpose();
            const Complex cexp = (g.array().conjugate() * cg.array()).sum();
            const double bound = 0.5 * r.alpha_t * std::abs(cexp);
            if (r.time.std * r.energy_clock_path.std < bound - 1e-8) {
                fail("Robertson bound violated along the clock path");
            }

            // headline inequalities at the corpus margins: these laws assume
            // the event resolves inside the window, which is exactly what the
            // boundary flag rules out, so flagged draws are exempt
            if (!r.boundary_flag) {
                if (r.product_conditional < 0.49) {
                    fail("conditional product " +
                         std::to_string(r.product_conditional) + " below 0.49");
                }
                if (r.product_unconditional < 0.5 * std::sqrt(p) - 0.02) {
                    fail("unconditional product below (1/2)√p − 0.02");
                }
            }

            if (oracle_trial) {
                const EventReport o = oracle::event_report(h, ev, tol);
                const auto close = [](double a, double b) {
                    return std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a) + std::abs(b));
                };
                if (!close(o.p_event, r.p_event) ||
                    !close(o.time.mean, r.time.mean) ||
                    !close(o.time.std, r.time.std) ||
                    !close(o.energy_clock_path.mean, r.energy_clock_path.mean) ||
                    !close(o.energy_clock_path.std, r.energy_clock_path.std) ||
                    (o.p_conditional - r.p_conditional).cwiseAbs().maxCoeff() >
                        1e-10) {
                    fail("dense-oracle comparison failed");
                }
            }
        } catch (const event_never_happens&) {
            // a random projector may miss the trajectory; not a failure
        } catch (const error& e) {
            fail(std::string("exception: ") + e.what());
        }
    }
    return summary;
}

} // namespace qet
