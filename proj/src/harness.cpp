#include "skl/harness.hpp"

#include "skl/chebyshev.hpp"
#include "skl/hyperbolic_kernel.hpp"
#include "skl/parallel.hpp"
#include "skl/quasimode.hpp"
#include "skl/tree_kernel.hpp"
#include "skl/wave.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace skl {

namespace {

constexpr double kPi = std::numbers::pi;

class Csv {
public:
    explicit Csv(const std::string& header) { out_ << header << '\n'; out_.precision(17); }

    template <class... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << fields, first = false), ...);
        out_ << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string param_text(const SpectralParameter& r) {
    std::array<char, 64> buf{};
    const auto end = std::to_chars(buf.data(), buf.data() + buf.size(), r.value).ptr;
    return (r.imaginary ? "i" : "") + std::string(buf.data(), end);
}

nlohmann::json error_entry(const Error& e) { return {{"error", e.kind()}, {"message", e.what()}}; }

CommandResult finish(const ExperimentConfig& config, nlohmann::json results, bool pass, std::string csv) {
    CommandResult r;
    r.pass = pass;
    r.report = {{"command", config.command}, {"config", to_json(config)}, {"results", std::move(results)}, {"pass", pass}};
    r.csv = std::move(csv);
    return r;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

AlgebraicNumber random_algebraic(std::mt19937_64& rng, long p) {
    std::uniform_int_distribution<long> num(-20, 20);
    std::uniform_int_distribution<long> den(1, 12);
    mpq_class u(mpz_class(num(rng)), mpz_class(den(rng)));
    mpq_class v(mpz_class(num(rng)), mpz_class(den(rng)));
    u.canonicalize();
    v.canonicalize();
    return AlgebraicNumber(u, v, p);
}

RadialFunction random_radial(std::mt19937_64& rng, long p, int radius, int support) {
    RadialFunction f(p, radius);
    for (int d = 0; d <= support && d <= radius; ++d) f[d] = random_algebraic(rng, p);
    return f;
}

double max_abs(const RadialFunction& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v.to_double()));
    return m;
}

template <class T>
void require_nonempty(const std::vector<T>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string(name) + " list is empty");
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"propagate", "design-tree", "recurrence-tree", "selberg",
                                                "design-hyperbolic", "recurrence-hyperbolic", "quasimode"};
    return names;
}

SpectralParameter parse_spectral_parameter(const std::string& text) {
    std::string body = text;
    bool imaginary = false;
    if (!body.empty() && (body.front() == 'i' || body.front() == 'I')) {
        imaginary = true;
        body.erase(0, 1);
    } else if (!body.empty() && (body.back() == 'i' || body.back() == 'I')) {
        imaginary = true;
        body.pop_back();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(body, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse spectral parameter '" + text + "'");
    }
    if (used != body.size() || !std::isfinite(v)) throw ConfigError("cannot parse spectral parameter '" + text + "'");
    return imaginary ? SpectralParameter::imag(v) : SpectralParameter::real(v);
}

ExperimentConfig with_defaults(ExperimentConfig c) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), c.command) == names.end()) {
        throw ConfigError("unknown command '" + c.command + "'");
    }
    auto fill = [](auto& v, auto defaults) {
        if (v.empty()) v = defaults;
    };
    const auto& cmd = c.command;
    if (cmd == "propagate") {
        fill(c.p, std::vector<long>{2, 3, 5, 7});
        fill(c.N, std::vector<int>{20});
        if (c.trials == 0) c.trials = 100;
        if (c.steps == 0) c.steps = 50;
    } else if (cmd == "design-tree") {
        fill(c.p, std::vector<long>{5});
        fill(c.eta, std::vector<double>{0.25});
        fill(c.N, std::vector<int>{200, 400, 800});
        fill(c.theta0, std::vector<double>{kPi / 3});
        if (c.grid == 0) c.grid = 2048;
    } else if (cmd == "recurrence-tree") {
        fill(c.p, std::vector<long>{3, 5});
        fill(c.L, std::vector<int>{5, 10, 20});
        if (c.grid == 0) c.grid = 200;
    } else if (cmd == "selberg") {
        if (c.t_sweep.empty()) {
            for (int i = 0; i <= 10; ++i) c.t_sweep.push_back(1.0 + 0.5 * i);
        }
        if (c.tol == 0.0) c.tol = 1e-6;
        if (c.grid == 0) c.grid = 64;
    } else if (cmd == "design-hyperbolic") {
        fill(c.eta, std::vector<double>{0.25, 0.4});
        fill(c.N, std::vector<int>{400, 800});
        fill(c.r_target, std::vector<SpectralParameter>{SpectralParameter::real(0.7), SpectralParameter::real(1.3),
                                                        SpectralParameter::real(3.0)});
        if (c.t_sweep.empty()) {
            for (int i = 0; i <= 10; ++i) c.t_sweep.push_back(1.0 + 0.5 * i);
        }
        if (c.tol == 0.0) c.tol = 1e-12;
        if (c.grid == 0) c.grid = 1024;
    } else if (cmd == "recurrence-hyperbolic") {
        fill(c.r_target, std::vector<SpectralParameter>{SpectralParameter::real(0.0), SpectralParameter::real(5.0),
                                                        SpectralParameter::imag(0.3)});
        fill(c.L, std::vector<int>{8});
        fill(c.q, std::vector<long>{1, 2});
        if (c.tol == 0.0) c.tol = 1e-8;
    } else if (cmd == "quasimode") {
        if (c.trials == 0) c.trials = 1000;
    }

    for (long p : c.p) {
        if (p < 2) throw ConfigError("p must be at least 2");
    }
    for (int n : c.N) {
        if (n < 1) throw ConfigError("N must be positive");
    }
    for (int l : c.L) {
        if (l < 1) throw ConfigError("L must be positive");
    }
    for (long q : c.q) {
        if (q < 1) throw ConfigError("q must be positive");
    }
    for (double eta : c.eta) {
        if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("eta must lie in (0, 1/2)");
    }
    for (double theta : c.theta0) {
        if (!(theta >= 0.0 && theta <= kPi)) throw ConfigError("theta0 must lie in [0, pi]");
    }
    for (double T : c.t_sweep) {
        if (!(T > 0.0)) throw ConfigError("T sweep entries must be positive");
    }
    for (double w : c.omega) {
        if (!std::isfinite(w)) throw ConfigError("omega entries must be finite");
    }
    if (c.tol < 0.0) throw ConfigError("tolerance must be positive");
    if (c.grid < 0 || c.trials < 0 || c.steps < 0) throw ConfigError("counts must be positive");
    if (cmd == "propagate") {
        require_nonempty(c.p, "p");
        require_nonempty(c.N, "N");
    } else if (cmd == "design-tree") {
        require_nonempty(c.eta, "eta");
        require_nonempty(c.theta0, "theta0");
    } else if (cmd == "selberg" || cmd == "design-hyperbolic") {
        require_nonempty(c.t_sweep, "T sweep");
    }
    if (cmd == "quasimode" && !c.omega.empty() && c.r_target.empty()) {
        throw ConfigError("explicit quasimode windows need --r-target alongside --omega");
    }
    return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& x : c.r_target) r.push_back(param_text(x));
    return {{"command", c.command}, {"p", c.p},           {"eta", c.eta},     {"N", c.N},
            {"theta0", c.theta0},   {"r_target", r},      {"t_sweep", c.t_sweep}, {"L", c.L},
            {"q", c.q},             {"omega", c.omega},   {"tol", c.tol},     {"grid", c.grid},
            {"trials", c.trials},   {"steps", c.steps},   {"seed", c.seed},   {"perturb", c.perturb}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        auto take = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        take("command", c.command);
        take("p", c.p);
        take("eta", c.eta);
        take("N", c.N);
        take("theta0", c.theta0);
        take("t_sweep", c.t_sweep);
        take("L", c.L);
        take("q", c.q);
        take("omega", c.omega);
        take("tol", c.tol);
        take("grid", c.grid);
        take("trials", c.trials);
        take("steps", c.steps);
        take("seed", c.seed);
        take("perturb", c.perturb);
        if (j.contains("r_target")) {
            for (const auto& r : j.at("r_target")) {
                c.r_target.push_back(r.is_string() ? parse_spectral_parameter(r.get<std::string>())
                                                   : SpectralParameter::real(r.get<double>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    return c;
}

CommandResult run_command(const ExperimentConfig& config) {
    const auto& cmd = config.command;
    if (cmd == "propagate") return cmd_propagate(config);
    if (cmd == "design-tree") return cmd_design_tree(config);
    if (cmd == "recurrence-tree") return cmd_recurrence_tree(config);
    if (cmd == "selberg") return cmd_selberg(config);
    if (cmd == "design-hyperbolic") return cmd_design_hyperbolic(config);
    if (cmd == "recurrence-hyperbolic") return cmd_recurrence_hyperbolic(config);
    if (cmd == "quasimode") return cmd_quasimode(config);
    throw ConfigError("unknown command '" + cmd + "'");
}

CommandResult cmd_propagate(const ExperimentConfig& c) {
    const int n_max = *std::max_element(c.N.begin(), c.N.end());
    Csv csv("p,n,d,value");
    nlohmann::json per_prime = nlohmann::json::array();
    bool pass = true;
    bool perturbed = false;
    for (long p : c.p) {
        nlohmann::json cases = nlohmann::json::array();
        try {
            const auto seq = chebyshev_first_sequence(n_max, delta_at_root(p, n_max));
            for (int n = 0; n <= n_max; n += 2) {
                auto closed = propagate_closed_form(p, n, n_max);
                if (c.perturb && !perturbed) {
                    closed[0] += AlgebraicNumber(1);
                    perturbed = true;
                }
                const auto diff = closed - seq[static_cast<std::size_t>(n)];
                const bool equal = diff.is_zero();
                pass = pass && equal;
                cases.push_back({{"n", n}, {"equal", equal}, {"max_abs_deviation", max_abs(diff)}});
                for (int d = 0; d <= n; ++d) csv.row(p, n, d, closed[d].to_double());
            }
            // Operator form of the closed solution on a random initial state.
            auto rng = stream(c.seed, static_cast<std::uint64_t>(p));
            const int n = std::min(n_max, 10);
            const auto check = wave_closed_form_check(n, random_radial(rng, p, 2 * n + 6, 3), random_radial(rng, p, 2 * n + 6, 3));
            pass = pass && check.equal() && check.conserved();
            per_prime.push_back({{"p", p}, {"cases", cases}, {"operator_check", to_json(check)}});
        } catch (const Error& e) {
            pass = false;
            per_prime.push_back({{"p", p}, {"cases", cases}, {"failure", error_entry(e)}});
        }
    }

    // Energy conservation on random exact states.
    struct Drift {
        long p = 0;
        bool zero = false;
        double drift = 0.0;
        std::string error;
    };
    const auto drifts = parallel_map(static_cast<std::size_t>(c.trials), [&](std::size_t i) {
        Drift out;
        out.p = c.p[i % c.p.size()];
        try {
            auto rng = stream(c.seed, 1000003ULL + i);
            const int radius = 4 + 2 * c.steps;
            WaveState s(random_radial(rng, out.p, radius, 3), random_radial(rng, out.p, radius, 3));
            const auto e0 = energy(s);
            for (int k = 0; k < c.steps; ++k) s = wave_step(s);
            const auto drift = energy(s) - e0;
            out.zero = drift.is_zero();
            out.drift = drift.to_double();
        } catch (const Error& e) {
            out.error = e.what();
        }
        return out;
    });
    nlohmann::json energy_cases = nlohmann::json::array();
    bool all_zero = true;
    for (std::size_t i = 0; i < drifts.size(); ++i) {
        all_zero = all_zero && drifts[i].zero && drifts[i].error.empty();
        if (!drifts[i].zero || !drifts[i].error.empty()) {
            energy_cases.push_back({{"trial", i}, {"p", drifts[i].p}, {"drift", drifts[i].drift}, {"error", drifts[i].error}});
        }
    }
    pass = pass && all_zero;
    nlohmann::json results = {{"n_max", n_max},
                              {"primes", per_prime},
                              {"energy", {{"trials", c.trials}, {"steps", c.steps}, {"all_zero", all_zero},
                                          {"nonzero_cases", energy_cases}}}};
    return finish(c, std::move(results), pass, csv.str());
}

CommandResult cmd_design_tree(const ExperimentConfig& c) {
    struct Tuple {
        long p;
        double eta;
        int N;
        double theta0;
    };
    std::vector<Tuple> tuples;
    for (long p : c.p)
        for (double eta : c.eta)
            for (int N : c.N)
                for (double th : c.theta0) tuples.push_back({p, eta, N, th});
    GridSizes grids;
    grids.tempered = c.grid;

    struct Outcome {
        nlohmann::json entry;
        bool pass = false;
        double delta_ratio = 0.0;
        std::vector<std::pair<double, double>> curve;
    };
    const auto outcomes = parallel_map(tuples.size(), [&](std::size_t i) {
        const auto& t = tuples[i];
        Outcome o;
        o.entry = {{"p", t.p}, {"eta", t.eta}, {"N", t.N}, {"theta0", t.theta0}};
        try {
            auto d = design_kernel(t.p, t.eta, t.N, t.theta0);
            if (c.perturb && i == 0) d.kernel[0] += AlgebraicNumber(1);
            const auto rep = verify_design(d, grids);
            o.pass = rep.all_pass(t.eta);
            o.delta_ratio = rep.delta_measured / rep.delta_required;
            o.entry["design"] = to_json(d);
            o.entry["report"] = to_json(rep, t.eta);
            const SphericalTransform h(d.kernel);
            for (int k = 0; k < 64; ++k) {
                const double theta = kPi * k / 63.0;
                o.curve.emplace_back(theta, h(SpectralPoint::tempered(theta)));
            }
        } catch (const Error& e) {
            o.entry["failure"] = error_entry(e);
        }
        return o;
    });
    Csv csv("tuple,theta,h");
    nlohmann::json entries = nlohmann::json::array();
    bool pass = true;
    int passed = 0;
    int failed_checks = 0;
    int errors = 0;
    double min_ratio = INFINITY;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        entries.push_back(o.entry);
        pass = pass && o.pass;
        if (o.entry.contains("failure")) {
            ++errors;
        } else {
            o.pass ? ++passed : ++failed_checks;
            min_ratio = std::min(min_ratio, o.delta_ratio);
        }
        for (const auto& [theta, h] : o.curve) csv.row(i, theta, h);
    }
    nlohmann::json results = {{"tuples", entries},
                              {"summary",
                               {{"designs", tuples.size()},
                                {"passed", passed},
                                {"failed_checks", failed_checks},
                                {"errors", errors},
                                {"min_delta_ratio", std::isfinite(min_ratio) ? nlohmann::json(min_ratio) : nlohmann::json()}}}};
    return finish(c, std::move(results), pass, csv.str());
}

CommandResult cmd_recurrence_tree(const ExperimentConfig& c) {
    constexpr double kThreshold = 0.5;
    Csv csv("p,L,lambda,q,a");
    nlohmann::json entries = nlohmann::json::array();
    bool pass = true;
    bool perturbed = false;
    for (long p : c.p) {
        const double edge = (p + 1) / std::sqrt(static_cast<double>(p));
        for (int L : c.L) {
            struct Point {
                double lambda = 0.0;
                long q = 0;
                double a = 0.0;
                std::string error;
            };
            auto points = parallel_map(static_cast<std::size_t>(c.grid), [&](std::size_t i) {
                Point pt;
                pt.lambda = c.grid == 1 ? 0.0 : -edge + 2.0 * edge * static_cast<double>(i) / (c.grid - 1);
                try {
                    const auto rk = recurrence_kernel(p, L, pt.lambda);
                    pt.q = rk.q;
                    pt.a = rk.a;
                } catch (const Error& e) {
                    pt.error = e.what();
                }
                return pt;
            });
            if (c.perturb && !perturbed && !points.empty()) {
                points[0].a = -points[0].a;
                perturbed = true;
            }
            double min_ratio = INFINITY;
            long max_q = 0;
            int untempered = 0;
            nlohmann::json errs = nlohmann::json::array();
            for (const auto& pt : points) {
                if (!pt.error.empty()) {
                    errs.push_back({{"lambda", pt.lambda}, {"message", pt.error}});
                    continue;
                }
                min_ratio = std::min(min_ratio, pt.a / L);
                max_q = std::max(max_q, pt.q);
                if (std::abs(pt.lambda) > 2.0) ++untempered;
                csv.row(p, L, pt.lambda, pt.q, pt.a);
            }
            const bool ok = errs.empty() && min_ratio >= kThreshold;
            pass = pass && ok;
            entries.push_back({{"p", p},
                               {"L", L},
                               {"grid", c.grid},
                               {"untempered_points", untempered},
                               {"min_a_over_L", min_ratio},
                               {"threshold", kThreshold},
                               {"max_q", max_q},
                               {"errors", errs},
                               {"pass", ok}});
        }
    }
    return finish(c, {{"cases", entries}}, pass, csv.str());
}

CommandResult cmd_selberg(const ExperimentConfig& c) {
    Csv csv("curve,T,x,value");
    bool pass = true;
    nlohmann::json results;

    // Fourier pair on the fixed T set.
    const std::vector<double> pair_T{1.0, 1.5, 2.0, 3.0};
    double pair_worst = 0.0;
    double pair_quad = 0.0;
    bool perturbed = false;
    try {
        for (double T : pair_T) {
            const auto g = selberg_profile(T);
            for (int i = 0; i < c.grid; ++i) {
                const double r = c.grid == 1 ? 0.0 : 8.0 * i / (c.grid - 1);
                auto h = fourier_h(g, SpectralParameter::real(r), 0.1 * c.tol);
                if (c.perturb && !perturbed) {
                    h.value += 1e3 * c.tol;
                    perturbed = true;
                }
                pair_worst = std::max(pair_worst, std::abs(h.value - profile_h(T, SpectralParameter::real(r))));
                pair_quad = std::max(pair_quad, h.error);
                csv.row("h", T, r, h.value);
            }
        }
        results["fourier_pair"] = {{"T", pair_T}, {"points", c.grid}, {"max_deviation", pair_worst},
                                   {"max_quadrature_error", pair_quad}, {"tol", c.tol}, {"pass", pair_worst <= c.tol}};
        pass = pass && pair_worst <= c.tol;
    } catch (const Error& e) {
        results["fourier_pair"] = error_entry(e);
        pass = false;
    }

    // Abel forward transform of the quadrature kernel against the closed-form profile.
    constexpr double kAbelTol = 1e-5;
    try {
        double worst = 0.0;
        for (double T : {1.0, 2.0}) {
            const KernelDecay decay{INFINITY, std::cosh(T) / (8.0 * kPi)};
            for (int i = 0; i <= 10; ++i) {
                const double w = i;
                const auto q = abel_forward([T](double t) { return kernel_k(T, t).value; }, w, decay, 1e-9);
                const double exact = profile_q(T, w) / kSelbergNormalization;
                worst = std::max(worst, std::abs(q.value - exact) / exact);
            }
        }
        results["abel_roundtrip"] = {{"T", {1.0, 2.0}}, {"omega", {0.0, 10.0}}, {"max_relative_deviation", worst},
                                     {"tol", kAbelTol}, {"pass", worst <= kAbelTol}};
        pass = pass && worst <= kAbelTol;
    } catch (const Error& e) {
        results["abel_roundtrip"] = error_entry(e);
        pass = false;
    }

    try {
        const auto sweep = selberg_sweep(c.t_sweep);
        auto j = to_json(sweep);
        constexpr double kSupSlope = -0.45;
        constexpr double kTailSlope = -1.0;
        nlohmann::json shapes = nlohmann::json::array();
        for (double T : c.t_sweep) {
            const auto sh = kernel_shape(T);
            shapes.push_back({{"T", T}, {"plateau_constant", sh.plateau_constant}, {"decay_constant", sh.decay_constant}});
            for (int i = 0; i < 48; ++i) {
                const double t = std::expm1(std::log1p(std::pow(std::sinh(2.0 * T), 2)) * i / 47.0);
                csv.row("k", T, t, kernel_k(T, t).value);
            }
        }
        const bool bounded = std::isfinite(sweep.sup_constant_max) && std::isfinite(sweep.tail_constant_max);
        const bool sup_ok = sweep.sup_fit.slope <= kSupSlope;
        const bool tail_ok = sweep.tail_fit.slope <= kTailSlope;
        j["shape"] = shapes;
        j["checks"] = {{"constants_bounded", bounded},
                       {"sup_slope_threshold", kSupSlope},
                       {"sup_slope_ok", sup_ok},
                       {"tail_slope_threshold", kTailSlope},
                       {"tail_slope_ok", tail_ok}};
        results["kernel_bounds"] = j;
        pass = pass && bounded && sup_ok && tail_ok;
    } catch (const Error& e) {
        results["kernel_bounds"] = error_entry(e);
        pass = false;
    }
    return finish(c, std::move(results), pass, csv.str());
}

CommandResult cmd_design_hyperbolic(const ExperimentConfig& c) {
    TransformCache cache(c.tol);
    HyperbolicGrids grids;
    grids.tempered = c.grid;
    Csv csv("tuple,r,imaginary,h");
    nlohmann::json entries = nlohmann::json::array();
    bool pass = true;
    int passed = 0;
    int errors = 0;
    std::size_t index = 0;
    for (double eta : c.eta) {
        for (int N : c.N) {
            for (const auto& r : c.r_target) {
                nlohmann::json entry = {{"eta", eta}, {"N", N}, {"r_target", param_text(r)}};
                try {
                    auto k = design_hyperbolic_kernel(eta, N, r);
                    if (c.perturb && index == 0) k.terms.front().weight = -k.terms.front().weight;
                    const auto rep = verify_hyperbolic_kernel(k, cache, grids);
                    const bool ok = rep.all_pass(k.L);
                    entry["design"] = to_json(k);
                    entry["report"] = to_json(rep, k.L);
                    pass = pass && ok;
                    passed += ok ? 1 : 0;
                    const CombinedTransform h(k, cache);
                    for (int i = 0; i < 33; ++i) {
                        const double v = rep.window_lo + (rep.window_hi - rep.window_lo) * i / 32.0;
                        const SpectralParameter x{v, r.imaginary};
                        csv.row(index, v, r.imaginary ? 1 : 0, h.value(x));
                    }
                } catch (const Error& e) {
                    entry["failure"] = error_entry(e);
                    pass = false;
                    ++errors;
                }
                entries.push_back(entry);
                ++index;
            }
        }
    }
    nlohmann::json results = {{"tuples", entries}, {"summary", {{"designs", index}, {"passed", passed}, {"errors", errors}}}};
    try {
        const auto sweep = truncation_sweep(c.t_sweep, cache);
        const bool ok = sweep.certified_ok && std::isfinite(sweep.fitted_constant);
        auto j = to_json(sweep);
        j["pass"] = ok;
        results["truncation"] = j;
        pass = pass && ok;
    } catch (const Error& e) {
        results["truncation"] = error_entry(e);
        pass = false;
    }
    return finish(c, std::move(results), pass, csv.str());
}

CommandResult cmd_recurrence_hyperbolic(const ExperimentConfig& c) {
    constexpr double kThreshold = 0.5;
    TransformCache cache;
    Csv csv("q,L,annulus,t_lo,t_hi,value");
    nlohmann::json amplification = nlohmann::json::array();
    bool pass = true;
    bool perturbed = false;
    for (int L : c.L) {
        for (const auto& r : c.r_target) {
            try {
                auto rec = recurrence_amplification(r, L, cache);
                if (c.perturb && !perturbed) {
                    for (auto& v : rec.term_values) v = -v;
                    rec.h_value = -rec.h_value;
                    rec.amplification = -rec.amplification;
                    rec.amplification_scaled = -rec.amplification_scaled;
                    perturbed = true;
                }
                const bool ok = rec.amplification_scaled >= kThreshold;
                auto j = to_json(rec);
                j["threshold"] = kThreshold;
                j["pass"] = ok;
                amplification.push_back(j);
                pass = pass && ok;
            } catch (const Error& e) {
                auto j = error_entry(e);
                j["r_star"] = param_text(r);
                j["L"] = L;
                amplification.push_back(j);
                pass = false;
            }
        }
    }
    nlohmann::json annuli = nlohmann::json::array();
    double constant = 0.0;
    for (long q : c.q) {
        for (int L : c.L) {
            try {
                const auto rep = verify_annuli_bounds(q, L, c.tol);
                for (const auto& a : rep.annuli) csv.row(q, L, a.index, a.t_lo, a.t_hi, a.value);
                bool ok = std::isfinite(rep.max_value);
                for (const auto& a : rep.annuli) ok = ok && a.error <= 1e-6 * std::max(a.value, 1e-12) + 1e-14;
                auto j = to_json(rep);
                j["pass"] = ok;
                annuli.push_back(j);
                constant = std::max(constant, rep.max_value);
                pass = pass && ok;
            } catch (const Error& e) {
                auto j = error_entry(e);
                j["q"] = q;
                j["L"] = L;
                annuli.push_back(j);
                pass = false;
            }
        }
    }
    nlohmann::json results = {{"amplification", amplification}, {"annuli", annuli}, {"annulus_constant", constant}};
    return finish(c, std::move(results), pass, csv.str());
}

CommandResult cmd_quasimode(const ExperimentConfig& c) {
    Csv csv("section,index,r,omega,defect,outside_mass,bound");
    bool pass = true;
    nlohmann::json results;

    TrialConfig tc;
    tc.seed = c.seed;
    tc.trials = c.trials;
    tc.inject_fault = c.perturb;
    const auto summary = run_projection_trials(tc);
    results["trials"] = to_json(summary);
    pass = pass && summary.failed == 0;

    // Explicit windows from the configuration; a degenerate one is a failure.
    nlohmann::json windows = nlohmann::json::array();
    std::size_t index = 0;
    for (const auto& r : c.r_target) {
        for (double w : c.omega) {
            nlohmann::json entry = {{"r", param_text(r)}, {"omega", w}};
            try {
                if (r.imaginary) throw InvalidArgument("Laplace windows need a real spectral parameter");
                auto rng = stream(c.seed, 7000000ULL + index);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                std::vector<Component> comps;
                for (int i = 0; i < 50; ++i) {
                    comps.push_back({std::max(0.0, r.value + 4.0 * std::abs(w) * (2.0 * unit(rng) - 1.0)), 2.0 * unit(rng) - 1.0});
                }
                const auto rep = verify_projection_bound(SpectralDecomposition::laplace(std::move(comps)), r.value, w);
                entry["report"] = to_json(rep);
                pass = pass && rep.holds;
                csv.row("window", index, r.value, w, rep.defect, rep.outside_mass, rep.bound);
            } catch (const Error& e) {
                entry["failure"] = error_entry(e);
                pass = false;
            }
            windows.push_back(entry);
            ++index;
        }
    }
    results["windows"] = windows;

    const auto tight = adversarial_projection(50.0, 0.5, 0.2, 1e-6);
    results["adversarial"] = to_json(tight);
    pass = pass && tight.holds;

    try {
        const auto design = design_kernel(5, 0.3, 40, 0.0);
        const SphericalTransform h(design.kernel);
        auto rng = stream(c.seed, 9000000ULL);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Component> comps;
        for (int i = 0; i < 20; ++i) comps.push_back({1.0 + 0.05 * (2.0 * unit(rng) - 1.0), 2.0 * unit(rng) - 1.0});
        const auto app = apply_kernel(SpectralDecomposition::hecke(5, std::move(comps)), h, 1.0);
        results["kernel_application"] = to_json(app);
        pass = pass && app.lipschitz_bound_holds;
    } catch (const Error& e) {
        results["kernel_application"] = error_entry(e);
        pass = false;
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(summary.failures.size(), 16); ++i) {
        const auto& f = summary.failures[i];
        csv.row("failure", i, f.r, f.omega, f.defect, f.outside_mass, f.bound);
    }
    return finish(c, std::move(results), pass, csv.str());
}

}  // namespace skl
