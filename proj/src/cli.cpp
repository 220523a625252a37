#include "hgain/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "hgain/gains.hpp"
#include "hgain/halton.hpp"
#include "hgain/primes.hpp"
#include "hgain/rqmc.hpp"
#include "hgain/scramble.hpp"

namespace hgain::cli {

using Json = nlohmann::ordered_json;

std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_g17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

/// A check inside a subcommand failed (exit code 2).
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json json_int(i128 v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return Json(std::int64_t(v));
    return Json(to_string(v));
}

std::string join(const std::vector<unsigned>& values, char sep) {
    std::string out;
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (t) out.push_back(sep);
        out += std::to_string(values[t]);
    }
    return out;
}

void append_rational_columns(std::string& line, const Rational& g) {
    line += to_string(g.numerator());
    line += ',';
    line += to_string(g.denominator());
    line += ',';
    line += format_g17(g.to_double());
}

struct Options {
    // common
    std::uint64_t seed = 0;
    std::string format;
    std::string out_path;
    unsigned threads = 0;
    // shared parameters
    std::size_t d = 0;
    std::uint64_t n = 0;
    std::vector<unsigned> u;
    std::vector<unsigned> k;
    // points
    std::uint64_t start = 0;
    std::string scramble = "none";
    std::uint64_t replicate = 0;
    std::vector<std::size_t> order;
    // gain-curve / oracle-check
    std::uint64_t n_max = 0;
    unsigned k_max = 1;
    // gamma
    std::optional<std::uint64_t> n_cap;
    std::optional<std::uint64_t> at_n;
    // bounds / figure
    std::size_t d_max = 0;
    int figure = 0;
    // variance
    std::size_t reps = 0;
    bool monte_carlo = false;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    std::string format_or(const char* fallback) const { return o_.format.empty() ? fallback : o_.format; }

    Json config(const char* subcommand) const {
        Json c;
        c["subcommand"] = subcommand;
        c["seed"] = o_.seed;
        c["threads"] = o_.threads;
        return c;
    }

    // Levels default to zeros when --k is omitted.
    std::vector<unsigned> levels() const {
        if (o_.k.empty()) return std::vector<unsigned>(o_.u.size(), 0);
        return o_.k;
    }

    PrimeBasis basis_for(const CoordSubset& u) const { return first_primes(std::max<std::size_t>(1, u.max_coordinate())); }

    int primes() {
        auto basis = first_primes(o_.d);
        if (format_or("csv") == "json") {
            Json j;
            auto cfg = config("primes");
            cfg["d"] = o_.d;
            j["config"] = cfg;
            j["primes"] = std::vector<std::uint32_t>(basis.bases().begin(), basis.bases().end());
            out_ << j.dump() << '\n';
            return kOk;
        }
        std::string buf = "j,prime\n";
        for (std::size_t j = 1; j <= basis.dimension(); ++j) {
            buf += std::to_string(j);
            buf += ',';
            buf += std::to_string(basis.base(j));
            buf += '\n';
            flush_if_large(buf);
        }
        out_ << buf;
        return kOk;
    }

    int points() {
        auto basis = first_primes(o_.d);
        HaltonOptions opts;
        opts.order = o_.order;
        auto pts = halton_points(basis, o_.start, o_.n, opts);
        ScrambleSpec spec{parse_scramble_kind(o_.scramble), o_.seed, o_.replicate, {}};
        pts = randomize(pts, spec);

        if (format_or("csv") == "json") {
            Json j;
            auto cfg = config("points");
            cfg["d"] = o_.d;
            cfg["n"] = o_.n;
            cfg["start"] = o_.start;
            cfg["scramble"] = to_string(spec.kind);
            cfg["replicate"] = o_.replicate;
            j["config"] = cfg;
            Json rows = Json::array();
            for (std::size_t r = 0; r < pts.count(); ++r) {
                Json x = Json::array();
                for (std::size_t c = 0; c < pts.dimension(); ++c) x.push_back(pts.coordinate(r, c));
                rows.push_back(Json{{"i", pts.index(r)}, {"x", x}});
            }
            j["points"] = rows;
            out_ << j.dump() << '\n';
            return kOk;
        }
        std::string buf;
        if (spec.kind != ScrambleKind::none)
            buf += "# scramble=" + to_string(spec.kind) + " seed=" + std::to_string(o_.seed) +
                   " replicate=" + std::to_string(o_.replicate) + "\n";
        buf += "i";
        for (std::size_t c = 1; c <= pts.dimension(); ++c) buf += ",x" + std::to_string(c);
        buf += '\n';
        for (std::size_t r = 0; r < pts.count(); ++r) {
            buf += std::to_string(pts.index(r));
            for (std::size_t c = 0; c < pts.dimension(); ++c) {
                buf += ',';
                buf += format_g17(pts.coordinate(r, c));
            }
            buf += '\n';
            flush_if_large(buf);
        }
        out_ << buf;
        return kOk;
    }

    int gain() {
        auto u = CoordSubset::of(o_.u);
        auto basis = basis_for(u);
        auto lv = levels();
        Rational g = gain_exact(GainQuery::make(basis, u, lv, o_.n));
        const auto fmt = format_or("text");
        if (fmt == "json") {
            Json j;
            auto cfg = config("gain");
            cfg["u"] = o_.u;
            cfg["k"] = lv;
            cfg["n"] = o_.n;
            j["config"] = cfg;
            j["gain"] = g.str();
            j["gain_num"] = json_int(g.numerator());
            j["gain_den"] = json_int(g.denominator());
            j["gain_float"] = g.to_double();
            out_ << j.dump() << '\n';
        } else if (fmt == "csv") {
            std::string line = "u,k,n,gain_num,gain_den,gain_float\n";
            line += join(u.members(), ';') + ',' + join(lv, ';') + ',' + std::to_string(o_.n) + ',';
            append_rational_columns(line, g);
            out_ << line << '\n';
        } else {
            out_ << g.str() << " (" << format_shortest(g.to_double()) << ")\n";
        }
        return kOk;
    }

    int gain_curve() {
        auto u = CoordSubset::of(o_.u);
        auto basis = basis_for(u);
        auto q = GainQuery::make(basis, u, levels(), 1);
        if (o_.n_max == 0) throw std::invalid_argument("--n-max must be positive");
        std::string buf = "n,gain_num,gain_den,gain_float\n";
        for (std::uint64_t n = 1; n <= o_.n_max; ++n) {
            buf += std::to_string(n);
            buf += ',';
            append_rational_columns(buf, gain_exact(q.with_n(n)));
            buf += '\n';
            flush_if_large(buf);
        }
        out_ << buf;
        return kOk;
    }

    int gamma() {
        auto basis = first_primes(std::max<std::size_t>(o_.d, 1));
        const auto fmt = format_or("json");
        Json j;
        auto cfg = config("gamma");
        cfg["d"] = o_.d;
        if (o_.at_n) {
            auto arg = gamma_at_n(o_.d, *o_.at_n, basis, o_.threads);
            cfg["n"] = *o_.at_n;
            if (fmt == "csv") {
                std::string line = "d,n,gamma_num,gamma_den,gamma_float,argmax_u,argmax_k\n";
                line += std::to_string(o_.d) + ',' + std::to_string(*o_.at_n) + ',';
                append_rational_columns(line, arg.value);
                line += ',' + join(arg.u.members(), ';') + ',' + join(arg.levels, ';') + '\n';
                out_ << line;
                return kOk;
            }
            j["config"] = cfg;
            j["d"] = o_.d;
            j["n"] = *o_.at_n;
            j["gamma"] = arg.value.str();
            j["gamma_num"] = json_int(arg.value.numerator());
            j["gamma_den"] = json_int(arg.value.denominator());
            j["argmax_u"] = arg.u.members();
            j["argmax_k"] = arg.levels;
            out_ << j.dump() << '\n';
            return kOk;
        }
        auto summary = gamma_max(o_.d, basis, o_.n_cap, o_.threads);
        if (o_.n_cap) cfg["n_cap"] = *o_.n_cap;
        if (fmt == "csv") {
            std::string line = "d,gamma_num,gamma_den,gamma_float,argmax_n\n";
            line += std::to_string(o_.d) + ',';
            append_rational_columns(line, summary.gamma);
            line += ',' + std::to_string(summary.argmax_n) + '\n';
            out_ << line;
            return kOk;
        }
        j["config"] = cfg;
        j["d"] = o_.d;
        j["gamma"] = summary.gamma.str();
        j["gamma_num"] = json_int(summary.gamma.numerator());
        j["gamma_den"] = json_int(summary.gamma.denominator());
        j["gamma_float"] = summary.gamma.to_double();
        j["argmax_n"] = summary.argmax_n;
        j["n_searched"] = summary.n_searched;
        j["complete"] = summary.complete;
        j["lower_bound"] = summary.lower_bound;
        j["upper_bound"] = summary.upper_bound;
        out_ << j.dump() << '\n';
        return kOk;
    }

    int bounds(std::size_t first_d) {
        std::string buf = "d,lower,upper,guide\n";
        bounds_table(o_.d_max, [&](const BoundsRow& row) {
            if (row.d < first_d) return;
            buf += std::to_string(row.d);
            buf += ',';
            buf += format_g17(row.lower);
            buf += ',';
            buf += format_g17(row.upper);
            buf += ',';
            buf += format_g17(row.guide);
            buf += '\n';
            flush_if_large(buf);
        });
        out_ << buf;
        return kOk;
    }

    int variance() {
        auto u = CoordSubset::of(o_.u);
        auto basis = basis_for(u);
        auto lv = levels();
        auto f = HaarIntegrand::make_default(u, lv, basis);
        ScrambleSpec spec{parse_scramble_kind(o_.scramble), o_.seed, 0, {}};
        auto summary = o_.monte_carlo ? mc_estimate(f, basis, o_.n, o_.reps, o_.seed, o_.threads)
                                      : rqmc_estimate(f, basis, o_.n, o_.reps, spec, o_.threads);
        Rational expected = o_.monte_carlo ? Rational(1) : gain_exact(GainQuery::make(basis, u, lv, o_.n));
        const double diff = summary.empirical_gain - expected.to_double();
        Json z = summary.gain_std_error > 0 ? Json(diff / summary.gain_std_error)
                 : diff == 0                ? Json(0.0)
                                            : Json(nullptr);

        Json j;
        auto cfg = config("variance");
        cfg["u"] = o_.u;
        cfg["k"] = lv;
        cfg["n"] = o_.n;
        cfg["reps"] = o_.reps;
        cfg["scramble"] = o_.monte_carlo ? std::string("mc") : to_string(spec.kind);
        j["config"] = cfg;
        j["n"] = summary.n;
        j["R"] = summary.replicates;
        j["mean"] = summary.mean;
        j["var"] = summary.variance;
        j["sigma2"] = summary.sigma2;
        j["empirical_gain"] = summary.empirical_gain;
        j["gain_std_error"] = summary.gain_std_error;
        j["expected_gain_num"] = json_int(expected.numerator());
        j["expected_gain_den"] = json_int(expected.denominator());
        j["z_score"] = z;
        out_ << j.dump() << '\n';
        return kOk;
    }

    int oracle_check() {
        if (o_.d == 0 || o_.d > 6) throw std::invalid_argument("oracle-check supports 1 <= d <= 6");
        if (o_.n_max == 0 || o_.n_max > kBruteForceMaxN) throw std::invalid_argument("--n-max outside 1..10000");
        auto basis = first_primes(o_.d);
        std::uint64_t comparisons = 0, mismatches = 0;
        std::ostringstream detail;
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << o_.d); ++mask) {
            auto u = CoordSubset::from_mask(mask);
            const std::size_t s = u.size();
            std::vector<unsigned> lv(s, 0);
            for (;;) {
                auto q = GainQuery::make(basis, u, lv, 1);
                for (std::uint64_t n = 1; n <= o_.n_max; ++n) {
                    auto qn = q.with_n(n);
                    Rational a = gain_exact(qn);
                    Rational b = gain_bruteforce(qn);
                    ++comparisons;
                    if (a != b) {
                        ++mismatches;
                        if (mismatches <= 10)
                            detail << "mismatch u=" << join(u.members(), ';') << " k=" << join(lv, ';')
                                   << " n=" << n << ": " << a << " vs " << b << '\n';
                    }
                }
                std::size_t t = 0;
                while (t < s && lv[t] == o_.k_max) lv[t++] = 0;
                if (t == s) break;
                ++lv[t];
            }
        }
        if (format_or("text") == "json") {
            Json j;
            auto cfg = config("oracle-check");
            cfg["d"] = o_.d;
            cfg["n_max"] = o_.n_max;
            cfg["k_max"] = o_.k_max;
            j["config"] = cfg;
            j["comparisons"] = comparisons;
            j["mismatches"] = mismatches;
            out_ << j.dump() << '\n';
        } else {
            out_ << detail.str() << "oracle-check d=" << o_.d << " n-max=" << o_.n_max << " k-max=" << o_.k_max
                 << ": " << comparisons << " comparisons, " << mismatches << " mismatches\n";
        }
        return mismatches == 0 ? kOk : kCheckFailed;
    }

    int figure() {
        switch (o_.figure) {
            case 1:
                if (o_.d_max < 2) throw std::invalid_argument("figure 1 needs --d-max >= 2");
                return bounds(2);
            case 2: return figure2();
            case 3: return figure3();
            default: throw std::invalid_argument("figure must be 1, 2 or 3");
        }
    }

private:
    void flush_if_large(std::string& buf) {
        if (buf.size() > (1u << 20)) {
            out_ << buf;
            buf.clear();
        }
    }

    int figure2() {
        auto basis = first_primes(2);
        auto u = CoordSubset::full(2);
        std::string buf = "k1,k2,n,gain_num,gain_den,gain_float\n";
        const std::vector<std::vector<unsigned>> curves = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        for (const auto& lv : curves) {
            auto q = GainQuery::make(basis, u, lv, 1);
            for (std::uint64_t n = 1; n <= 36; ++n) {
                buf += std::to_string(lv[0]) + ',' + std::to_string(lv[1]) + ',' + std::to_string(n) + ',';
                append_rational_columns(buf, gain_exact(q.with_n(n)));
                buf += '\n';
            }
        }
        out_ << buf;
        return kOk;
    }

    int figure3() {
        constexpr std::uint64_t kNMax = 1000;
        auto basis = first_primes(3);
        std::string buf = "u,k,n,gain_num,gain_den,gain_float\n";
        std::vector<CoordSubset> subsets;
        for (std::uint64_t mask = 1; mask < 8; ++mask) subsets.push_back(CoordSubset::from_mask(mask));
        std::stable_sort(subsets.begin(), subsets.end(), subset_precedes);
        for (auto u : subsets) {
            const auto members = u.members();
            std::vector<unsigned> lv(members.size(), 0);
            // Level vectors in lexicographic order with prod b^k < kNMax.
            auto visit = [&](auto&& self, std::size_t t, std::uint64_t product) -> void {
                if (t == members.size()) {
                    auto q = GainQuery::make(basis, u, lv, 1);
                    for (std::uint64_t n = product + 1; n <= kNMax; ++n) {
                        buf += join(members, ';') + ',' + join(lv, ';') + ',' + std::to_string(n) + ',';
                        append_rational_columns(buf, gain_exact(q.with_n(n)));
                        buf += '\n';
                        flush_if_large(buf);
                    }
                    return;
                }
                std::uint64_t p = product;
                for (unsigned k = 0; p < kNMax; ++k, p *= basis.base(members[t])) {
                    lv[t] = k;
                    self(self, t + 1, p);
                }
                lv[t] = 0;
            };
            visit(visit, 0, 1);
        }
        out_ << buf;
        return kOk;
    }

    const Options& o_;
    std::ostream& out_;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scrambled Halton sequences and their exact gain coefficients", "halton-gain"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
    app.add_option("--out", o.out_path, "Write output to this file");
    app.add_option("--threads", o.threads, "Worker threads (0 = all available)");

    auto* primes = app.add_subcommand("primes", "First d primes");
    primes->add_option("--d", o.d, "Number of primes")->required();

    auto* points = app.add_subcommand("points", "Halton points, optionally scrambled");
    points->add_option("--d", o.d, "Dimension")->required();
    points->add_option("--n", o.n, "Number of points")->required();
    points->add_option("--start", o.start, "First index");
    points->add_option("--scramble", o.scramble, "none | nested | linear")
        ->check(CLI::IsMember({"none", "nested", "linear"}));
    points->add_option("--replicate", o.replicate, "Replicate index");
    points->add_option("--order", o.order, "1-based basis index for each input coordinate")->delimiter(',');

    auto* gain = app.add_subcommand("gain", "Exact gain coefficient G_{u,k}(n)");
    gain->add_option("--u", o.u, "Coordinates, e.g. 1,2")->delimiter(',')->required();
    gain->add_option("--k", o.k, "Levels, one per coordinate")->delimiter(',');
    gain->add_option("--n", o.n, "Sample size")->required();

    auto* curve = app.add_subcommand("gain-curve", "Gain coefficient for n = 1..n-max");
    curve->add_option("--u", o.u, "Coordinates")->delimiter(',')->required();
    curve->add_option("--k", o.k, "Levels")->delimiter(',');
    curve->add_option("--n-max", o.n_max, "Largest n")->required();

    auto* gamma = app.add_subcommand("gamma", "Worst-case gain in dimension d");
    gamma->add_option("--d", o.d, "Dimension")->required();
    gamma->add_option("--n-cap", o.n_cap, "Search n only up to this value");
    gamma->add_option("--at-n", o.at_n, "Report Gamma_d(n) at this n instead");

    auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds on the worst-case gain");
    bounds->add_option("--d-max", o.d_max, "Largest dimension")->required();

    auto* variance = app.add_subcommand("variance", "Replicated RQMC variance of a single-component integrand");
    variance->add_option("--u", o.u, "Coordinates")->delimiter(',')->required();
    variance->add_option("--k", o.k, "Levels")->delimiter(',');
    variance->add_option("--n", o.n, "Sample size")->required();
    variance->add_option("--reps", o.reps, "Replicates")->required();
    o.scramble = "nested";
    variance->add_option("--scramble", o.scramble, "nested | linear | none")
        ->check(CLI::IsMember({"none", "nested", "linear"}));
    variance->add_flag("--mc", o.monte_carlo, "Plain Monte Carlo baseline instead of RQMC");

    auto* oracle = app.add_subcommand("oracle-check", "Closed form against brute force");
    oracle->add_option("--d", o.d, "Dimension")->required();
    oracle->add_option("--n-max", o.n_max, "Largest n")->required();
    oracle->add_option("--k-max", o.k_max, "Largest level per coordinate");

    auto* figure = app.add_subcommand("figure", "Plot-ready data for figures 1-3");
    figure->add_option("which", o.figure, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
    o.d_max = 1'000'000;
    figure->add_option("--d-max", o.d_max, "Largest dimension for figure 1");

    // The `points` default scramble is "none"; variance overrides to "nested"
    // only if --scramble is not given there.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kValidationError;
    }
    if (points->parsed() && points->count("--scramble") == 0) o.scramble = "none";

    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out_path.empty()) {
        file.open(o.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot open " << o.out_path << "\n";
            return kValidationError;
        }
        sink = &file;
    }

    Runner run(o, *sink);
    try {
        int code = kOk;
        if (primes->parsed()) code = run.primes();
        else if (points->parsed()) code = run.points();
        else if (gain->parsed()) code = run.gain();
        else if (curve->parsed()) code = run.gain_curve();
        else if (gamma->parsed()) code = run.gamma();
        else if (bounds->parsed()) code = run.bounds(1);
        else if (variance->parsed()) code = run.variance();
        else if (oracle->parsed()) code = run.oracle_check();
        else if (figure->parsed()) code = run.figure();
        sink->flush();
        return code;
    } catch (const CheckFailure& e) {
        err << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }
}

}  // namespace hgain::cli
