// Runs the default suite twice and prints one PASS/FAIL line per acceptance
// criterion.  Exit status 1 when any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "vplab/report.hpp"
#include "vplab/runner.hpp"
#include "vplab/scenario.hpp"

using namespace vplab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void line(int id, const std::string& what, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    fmt::print("AC{:<2} {:<34} {}  {}\n", id, what, ok ? "PASS" : "FAIL", detail);
    std::fflush(stdout);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const CheckOutcome* outcome(const ScenarioResult& r, const std::string& check) {
    for (const CheckOutcome& c : r.report.checks)
        if (c.check == check) return &c;
    return nullptr;
}

std::string note(const ScenarioResult& r, const std::string& check) {
    const CheckOutcome* c = outcome(r, check);
    if (!c) return " [check missing]";
    return c->message.empty() ? "" : " [" + c->message + "]";
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vplab_acceptance";
    fs::remove_all(root);

    const Scenario def;
    RunOptions opt;
    opt.out_dir = (root / "run1").string();
    fmt::print("default suite, run 1 -> {}\n", opt.out_dir);
    std::fflush(stdout);
    const RunResult run1 = run_scenarios({def}, opt);
    const ScenarioResult& r = run1.scenarios.front();
    const Floors& fl = *r.floors;

    {
        const SteadyCheck& s = *r.steady;
        const bool ok = std::abs(s.mass - 1) <= 1e-8 && s.virial <= 0.01 && s.stationarity <= 1e-5 &&
                        s.stationarity_refined < s.stationarity;
        line(1, "steady-state construction", ok,
             fmt::format("mass-1={:.2e} |2K+W|/|W|={:.2e} stationarity={:.2e} refined={:.2e} translated={:.2e}{}",
                         s.mass - 1, s.virial, s.stationarity, s.stationarity_refined, s.translated,
                         note(r, "steady")));
    }
    {
        double det = 0, rev = 0, margin = INFINITY;
        bool ok = r.flow.size() == 10;
        for (const FlowCheck& f : r.flow) {
            det = std::max(det, f.det_error);
            rev = std::max(rev, f.reversibility / f.reversibility_bound);
            margin = std::min(margin, f.gronwall_margin);
            ok = ok && f.det_error <= 1e-8 && f.reversibility <= f.reversibility_bound && f.gronwall_margin >= 0;
        }
        line(2, "flow integrity (10 seeds)", ok,
             fmt::format("max|det-1|={:.2e} max rev/(10 tol(1+|z|))={:.2e} min Gronwall log-margin={:.4g}", det, rev,
                         margin));
    }
    {
        const double l1 = r.invariance_l1.value_or(INFINITY);
        line(3, "invariance under chi(e)", l1 < 1e-4 * r.steady->mass,
             fmt::format("L1={:.2e} (bound 1e-4 mass)", l1));
    }
    {
        double defect = 0, rl1 = 0;
        bool ok = r.equimeasurability.size() == 10;
        for (const EquimeasurabilityCheck& e : r.equimeasurability) {
            defect = std::max(defect, e.defect);
            rl1 = std::max(rl1, e.rearranged_l1);
            ok = ok && e.defect <= 2 * fl.rearrangement.defect && e.rearranged_l1 <= 2 * fl.rearrangement.l1;
        }
        line(4, "equimeasurability", ok,
             fmt::format("max defect={:.3e} (floor 2x{:.3e}) max rearranged L1={:.3e} (floor 2x{:.3e})", defect,
                         fl.rearrangement.defect, rl1, fl.rearrangement.l1));
    }
    {
        double worst = 0, order = INFINITY, rate = 0, paper = 0;
        bool ok = r.first_variation.size() == 10;
        for (const FirstVariationCheck& f : r.first_variation) {
            worst = std::max(worst, std::abs(f.at_zero) / f.bound);
            order = std::min(order, f.fd_order);
            rate = std::max(rate, f.rate_mismatch);
            paper = std::max(paper, f.paper_scaled);
            ok = ok && std::abs(f.at_zero) <= f.bound && f.fd_order >= 1.8;
        }
        line(5, "first variation", ok,
             fmt::format("max |D1(0)|/bound={:.2e} min FD order={:.3f} exact-rate mismatch={:.1e} paper-form "
                         "error/(|grad H| |E|)={:.2e}{}",
                         worst, order, rate, paper, note(r, "first_variation")));
    }
    {
        bool ok = r.sweeps.size() == 5;
        std::string d;
        for (const Sweep& s : r.sweeps) {
            ok = ok && std::abs(s.fit.l1 - 1) <= 0.1 && std::abs(s.fit.delta_energy - 2) <= 0.1 &&
                 std::abs(s.fit.gap - 2) <= 0.15 && s.fit.deviation >= 2.7;
            d += fmt::format(" [{:.3f} {:.3f} {:.3f} {:.3f}]", s.fit.l1, s.fit.delta_energy, s.fit.gap,
                             s.fit.deviation);
        }
        line(6, "scaling exponents (L1 dH gap dev)", ok, d.substr(1));
    }
    {
        bool ok = r.sweeps.size() == 5;
        double spread = 0, worst = INFINITY;
        for (const Sweep& s : r.sweeps) {
            spread = std::max(spread, s.fit.ratio_spread);
            for (const SweepPoint& p : s.points) {
                ok = ok && p.lower.positive && p.lower.hypotheses_ok;
                worst = std::min(worst, p.lower.ratio);
            }
            ok = ok && s.fit.ratio_spread < 0.25;
        }
        line(7, "stability lower bound", ok,
             fmt::format("min dH/L1^2={:.4f} max spread over the two smallest lambda={:.2f}%", worst, 100 * spread));
    }
    {
        double interp = INFINITY, nash = 0;
        bool ok = !r.inequalities.empty();
        for (const InequalityCheck& q : r.inequalities) {
            interp = std::min(interp, q.interp_worst);
            nash = std::max(nash, q.nash_scaling);
        }
        for (const ChainReport& c : r.scan)
            for (const Interpolation& in : c.interp) interp = std::min(interp, in.margin / in.rhs);
        ok = ok && interp >= -1e-12 && r.single_mode_equality <= 1e-10 && nash <= 1e-12;
        line(8, "interpolation / Nash / Sobolev", ok,
             fmt::format("min margin/rhs={:.2e} single-mode gap={:.1e} Nash scaling change={:.1e}", interp,
                         r.single_mode_equality, nash));
    }
    {
        bool ok = !r.exponents.empty() && r.exponents.front().h_exponent == Rational(4, 3) &&
                  r.exponents.front().final_eps_power == Rational(1, 6);
        for (const ChainExponents& e : r.exponents) ok = ok && e.h_exceeds_nash;
        line(9, "exponent arithmetic", ok,
             fmt::format("(22,6,4): {} and {}; (3r-10)/(2(r-1)) >= 4/3 for r=22..40",
                         to_string(r.exponents.front().h_exponent), to_string(r.exponents.front().final_eps_power)));
    }
    {
        bool ok = r.scan.size() == 15;
        fmt::print("     seed  eps    amplitude  A_k ratio  stationarity  x floor\n");
        for (const ChainReport& c : r.scan) {
            fmt::print("     {:<4}  {:<5}  {:.3e}  {:9.3f}  {:.3e}     {:.0f}\n", c.seed, c.eps, c.amplitude, c.ak.ratio,
                       c.stationarity, c.stationarity / c.stationarity_floor);
            ok = ok && c.ak.member && !c.impostor && c.stationarity > 10 * c.stationarity_floor;
        }
        line(10, "uniqueness scan", ok, fmt::format("{} samples, floor {:.2e}{}", r.scan.size(), fl.stationarity,
                                                      note(r, "scan")));
    }
    {
        RunOptions o2 = opt;
        o2.out_dir = (root / "run2").string();
        fmt::print("default suite, run 2 -> {}\n", o2.out_dir);
        std::fflush(stdout);
        run_scenarios({def}, o2);
        const std::string a = read_text((fs::path(opt.out_dir) / "report.csv").string());
        const std::string b = read_text((fs::path(o2.out_dir) / "report.csv").string());
        line(11, "determinism", a == b,
             fmt::format("report.csv {} bytes, fnv1a {:016x} vs {:016x}", a.size(), fnv1a(a), fnv1a(b)));
    }
    {
        // frozen checksum of the default report on the reference build
        const std::string a = read_text((fs::path(opt.out_dir) / "report.csv").string());
        const fs::path golden = fs::path(VPLAB_SOURCE_DIR) / "tests" / "acceptance" / "golden_default.txt";
        std::string want;
        std::ifstream(golden) >> want;
        const std::string got = fmt::format("{:016x}", fnv1a(a));
        const bool ok = want == got;
        if (!ok) ++failures;
        fmt::print("golden default report checksum       {}  fnv1a {} (frozen {})\n", ok ? "PASS" : "FAIL", got,
                   want.empty() ? "missing" : want);
    }
    fmt::print("other checks of the run: {}\n", run1.exit_code() == 0 ? "all passed" : "see summary.txt");
    fmt::print("{} failed (11 criteria and the golden checksum)\n", failures);
    return failures ? 1 : 0;
}
