#include "kmt/report.hpp"

#include "kmt/errors.hpp"
#include "kmt/fluid.hpp"
#include "kmt/kernel.hpp"
#include "kmt/oracle.hpp"
#include "kmt/singularity.hpp"
#include "kmt/srbm.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace kmt {

using nlohmann::json;

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

namespace {

json tail_json(const TailForm& t) {
  return json{{"rate", num(t.rate)},
              {"power", num(t.power)},
              {"constant", num(t.constant)},
              {"provenance", std::string(to_string(t.provenance))},
              {"error_band", num(t.error_band)},
              {"offset", t.offset},
              {"note", t.note}};
}

json stability_json(const StabilityVerdict& s) {
  return json{{"verdict", std::string(to_string(s.verdict))},
              {"verified", s.verified},
              {"reason", s.reason}};
}

json case_json(const CaseLabel& l) {
  return json{{"id", l.case_id},
              {"x_dom", num(l.x_dom)},
              {"pole_meets_branch", l.pole_meets_branch},
              {"near_degenerate", l.near_degenerate},
              {"notes", l.notes}};
}

json branch_set_json(const BranchPointSet& s) {
  json t = json::array();
  for (double v : s.t) t.push_back(num(v));
  return json{{"t", t}, {"degree", s.degree}, {"ordered", s.ordered}};
}

json fit_json(const TailFit& f) {
  return json{{"theta_hat", num(f.theta_hat)},   {"alpha_hat", num(f.alpha_hat)},
              {"c_hat", num(f.c_hat)},           {"r_squared", num(f.r_squared)},
              {"residual_rms", num(f.residual_rms)},
              {"theta_spread", num(f.theta_spread)},
              {"alpha_spread", num(f.alpha_spread)},
              {"window", {f.n0, f.n1}},          {"offset", f.offset}};
}

// c with the power pinned to its predicted value, averaged over the window.
double constant_at_power(std::span<const double> seq, const TailFit& f, double power) {
  double s = 0.0;
  int k = 0;
  for (int n = f.n0; n <= f.n1; ++n) {
    s += std::log(seq[n - 1]) - power * std::log(static_cast<double>(n)) -
         (n - f.offset) * std::log(f.theta_hat);
    ++k;
  }
  return std::exp(s / k);
}

struct Comparison {
  json block;
  bool agrees = true;
};

Comparison compare(const TailForm& t, const TailFit& f, double c_fixed, double alpha_tol,
                   const VerifyTolerances& tol) {
  Comparison c;
  const double dtheta = std::abs(f.theta_hat - t.rate);
  const double dalpha = std::abs(f.alpha_hat - t.power);
  const bool th_ok = dtheta <= tol.theta_abs;
  const bool al_ok = dalpha <= alpha_tol;
  c.block["theta"] = {{"predicted", num(t.rate)}, {"fitted", num(f.theta_hat)},
                      {"abs_diff", num(dtheta)}, {"tolerance", tol.theta_abs}, {"ok", th_ok}};
  c.block["alpha"] = {{"predicted", num(t.power)}, {"fitted", num(f.alpha_hat)},
                      {"abs_diff", num(dalpha)}, {"tolerance", alpha_tol}, {"ok", al_ok}};
  c.agrees = th_ok && al_ok;
  if (std::isfinite(t.constant)) {
    const double rel = std::abs(c_fixed - t.constant) / std::abs(t.constant);
    const bool ok = rel <= tol.c_rel;
    c.block["constant"] = {{"predicted", num(t.constant)},
                           {"fitted_at_predicted_power", num(c_fixed)},
                           {"fitted_free", num(f.c_hat)},
                           {"rel_diff", num(rel)},
                           {"tolerance", tol.c_rel},
                           {"ok", ok}};
    c.agrees = c.agrees && ok;
  } else {
    c.block["constant"] = {{"predicted", nullptr}, {"fitted_free", num(f.c_hat)}, {"ok", nullptr}};
  }
  c.block["agrees"] = c.agrees;
  return c;
}

json tolerances_json(const RunOptions& o) {
  return json{{"eps_eq", o.eps_eq},
              {"truncation", o.truncation},
              {"consistency", kConsistencyTol},
              {"on_cut", kOnCutTol},
              {"root_separation", kRootSeparationTol},
              {"fit_window", {kFitWindowLo, kFitWindowHi}},
              {"verify",
               {{"theta_abs", o.tol.theta_abs},
                {"alpha_abs", o.tol.alpha_abs},
                {"alpha_abs_case3", o.tol.alpha_abs_case3},
                {"c_rel", o.tol.c_rel}}}};
}

RunResult run_walk(const WalkSpec& spec, const RunOptions& opts) {
  RunResult out;
  json& r = out.report;
  AnalysisOptions ao;
  ao.eps_eq = opts.eps_eq;
  ao.resultant_check = opts.resultant_check;
  ao.assume_stable = opts.assume_stable;
  const WalkAnalysis wa = analyze_walk(spec, ao);
  std::vector<std::string> warnings = wa.warnings;

  r["classification"] = {{"quadratic", wa.cls.quadratic},
                         {"nonsingular", wa.cls.nonsingular},
                         {"possibly_reducible", wa.cls.possibly_reducible},
                         {"genus", wa.cls.genus},
                         {"x_shaped", wa.cls.x_shaped},
                         {"notes", wa.cls.notes}};
  r["drift"] = {{"mx", wa.drift.mx}, {"my", wa.drift.my}};
  r["stability"] = stability_json(wa.stability);
  r["branch_points"] = {{"x", branch_set_json(wa.bp.x)}, {"y", branch_set_json(wa.bp.y)}};
  json cand = {{"x3", num(wa.pc.x3)},
               {"x_star", num(wa.pc.x_star)},
               {"x_star_at_branch_point", wa.pc.x_star_at_branch_point},
               {"y_tilde", wa.pc.y_tilde ? num(*wa.pc.y_tilde) : json(nullptr)},
               {"x_tilde_raw", num(wa.pc.x_tilde_raw)},
               {"x_tilde1", num(wa.pc.x_tilde1)},
               {"consistency_gap", num(wa.pc.consistency_gap)},
               {"x_tilde_note", wa.pc.x_tilde_note}};
  if (opts.resultant_check) cand["resultant_roots"] = wa.resultant_roots;
  r["pole_candidates"] = cand;
  r["case"] = case_json(wa.label);

  // The oracle is needed for the constant of every walk except the two
  // closed-form two-demand cases, and for verification.
  double lam = 0, mu1 = 0, mu2 = 0;
  const bool td = as_two_demand(spec, lam, mu1, mu2);
  const bool closed = td && (wa.label.case_id == 1 || wa.label.case_id == 2);
  const bool need_oracle = !closed || opts.verify || opts.keep_sequence;

  std::optional<TruncatedSolution> ts;
  json oracle_block = nullptr;
  if (need_oracle) {
    SolveOptions so;
    so.allow_truncation_suspect = true;
    try {
      ts = solve_truncated(spec, opts.truncation, so);
      oracle_block = {{"N", ts->N},
                      {"method", ts->method},
                      {"residual", ts->residual},
                      {"mass_at_edge", ts->mass_at_edge}};
      if (ts->mass_at_edge > so.edge_mass_limit) {
        warnings.push_back("oracle mass at the truncation edge exceeds 1e-8; raise --truncation");
      }
    } catch (const Error& e) {
      if (opts.verify) throw;
      warnings.push_back(std::string("oracle failed: ") + e.what());
    }
  }

  TailForm tail = tail_shape(wa.label.case_id, wa.label.x_dom);
  tail.note = "constant not estimated";
  if (td) {
    try {
      tail = constants_2demand({lam, mu1, mu2}, wa, ts ? &*ts : nullptr);
    } catch (const Error& e) {
      warnings.push_back(std::string("closed-form constant unavailable: ") + e.what());
    }
  } else if (ts) {
    try {
      tail = numeric_tail(wa, *ts);
    } catch (const Error& e) {
      warnings.push_back(std::string("numeric constant unavailable: ") + e.what());
      tail = tail_shape(wa.label.case_id, wa.label.x_dom);
      tail.note = std::string("constant unavailable: ") + e.what();
    }
  }
  r["tail"] = tail_json(tail);
  r["tail"]["applies_to"] = "pi_{n,0}";
  out.tail = tail;

  if (ts) {
    std::vector<double> seq = boundary_sequence(*ts);
    oracle_block["n_eff"] = effective_truncation(*ts);
    if (opts.verify) {
      const auto [n0, n1] = default_window(*ts);
      const TailFit f = fit_tail(seq, n0, n1, tail.offset);
      const double cf = constant_at_power(seq, f, tail.power);
      const double atol = wa.label.case_id == 3 ? opts.tol.alpha_abs_case3 : opts.tol.alpha_abs;
      Comparison cmp = compare(tail, f, cf, atol, opts.tol);
      oracle_block["fit"] = fit_json(f);
      oracle_block["comparison"] = cmp.block;
      out.oracle_disagrees = !cmp.agrees;
    }
    if (opts.keep_sequence) out.sequence = std::move(seq);
  }
  r["oracle"] = oracle_block;
  r["warnings"] = warnings;
  return out;
}

RunResult run_srbm(const SrbmSpec& spec, const RunOptions& opts) {
  RunResult out;
  json& r = out.report;
  const SrbmAnalysis a = analyze_srbm(spec, opts.eps_eq);
  const auto& s = a.sing;
  r["stability"] = stability_json(a.stability);
  r["branch_points"] = {{"x", {num(s.bp.x1), num(s.bp.x2)}}, {"y", {num(s.bp.y1), num(s.bp.y2)}}};
  r["pole_candidates"] = {{"x_star", num(s.x_star)},
                          {"y_tilde", s.y_tilde ? num(*s.y_tilde) : json(nullptr)},
                          {"x_tilde_raw", num(s.x_tilde_raw)},
                          {"x_tilde", num(s.x_tilde)},
                          {"consistency_gap", num(s.consistency_gap)},
                          {"x_tilde_note", s.x_tilde_note}};
  r["case"] = case_json(s.label);
  r["tail"] = tail_json(a.v2_tail);
  r["tail"]["applies_to"] = "V2(x, inf)";
  r["independent_components"] = a.independent_components;
  r["oracle"] = nullptr;
  std::vector<std::string> w = a.warnings;
  if (opts.verify) w.push_back("no oracle for this family; verification skipped");
  r["warnings"] = w;
  return out;
}

RunResult run_fluid(const FluidSpec& spec, const RunOptions& opts) {
  RunResult out;
  json& r = out.report;
  const FluidAnalysis a = analyze_fluid(spec, opts.eps_eq);
  r["stability"] = stability_json(a.stability);
  r["branch_points"] = {{"alpha1", num(a.bp.alpha1)}, {"alpha2", num(a.bp.alpha2)}};
  r["pole_candidates"] = {{"alpha_star", num(a.star.alpha_star)},
                          {"multiplicity", a.star.multiplicity},
                          {"at_branch_point", a.star.at_branch_point}};
  r["case"] = case_json(a.label);
  r["z_dom"] = a.z_dom;
  r["assumption_ii"] = a.assumption_ii;
  r["tail"] = tail_json(a.marginal);
  r["tail"]["applies_to"] = "1 - Pi(x)";
  r["density_tail"] = tail_json(a.density);
  r["density_tail"]["applies_to"] = "pi_{c-1}(x)";
  r["boundary_tail"] = tail_json(a.boundary);
  r["boundary_tail"]["applies_to"] = "Pi_i(0)";
  r["oracle"] = nullptr;
  std::vector<std::string> w = a.warnings;
  if (opts.verify) w.push_back("no oracle for this family; verification skipped");
  r["warnings"] = w;
  return out;
}

void text_lines(std::ostringstream& os, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      text_lines(os, v, prefix.empty() ? k : prefix + "." + k);
    }
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_string())) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      text_lines(os, j[i], prefix + "[" + std::to_string(i) + "]");
    }
  } else if (j.is_string()) {
    os << prefix << ": " << j.get<std::string>() << '\n';
  } else {
    os << prefix << ": " << j.dump() << '\n';
  }
}

}  // namespace

RunResult run_analysis(const ModelSpec& model, const RunOptions& opts) {
  RunResult out = std::visit(
      [&](const auto& m) -> RunResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WalkSpec>) return run_walk(m, opts);
        if constexpr (std::is_same_v<T, SrbmSpec>) return run_srbm(m, opts);
        if constexpr (std::is_same_v<T, FluidSpec>) return run_fluid(m, opts);
      },
      model);
  out.report["family"] = family_name(model);
  out.report["inputs"] = to_json(model);
  out.report["tolerances"] = tolerances_json(opts);
  return out;
}

json kernel_dump(const ModelSpec& model) {
  json j = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WalkSpec>) {
          const KernelSystem ks = build_kernel(m);
          return dump_kernel(ks, branch_points(ks));
        } else if constexpr (std::is_same_v<T, SrbmSpec>) {
          const SrbmKernel k = build_srbm_kernel(validate_srbm(m));
          json o{{"a", k.in_y.a.to_string()},  {"b", k.in_y.b.to_string()},
                 {"c", k.in_y.c.to_string()},  {"a_tilde", k.in_x.a.to_string()},
                 {"b_tilde", k.in_x.b.to_string()}, {"c_tilde", k.in_x.c.to_string()},
                 {"D1", k.d1.to_string()},     {"D2", k.d2.to_string()}};
          const SrbmBranchPoints bp = srbm_branch_points(k);
          o["branch_points"] = {{"x", {bp.x1, bp.x2}}, {"y", {bp.y1, bp.y2}}};
          return o;
        } else {
          const FluidKernel k = build_fluid_kernel(validate_fluid(m));
          const FluidBranchPoints bp = fluid_branch_points(k);
          std::ostringstream h;
          h.precision(17);
          h << -k.lambda << " z^2 + (" << -k.r << " alpha + " << k.lambda + k.c * k.mu
            << ") z + " << -k.c * k.mu;
          return json{{"H", h.str()}, {"branch_points", {{"alpha1", bp.alpha1}, {"alpha2", bp.alpha2}}}};
        }
      },
      model);
  j["family"] = family_name(model);
  return j;
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

std::string render_text(const json& report) {
  std::ostringstream os;
  text_lines(os, report, "");
  return os.str();
}

std::string plot_csv(const std::vector<double>& sequence, const TailForm& tail) {
  if (sequence.empty()) throw Error(ErrorCode::kNoOracle, "no oracle sequence for plot data");
  std::ostringstream os;
  os.precision(17);
  os << "n,pi_n0,predicted,ratio\n";
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double p = tail.predict(n);
    os << k + 1 << ',' << sequence[k] << ',';
    if (std::isfinite(p)) os << p; else os << "nan";
    os << ',';
    if (std::isfinite(p) && p != 0.0) os << sequence[k] / p; else os << "nan";
    os << '\n';
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path);
  }
}

}  // namespace kmt
