#include "cinfty/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "cinfty/groupoid.hpp"
#include "cinfty/scheme_file.hpp"

namespace cinfty::cli {

namespace {

LoadedScheme load(const CommonArgs& args) {
  LoadedScheme s = load_scheme(args.scheme);
  if (args.tol) {
    auto scheme = std::make_shared<SchemePresentation>(s.scheme->with_tolerance(*args.tol));
    s.field = LiftedField(scheme, s.field.coeffs());
    s.scheme = scheme;
  }
  if (args.horizon) s.integrator.horizon = *args.horizon;
  s.integrator.validate();
  if (args.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  return s;
}

// Runs `body` and maps library exceptions onto exit code 1.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SchemeFileError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

// Sends the payload to --out when given, else to `out`.
bool emit(const CommonArgs& args, std::ostream& out, std::ostream& err,
          const std::function<void(std::ostream&)>& write) {
  if (!args.out) {
    write(out);
    return true;
  }
  std::ofstream file(*args.out, std::ios::binary);
  if (!file) {
    err << "error: cannot write '" << *args.out << "'\n";
    return false;
  }
  write(file);
  return static_cast<bool>(file);
}

Eigen::VectorXd parse_point(const std::string& text, int n) {
  std::vector<double> xs;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("malformed point '" + text + "'");
    xs.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(xs.size()) != n)
    throw std::invalid_argument("point '" + text + "' has " + std::to_string(xs.size()) + " coordinates, expected " +
                                std::to_string(n));
  return Eigen::Map<Eigen::VectorXd>(xs.data(), n);
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + short_number(v[i]);
  return s;
}

std::string interval_text(const KInterval& k) {
  auto end = [](double v, EndKind e) {
    return format_double(v) + (e == EndKind::Horizon ? " (horizon)" : e == EndKind::Open ? " (open)" : "");
  };
  return std::string(k.lower_closed() ? "[" : "(") + end(k.lower, k.lower_end) + ", " + end(k.upper, k.upper_end) +
         (k.upper_closed() ? "]" : ")");
}

} // namespace

int cmd_check(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedScheme s = load(args);
    const PreservationReport report = preserves_ideal(s.field, s.sample_spec());
    const VarList& vars = s.scheme->vars();
    bool ok = emit(args, out, err, [&](std::ostream& o) {
      for (const auto& g : report.generators) {
        const auto image = as_polynomial(g.image, vars.size());
        o << "generator " << print(g.generator, vars) << ": V(g) = " << (image ? image->to_string(vars) : print(g.image, vars))
          << ", ";
        switch (g.status) {
        case GeneratorStatus::CertifiedZero:
          o << "normal form 0";
          break;
        case GeneratorStatus::NotCertified:
          o << "residual " << g.residual->to_string(vars);
          break;
        case GeneratorStatus::NumericOnly:
          o << "max |V(g)| on " << g.samples << " Z samples " << format_double(g.max_sampled);
          break;
        }
        o << " [" << to_string(g.status) << "]\n";
      }
      if (!report.region_note.empty()) o << "note: " << report.region_note << '\n';
      o << "verdict: " << (report.certified ? "certified" : "not-certified") << '\n';
    });
    if (!ok) return 1;
    return report.certified ? 0 : 2;
  });
}

int cmd_curve(const CommonArgs& args, const std::string& point, int samples, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LoadedScheme s = load(args);
    const Eigen::VectorXd p = parse_point(point, s.scheme->dim());
    if (!in_zero_set(*s.scheme, p)) {
      err << "point (" << join(p) << ") is not on the zero set (residual "
          << format_double(s.scheme->residual(p)) << ")\n";
      return 2;
    }
    const IntegralCurve c = integrate_max_curve(s.field, p, s.integrator);
    if (!emit(args, out, err, [&](std::ostream& o) { write_curve_csv(o, c, *s.scheme, samples); })) return 1;
    std::ostream& summary = args.out ? out : err;
    summary << "class: " << to_string(c.classification()) << "\nK_p: " << interval_text(c.interval()) << '\n';
    const auto& d = c.diagnostics();
    if (d.forward_reentries || d.backward_reentries)
      summary << "re-entries after leaving Z: forward " << d.forward_reentries << ", backward "
              << d.backward_reentries << '\n';
    return 0;
  });
}

int cmd_domain(const CommonArgs& args, int grid, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LoadedScheme s = load(args);
    const auto pts = sample_zero_set(*s.scheme, s.box, grid > 0 ? grid : s.grid);
    const FlowDomain w = flow_domain(s.field, pts, s.integrator, args.jobs);
    if (!emit(args, out, err, [&](std::ostream& o) { write_domain_csv(o, w); })) return 1;
    if (args.out) out << w.rows().size() << " points, " << (w.horizon_complete() ? "horizon-complete" : "not horizon-complete") << '\n';
    return 0;
  });
}

int cmd_flow(const CommonArgs& args, const std::string& point, double time, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LoadedScheme s = load(args);
    const Eigen::VectorXd p = parse_point(point, s.scheme->dim());
    if (!in_zero_set(*s.scheme, p)) {
      err << "point (" << join(p) << ") is not on the zero set\n";
      return 2;
    }
    Eigen::VectorXd y;
    try {
      y = flow_eval(s.field, p, time, s.integrator);
    } catch (const OutsideInterval& e) {
      err << e.what() << '\n';
      return 2;
    }
    return emit(args, out, err, [&](std::ostream& o) { o << join(y) << '\n'; }) ? 0 : 1;
  });
}

int cmd_groupoid(const CommonArgs& args, int samples, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LoadedScheme s = load(args);
    const auto pts = sample_zero_set(*s.scheme, s.box, s.grid);
    if (pts.empty()) {
      err << "error: no points of the zero set found in the sampling box\n";
      return 1;
    }
    const FlowDomain w = flow_domain(s.field, pts, s.integrator, args.jobs);
    try {
      require_complete(w);
    } catch (const NotComplete& e) {
      err << "refused: " << e.what() << '\n';
      return 3;
    }
    const double max_time = std::min(5.0, s.integrator.horizon / 4);
    const auto arrows = sample_arrows(pts, samples, args.seed, max_time);

    const GroupoidReport numeric = check_axioms(FlowGroupoid::numeric(s.field, s.integrator), arrows, 1e-6);
    std::optional<ClosedFormCheck> validation;
    std::optional<GroupoidReport> closed;
    std::optional<InclusionReport> inclusions;
    if (s.flow_closed_form) {
      flow_ideal(s.scheme, s.flow_closed_form, s.sample_spec());
      validation = validate_closed_form(s.field, *s.flow_closed_form, pts, {-2, -1, -0.5, 0.5, 1, 2}, s.integrator);
      closed = check_axioms(FlowGroupoid::closed_form(*s.flow_closed_form), arrows, 1e-12);
      inclusions = check_ideal_inclusions(*s.scheme, *s.flow_closed_form, arrows, 1e-9);
    }
    const bool pass = numeric.pass && (!validation || validation->passed) && (!closed || closed->pass) &&
                      (!inclusions || inclusions->pass);
    const bool ok = emit(args, out, err, [&](std::ostream& o) {
      o << "# numeric flow\n";
      write_groupoid_report(o, numeric);
      if (validation) {
        o << "# closed-form flow validation\nmax_deviation," << format_double(validation->max_deviation)
          << "\nsamples," << validation->samples << "\nverdict," << (validation->passed ? "pass" : "fail") << '\n';
        o << "# closed-form flow\n";
        write_groupoid_report(o, *closed);
        o << "# pullback identities along m\npr," << format_double(inclusions->pr_residual) << "\npsi,"
          << format_double(inclusions->psi_residual) << "\npairs," << inclusions->pairs << "\ntolerance,"
          << format_double(inclusions->tolerance) << "\nverdict," << (inclusions->pass ? "pass" : "fail") << '\n';
      }
      o << "# overall\nverdict," << (pass ? "pass" : "fail") << '\n';
    });
    if (!ok) return 1;
    return pass ? 0 : 2;
  });
}

int cmd_validate(const CommonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const LoadedScheme s = load(args);
    const auto& vars = s.scheme->vars();
    bool pass = true;
    std::ostringstream o;
    o << "variables: " << vars.size() << "\nideal generators: " << s.scheme->ideal().size()
      << "\nregion constraints: " << s.scheme->region().size() << "\npolynomial ideal: "
      << (s.scheme->polynomial_ideal() ? "yes" : "no") << "\ngerm_determined (declared): "
      << (s.scheme->germ_determined() ? "true" : "false") << '\n';
    o << "derivation:";
    for (int i = 0; i < vars.size(); ++i)
      o << ' ' << vars.name(i) << " -> " << print(s.field.coeffs()[static_cast<std::size_t>(i)], vars) << ';';
    o << '\n';
    const auto pts = sample_zero_set(*s.scheme, s.box, s.grid);
    o << "zero-set samples: " << pts.size() << '\n';
    if (s.flow_closed_form) {
      try {
        const FlowIdealPresentation fi = flow_ideal(s.scheme, s.flow_closed_form, s.sample_spec());
        const VarList& xt = fi.vars();
        o << "flow ideal generators:";
        for (const auto& g : fi.generators()) o << ' ' << print(g, xt) << ';';
        o << "\nclosed form at t = 0: identity\n";
        const auto check =
            validate_closed_form(s.field, *s.flow_closed_form, pts, {-2, -1, -0.5, 0.5, 1, 2}, s.integrator);
        o << "closed form vs numeric flow: max deviation " << format_double(check.max_deviation) << " over "
          << check.samples << " samples [" << (check.passed ? "pass" : "fail") << "]\n";
        pass = check.passed;
      } catch (const std::invalid_argument& e) {
        o << "closed form rejected: " << e.what() << '\n';
        pass = false;
      }
    } else {
      o << "flow_closed_form: absent\n";
    }
    o << "verdict: " << (pass ? "valid" : "invalid") << '\n';
    if (!emit(args, out, err, [&](std::ostream& dst) { dst << o.str(); })) return 1;
    return pass ? 0 : 2;
  });
}

} // namespace cinfty::cli
