// Command-line surface over the library: every subcommand prints one JSON
// document (or CSV for scans) to stdout. Exit codes: 0 success, 2 invalid
// input, 1 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "aklt/bilayer.hpp"
#include "aklt/cell.hpp"
#include "aklt/oracle.hpp"
#include "aklt/pauli.hpp"
#include "aklt/rational.hpp"
#include "aklt/site_transfer.hpp"
#include "aklt/transfer_function.hpp"
#include "aklt/tree.hpp"

using json = nlohmann::json;
using namespace aklt;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json poly_json(const RatPoly& p) {
  json arr = json::array();
  for (long i = 0; i <= p.degree(); ++i) arr.push_back(rat_to_string(p.coeff(i)));
  return arr;
}

CellGraph builtin_cell(const std::string& name) {
  if (name == "single_edge") return CellGraph::single_edge();
  if (name == "square") return CellGraph::square();
  if (name == "fig4") return CellGraph::fig4();
  if (name.rfind("star", 0) == 0) {
    int d = std::stoi(name.substr(4));
    return CellGraph::star(d);
  }
  throw std::invalid_argument("unknown builtin cell: " + name);
}

CellGraph load_cell(const std::string& file, const std::string& builtin) {
  if (file.empty() == builtin.empty())
    throw std::invalid_argument("give exactly one of --file / --builtin");
  return file.empty() ? builtin_cell(builtin) : CellGraph::from_json(read_file(file));
}

DegreeSequence load_seq(const std::string& file) {
  return DegreeSequence::parse(read_file(file));
}

void emit(const json& j, const std::string& format) {
  if (format == "csv")
    throw std::invalid_argument("csv output is only available for simulate scan");
  if (format == "text")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << j.dump() << "\n";
}

TreeFamily family_from_flags(const std::string& family, int d, int g,
                             const std::string& seq_file) {
  if (family == "cayley") return TreeFamily::cayley(d);
  if (family == "decorated") return TreeFamily::decorated(d, g);
  if (family == "layered") {
    if (seq_file.empty())
      throw std::invalid_argument("layered family needs --seq-file");
    return TreeFamily::layered(load_seq(seq_file));
  }
  throw std::invalid_argument("unknown family: " + family);
}

int run(int argc, char** argv) {
  CLI::App app{"transfer-operator toolkit for valence-bond states on trees"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  // site
  auto* site = app.add_subcommand("site", "single-site transfer coefficients")->fallthrough();
  int site_d = 3;
  std::string site_word;
  bool site_disc = false;
  site->add_option("--d", site_d, "site degree")->required()->check(CLI::Range(2, 16));
  site->add_option("--word", site_word, "input Pauli word, one digit 0-3 per slot");
  site->add_flag("--discrepancy", site_disc, "max |closed form - dense| over all words");

  // fn
  auto* fn = app.add_subcommand("fn", "scalar transfer function F_d")->fallthrough();
  int fn_d = 0;
  double fn_t = 0, fn_t0 = 0.5, fn_band = 1e-3;
  int fn_n = 10;
  bool fn_fixed = false, fn_classify = false, fn_compose = false;
  std::string fn_file;
  fn->add_option("--d", fn_d, "site degree")->check(CLI::Range(2, 256));
  fn->add_flag("--fixed-point", fn_fixed, "smallest positive solution of F_d(t) = -t");
  fn->add_option("--eval", fn_t, "evaluate F_d at t");
  fn->add_option("--file", fn_file, "degree sequence file");
  fn->add_flag("--compose", fn_compose, "compose the sequence from --file");
  fn->add_flag("--classify", fn_classify, "growth classification of --file");
  fn->add_option("--t0", fn_t0, "starting value for --compose");
  fn->add_option("--n", fn_n, "composition length for --compose");
  fn->add_option("--band", fn_band, "inconclusive band for --classify");

  // cell
  auto* cell = app.add_subcommand("cell", "loop-diagram transfer of a cell")->fallthrough();
  std::string cell_file, cell_builtin, cell_conv = "oracle";
  bool cell_poly = false, cell_crit = false, cell_dump = false, cell_diag = false;
  cell->add_option("--file", cell_file, "cell JSON file");
  cell->add_option("--builtin", cell_builtin, "single_edge, starD, square, fig4");
  cell->add_flag("--polynomials", cell_poly, "numerator and denominator coefficients");
  cell->add_option("--convention", cell_conv, "oracle or paper")
      ->check(CLI::IsMember({"oracle", "paper"}));
  cell->add_flag("--criterion", cell_crit, "slope at 0 and two-cycle breaking flag");
  cell->add_flag("--diagrams", cell_diag, "diagram counts by pendant number");
  cell->add_flag("--dump", cell_dump, "emit the cell as JSON");

  // decorated
  auto* dec = app.add_subcommand("decorated", "decorated star thresholds")->fallthrough();
  int dec_d = 5, dec_g = 1;
  bool dec_poly = false;
  dec->add_option("--d", dec_d, "base degree")->required()->check(CLI::Range(3, 64));
  dec->add_option("--g", dec_g, "decorations per edge")->required()->check(CLI::Range(0, 8));
  dec->add_flag("--polynomials", dec_poly, "decorated star transfer polynomials");

  // treecell
  auto* tc = app.add_subcommand("treecell", "tree built from a cell, swept and iterated")->fallthrough();
  std::string tc_file, tc_builtin;
  int tc_gen = 2;
  double tc_t = 0.5;
  tc->add_option("--file", tc_file, "cell JSON file");
  tc->add_option("--builtin", tc_builtin, "single_edge, starD, square, fig4");
  tc->add_option("--generations", tc_gen, "cell layers")->check(CLI::Range(1, 16));
  tc->add_option("--t", tc_t, "uniform boundary field");

  // bilayer
  auto* bi = app.add_subcommand("bilayer", "doubled-layer node map")->fallthrough();
  bi->require_subcommand(1);
  auto* bi_sys = bi->add_subcommand("system", "symmetric-subspace polynomials")->fallthrough();
  int bsys_g = 1;
  bi_sys->add_option("--g", bsys_g, "child pairs per node")->required()->check(CLI::Range(1, 4));
  auto* bi_solve = bi->add_subcommand("solve", "multi-start fixed-point search")->fallthrough();
  int bs_g = 1, bs_starts = 120, bs_cycle = 2;
  unsigned bs_seed = 1234;
  bool bs_serial = false, bs_full = false;
  bi_solve->add_option("--g", bs_g, "child pairs per node")->required()->check(CLI::Range(1, 4));
  bi_solve->add_option("--cycle", bs_cycle, "1 fixed points, 2 two-cycles")
      ->check(CLI::IsMember({1, 2}));
  bi_solve->add_option("--starts", bs_starts, "Newton starts")->check(CLI::Range(1, 100000));
  bi_solve->add_option("--seed", bs_seed, "start-point seed");
  bi_solve->add_flag("--serial", bs_serial, "disable parallel starts");
  bi_solve->add_flag("--full", bs_full, "search all 15 coefficients, not just symmetric");

  // simulate
  auto* sim = app.add_subcommand("simulate", "finite-tree contraction")->fallthrough();
  sim->require_subcommand(1);
  auto* sc = sim->add_subcommand("contract", "single tree, single boundary")->fallthrough();
  std::string sc_family = "cayley", sc_seq;
  int sc_d = 5, sc_g = 0, sc_depth = 2, sc_axis = 3;
  double sc_t = 0.5;
  bool sc_stagger = false, sc_dense = false, sc_serial = false;
  std::optional<unsigned> sc_rand;
  sc->add_option("--family", sc_family, "cayley, decorated or layered");
  sc->add_option("--d", sc_d, "site degree");
  sc->add_option("--g", sc_g, "decorations per edge");
  sc->add_option("--seq-file", sc_seq, "degree sequence file for layered");
  sc->add_option("--depth", sc_depth, "tree depth")->check(CLI::Range(0, 64));
  sc->add_option("--t", sc_t, "uniform boundary field along --axis");
  sc->add_option("--axis", sc_axis, "boundary and readout axis")->check(CLI::Range(1, 3));
  sc->add_flag("--staggered", sc_stagger, "alternate the boundary sign with depth");
  sc->add_option("--random-seed", sc_rand, "random PSD boundary instead of uniform");
  sc->add_flag("--dense", sc_dense, "also contract the dense state vector");
  sc->add_flag("--serial", sc_serial, "disable the parallel sweep");
  auto* ss = sim->add_subcommand("scan", "order-parameter scan over t and depth")->fallthrough();
  std::string ss_family = "cayley", ss_seq;
  int ss_d = 5, ss_g = 0, ss_axis = 3, ss_tsteps = 5, ss_dmin = 1, ss_dmax = 4;
  double ss_tmin = 0, ss_tmax = 0.9;
  ss->add_option("--family", ss_family, "cayley, decorated or layered");
  ss->add_option("--d", ss_d, "site degree");
  ss->add_option("--g", ss_g, "decorations per edge");
  ss->add_option("--seq-file", ss_seq, "degree sequence file for layered");
  ss->add_option("--tmin", ss_tmin, "first field value");
  ss->add_option("--tmax", ss_tmax, "last field value");
  ss->add_option("--tsteps", ss_tsteps, "number of field values")->check(CLI::Range(1, 10000));
  ss->add_option("--dmin", ss_dmin, "first depth")->check(CLI::Range(0, 64));
  ss->add_option("--dmax", ss_dmax, "last depth")->check(CLI::Range(0, 64));
  ss->add_option("--axis", ss_axis, "boundary and readout axis")->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  }

  if (site->parsed()) {
    json out{{"d", site_d}};
    if (site_disc) {
      out["max_discrepancy"] = max_backend_discrepancy(site_d, true);
    } else if (!site_word.empty()) {
      if (static_cast<int>(site_word.size()) != site_d - 1)
        throw std::invalid_argument("word length must be d-1");
      PauliWord w;
      for (int i = 0; i < site_d - 1; ++i) {
        if (site_word[i] < '0' || site_word[i] > '3')
          throw std::invalid_argument("word letters must be 0..3");
        w.push_back(site_word[i] - '0');
      }
      auto four = dense_word_transfer(site_d, w);
      json coeffs = json::array();
      for (const Rat& r : four) coeffs.push_back(rat_to_string(r));
      out["word"] = site_word;
      out["coefficients"] = coeffs;
      auto k = w.axis_counts();
      auto cf = closed_form_coefficient(site_d, k[0], k[1], k[2]);
      if (cf)
        out["closed_form"] = {{"output_letter", cf->output_letter},
                              {"value", rat_to_string(cf->value)}};
      else
        out["closed_form"] = nullptr;
    } else {
      throw std::invalid_argument("site needs --word or --discrepancy");
    }
    emit(out, format);
    return 0;
  }

  if (fn->parsed()) {
    const bool has_eval = fn->count("--eval") > 0;
    if (fn_fixed + fn_compose + fn_classify + has_eval != 1)
      throw std::invalid_argument(
          "fn needs exactly one of --eval, --fixed-point, --compose, --classify");
    json out;
    if (fn_fixed) {
      if (fn_d < 2) throw std::invalid_argument("fn --fixed-point needs --d");
      FixedPointResult r = fixed_point(fn_d);
      out["d"] = fn_d;
      if (r.t_star) {
        out["t_star"] = *r.t_star;
        out["residual"] = r.residual;
      } else {
        out["t_star"] = nullptr;
      }
    } else if (has_eval) {
      if (fn_d < 2) throw std::invalid_argument("fn --eval needs --d");
      out = {{"d", fn_d}, {"t", fn_t}, {"value", eval_F(fn_d, fn_t)}};
    } else if (fn_compose) {
      if (fn_file.empty()) throw std::invalid_argument("fn --compose needs --file");
      ComposeTrace tr = compose_sequence(load_seq(fn_file), fn_t0, fn_n);
      out = {{"t0", fn_t0},
             {"n", fn_n},
             {"iterates", tr.iterates},
             {"final", tr.final_value()},
             {"lower_bound", tr.lower_bound}};
    } else {
      if (fn_file.empty()) throw std::invalid_argument("fn --classify needs --file");
      GrowthStats st = classify_growth(load_seq(fn_file), fn_band);
      const char* names[] = {"ordered", "unique", "inconclusive"};
      out = {{"classification", names[static_cast<int>(st.classification)]},
             {"mu", st.mu},
             {"ln_mu", st.ln_mu}};
    }
    emit(out, format);
    return 0;
  }

  if (cell->parsed()) {
    CellGraph c = load_cell(cell_file, cell_builtin);
    if (cell_poly + cell_crit + cell_dump + cell_diag != 1)
      throw std::invalid_argument(
          "cell needs exactly one of --polynomials, --criterion, --diagrams, --dump");
    if (cell_dump) {
      std::cout << c.to_json() << "\n";
      return 0;
    }
    json out;
    if (cell_poly) {
      CellConvention conv =
          cell_conv == "paper" ? CellConvention::paper : CellConvention::oracle;
      TransferPoly tp = transfer_polynomials(c, conv);
      out = {{"convention", cell_conv}, {"p", poly_json(tp.p)}, {"q", poly_json(tp.q)}};
    } else if (cell_crit) {
      BreakingCriterion bc = breaking_criterion(c);
      out["slope"] = rat_to_string(bc.slope);
      out["breaks"] = bc.breaks;
      if (bc.t_cell)
        out["t_cell"] = *bc.t_cell;
      else
        out["t_cell"] = nullptr;
    } else {
      DiagramClasses dc = enumerate_diagrams(c, true);
      json counts = json::array();
      for (const auto& v : dc.by_k) counts.push_back(v.size());
      out = {{"counts_by_pendants", counts}, {"total", dc.total()}};
    }
    emit(out, format);
    return 0;
  }

  if (dec->parsed()) {
    json out{{"d", dec_d}, {"g", dec_g}};
    long threshold = 1;
    for (int i = 0; i <= dec_g; ++i) threshold *= 3;
    out["threshold"] = threshold + 1;
    Phase ph = decorated_threshold(dec_d, dec_g);
    out["phase"] = ph == Phase::ordered ? "ordered"
                   : ph == Phase::unique ? "unique"
                                         : "boundary";
    if (dec_poly) {
      TransferPoly tp = transfer_polynomials(CellGraph::decorated_star(dec_d, dec_g),
                                             CellConvention::oracle);
      out["p"] = poly_json(tp.p);
      out["q"] = poly_json(tp.q);
    }
    emit(out, format);
    return 0;
  }

  if (tc->parsed()) {
    CellGraph c = load_cell(tc_file, tc_builtin);
    double est = 0, copies = 1;
    for (int i = 0; i < tc_gen; ++i) {
      est += copies * static_cast<double>(c.vertices.size());
      copies *= static_cast<double>(c.boundary.size());
      if (est > (1 << 22))
        throw std::invalid_argument("tree cell budget exceeded: too many generations");
    }
    FiniteTree tree = FiniteTree::from_cell(c, tc_gen);
    auto b = BoundaryAssignment::uniform(tree, {0, 0, tc_t});
    double sweep = contract_expectation(tree, b, pauli_at_root(3));
    TransferPoly tp = transfer_polynomials(c, CellConvention::oracle);
    double it = tc_t;
    for (int i = 0; i < tc_gen; ++i) it = tp.p.eval(it) / tp.q.eval(it);
    TreeCellCondition cond = tree_cell_condition(c);
    json out{{"generations", tc_gen},
             {"t", tc_t},
             {"nodes", tree.node_count()},
             {"sweep", sweep},
             {"cell_iterate", it},
             {"condition", {{"sum", rat_to_string(cond.sum)}, {"breaks", cond.breaks}}}};
    emit(out, format);
    return 0;
  }

  if (bi_sys->parsed()) {
    BilayerSystem sys = extract_system(bsys_g);
    json out{{"g", sys.g},
             {"f0", sys.f0.to_string()},
             {"f1", sys.f1.to_string()},
             {"f2", sys.f2.to_string()},
             {"f3", sys.f3.to_string()},
             {"reference_diff", sys.reference_diff}};
    emit(out, format);
    return 0;
  }

  if (bi_solve->parsed()) {
    CycleKind cy = bs_cycle == 1 ? CycleKind::period1 : CycleKind::period2;
    json out{{"g", bs_g}, {"cycle", bs_cycle}, {"starts", bs_starts}, {"seed", bs_seed}};
    if (bs_full) {
      auto roots = solve_full_space(bs_g, cy, bs_starts, bs_seed);
      json arr = json::array();
      for (const auto& r : roots) arr.push_back(r);
      out["roots"] = arr;
    } else {
      SolveReport rep = solve_fixed_points(bs_g, cy, bs_starts, bs_seed, !bs_serial);
      json sols = json::array();
      for (const BilayerSolution& s : rep.solutions)
        sols.push_back({{"x", s.x},
                        {"hits", s.hits},
                        {"poly_residual", s.poly_residual},
                        {"map_residual", s.map_residual},
                        {"min_eigenvalue", s.min_eigenvalue}});
      out["solutions"] = sols;
      out["diverged"] = rep.diverged;
    }
    emit(out, format);
    return 0;
  }

  if (sc->parsed()) {
    TreeFamily fam = family_from_flags(sc_family, sc_d, sc_g, sc_seq);
    FiniteTree tree = fam.instantiate(sc_depth);
    BlochVector y{sc_axis == 1 ? sc_t : 0, sc_axis == 2 ? sc_t : 0,
                  sc_axis == 3 ? sc_t : 0};
    BoundaryAssignment b =
        sc_rand      ? BoundaryAssignment::random_psd(tree, *sc_rand)
        : sc_stagger ? BoundaryAssignment::neel(tree, y)
                     : BoundaryAssignment::uniform(tree, y);
    json out{{"family", fam.label()},
             {"params", fam.params()},
             {"depth", sc_depth},
             {"nodes", tree.node_count()},
             {"axis", sc_axis},
             {"expectation",
              contract_expectation(tree, b, pauli_at_root(sc_axis), !sc_serial)}};
    if (sc_rand) {
      out["boundary"] = "random";
      out["seed"] = *sc_rand;
    } else {
      out["boundary"] = sc_stagger ? "staggered" : "uniform";
      out["t"] = sc_t;
      if (!sc_stagger) out["scalar_map_value"] = fam.scalar_map(sc_t, sc_depth);
    }
    if (sc_dense) out["dense_expectation"] = dense_expectation(tree, b, pauli_at_root(sc_axis));
    emit(out, format);
    return 0;
  }

  if (ss->parsed()) {
    TreeFamily fam = family_from_flags(ss_family, ss_d, ss_g, ss_seq);
    if (ss_dmax < ss_dmin) throw std::invalid_argument("--dmax must be >= --dmin");
    std::vector<double> ts;
    for (int i = 0; i < ss_tsteps; ++i)
      ts.push_back(ss_tsteps == 1
                       ? ss_tmin
                       : ss_tmin + (ss_tmax - ss_tmin) * i / (ss_tsteps - 1));
    std::vector<int> depths;
    for (int d = ss_dmin; d <= ss_dmax; ++d) depths.push_back(d);
    auto rows = order_parameter_scan(fam, ts, depths, ss_axis);
    if (format == "json") {
      json arr = json::array();
      for (const ScanRow& r : rows)
        arr.push_back({{"family", r.family},
                       {"params", r.params},
                       {"t", r.t},
                       {"depth", r.depth},
                       {"expectation", r.expectation},
                       {"scalar_map_value", r.scalar_map_value}});
      emit(arr, format);
    } else {
      std::cout << scan_to_csv(rows);
    }
    return 0;
  }

  throw std::invalid_argument("no subcommand");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}
