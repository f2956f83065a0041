// hop: command-line runner for the hopping-model studies.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "hop/hop.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const hop::Cell& c) {
  struct V {
    ordered_json operator()(std::monostate) const { return nullptr; }
    ordered_json operator()(bool b) const { return b; }
    ordered_json operator()(long long i) const { return i; }
    ordered_json operator()(double d) const {
      if (std::isfinite(d)) return d;
      return hop::format_double(d);
    }
    ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

void write_json(std::ostream& out, const hop::Table& t, const hop::StudySpec& s) {
  ordered_json j;
  j["toolkit"] = std::string("hop-toolkit ") + hop::toolkit_version;
  j["spec"] = hop::spec_hash(s);
  j["study"] = hop::to_string(s.study);
  j["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (auto& row : t.rows) {
    ordered_json r;
    for (std::size_t k = 0; k < row.size(); ++k) r[t.columns[k]] = to_json(row[k]);
    rows.push_back(r);
  }
  j["rows"] = rows;
  out << j.dump(2) << '\n';
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> ns;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw hop::PreconditionError("invalid n value '" + item + "'");
    }
    if (used != item.size()) throw hop::PreconditionError("invalid n value '" + item + "'");
    ns.push_back(v);
  }
  return ns;
}

double parse_a(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw hop::PreconditionError("invalid a value '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure hopping model toolkit: norms, Green functions, IDS, PF dimensions and Bose gas studies"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  std::string study = "table", model, n_list, a_text = "1", out, format = "csv";
  double beta = 1.0, bigD = 0.0, tol = 1e-12;
  std::optional<double> rho;
  int workers = 0;
  bool list_models = false;

  app.add_option("--study", study, "table|norms|green|ids-shift|dims|rho-c|schedule-convergence|density-limit|fixed-density");
  app.add_option("--model", model, "N, Z, Zd, N|Zd, Zd|Z or the long names (NComb(2), ZComb(1), ...)");
  app.add_option("--n", n_list, "comma separated list of volume indices");
  app.add_option("--beta", beta, "inverse temperature");
  app.add_option("--bigD", bigD, "condensate weight D");
  app.add_option("--rho", rho, "mean density");
  app.add_option("--a", a_text, "gap rate a (inf allowed)");
  app.add_option("--out", out, "output file (stdout when empty)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--workers", workers, "worker threads (0 = hardware)");
  app.add_flag("--list-models", list_models, "print the model catalog and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_models) {
    std::cout << "HalfLineN (N)\nLineZ (Z)\nLatticeZd(d) (Zd)\nNComb(d) (N|Zd)\nZComb(d) (Zd|Z)\n"
                 "SegmentN(n)\nTorusZd(d,n)\n";
    return 0;
  }

  try {
    hop::StudySpec spec;
    spec.study = hop::parse_study(study);
    if (!model.empty()) spec.model = hop::parse_model(model);
    spec.ns = parse_n_list(n_list);
    spec.beta = beta;
    spec.D = bigD;
    spec.rho = rho;
    spec.a = parse_a(a_text);
    spec.out = out;
    spec.format = format;
    spec.tol = tol;
    spec.workers = workers;

    hop::Table table = hop::run_study(spec);

    std::ostringstream buf;
    if (spec.format == "json")
      write_json(buf, table, spec);
    else
      hop::write_csv(buf, table, hop::spec_hash(spec));

    if (out.empty()) {
      std::cout << buf.str();
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot open " << out << " for writing\n";
        return 1;
      }
      f << buf.str();
      if (!f) {
        std::cerr << "error: write to " << out << " failed\n";
        return 1;
      }
    }
    return 0;
  } catch (const hop::PreconditionError& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return 2;
  } catch (const hop::UnsupportedError& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return 2;
  } catch (const hop::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
