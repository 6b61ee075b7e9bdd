#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cprob/bilinear.hpp"
#include "cprob/commuting.hpp"
#include "cprob/egyptian.hpp"
#include "cprob/errors.hpp"
#include "cprob/spectrum.hpp"

namespace cprob::cli {

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

inline EtaFunction load_eta(const std::string& path) {
  if (path.empty()) return EtaFunction();
  auto in = open_input(path);
  return EtaFunction::parse(in);
}

inline std::string join(const std::vector<Element>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
  return s;
}

inline std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
  return s;
}

inline std::set<std::string> parse_families(const std::string& list) {
  std::set<std::string> out;
  std::stringstream ss(list);
  std::string f;
  while (std::getline(ss, f, ',')) {
    if (f.empty()) continue;
    if (std::find(all_families().begin(), all_families().end(), f) == all_families().end())
      throw ParseError("unknown family '" + f + "'");
    out.insert(f);
  }
  if (out.empty()) throw ParseError("empty family list");
  return out;
}

inline void print_group_certificate(std::ostream& out, const GroupCertificate& c) {
  out << "descriptor=" << c.descriptor << "\n"
      << "order=" << c.order << "\n"
      << "pr=" << c.pr_total << "\n"
      << "q=" << c.q << "\n"
      << "epsilon=" << c.epsilon << "\n"
      << "H_size=" << c.h.size() << "\n"
      << "H=" << join(c.h.members()) << "\n"
      << "commutator_size=" << c.commutator_size << "\n"
      << "decomposition=" << c.decomposition.str() << "\n";
  for (const auto& s : c.trace)
    out << "step=" << s.step << " K_size=" << s.k_size << " L_size=" << s.l_size
        << " commutator_KL_size=" << s.commutator_kl_size << " exceptional_pairs=" << s.exceptional_pairs << "\n";
}

inline void print_bilinear_certificate(std::ostream& out, const BilinearCertificate& c) {
  out << "q=" << c.q << "\n"
      << "epsilon=" << c.epsilon << "\n"
      << "A_prime_size=" << c.a_prime.size() << "\n"
      << "A_prime=" << join(c.a_prime.members()) << "\n"
      << "B_prime_size=" << c.b_prime.size() << "\n"
      << "B_prime=" << join(c.b_prime.members()) << "\n"
      << "image_size=" << c.image_size << "\n"
      << "certificate_decomposition=" << c.decomposition.str() << "\n";
  for (const auto& s : c.trace)
    out << "step=" << s.step << " A_size=" << s.a_size << " B_size=" << s.b_size << " image_size=" << s.image_size
        << " exceptional_pairs=" << s.exceptional_pairs << "\n";
}

}  // namespace detail

/// Runs one command line (args excludes the program name). Returns the exit
/// code: 0 success, 1 domain error, 2 parse error, 3 internal invariant
/// violation.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact commuting probabilities, Egyptian fractions and certificates", "cprob"};
  app.require_subcommand(1);

  std::string group, value, limit, eps, eta_file, map_file, store_file, families = "C,D,Dic,S,A,Heis,SD";
  std::size_t cap = kDefaultOrderCap, terms = 1, egyptian_cap = 4;
  std::uint64_t max_order = 0;
  bool json = false, verify_gap = false, no_products = false;

  auto* pr = app.add_subcommand("pr", "Print Pr(G)");
  pr->add_option("--group", group, "Group descriptor")->required();
  pr->add_option("--cap", cap, "Order cap");

  auto* decompose = app.add_subcommand("decompose", "Print the unit-fraction decomposition of Pr(G)");
  decompose->add_option("--group", group, "Group descriptor")->required();
  decompose->add_option("--cap", cap, "Order cap");

  auto* certificate = app.add_subcommand("certificate", "Print the certificate Pr(G) = q + epsilon");
  certificate->add_option("--group", group, "Group descriptor")->required();
  certificate->add_option("--eta", eta_file, "Eta table file (default: constant 1/16)");
  certificate->add_flag("--json", json, "Emit JSON");
  certificate->add_option("--cap", cap, "Order cap");

  auto* egyptian = app.add_subcommand("egyptian", "Print the Egyptian complexity and a witness");
  egyptian->add_option("--value", value, "Rational a/b in [0,1]")->required();
  egyptian->add_option("--cap", egyptian_cap, "Maximum number of terms");

  auto* qbelow = app.add_subcommand("qbelow", "Print Q(m,x) and eta_x(m)");
  qbelow->add_option("--terms", terms, "m >= 1")->required();
  qbelow->add_option("--limit", limit, "Rational x > 0")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Populate a spectrum store");
  spectrum->add_option("--max-order", max_order, "Largest group order")->required();
  spectrum->add_option("--families", families, "Comma-separated families");
  spectrum->add_option("--store", store_file, "Store file (read if present, then rewritten)")->required();
  spectrum->add_flag("--verify-gap", verify_gap, "Check that no value lies in (5/8, 1)");
  spectrum->add_flag("--no-products", no_products, "Skip binary direct products");
  spectrum->add_option("--cap", cap, "Order cap");

  auto* bilinear = app.add_subcommand("bilinear", "Print Pr(phi) and its decomposition");
  bilinear->add_option("--map", map_file, "Bilinear map file")->required();
  bilinear->add_option("--eta", eta_file, "Eta table file; prints a certificate");
  bilinear->add_flag("--json", json, "Emit the certificate as JSON");

  auto* neumann = app.add_subcommand("neumann", "Print the Neumann subgroups K and H");
  neumann->add_option("--group", group, "Group descriptor")->required();
  neumann->add_option("--eps", eps, "Rational eps in (0,1)")->required();
  neumann->add_option("--cap", cap, "Order cap");

  std::vector<std::string> argv_store{"cprob"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (pr->parsed()) {
      out << commuting_probability(build_group(group, cap)) << "\n";
    } else if (decompose->parsed()) {
      const auto rep = egyptian_decomposition_group(build_group(group, cap));
      out << rep.sum_str() << " = " << rep.value() << "\n";
    } else if (certificate->parsed()) {
      const auto desc = GroupDescriptor::parse(group);
      const auto cert = main_certificate(build_group(desc, cap), detail::load_eta(eta_file), desc.str());
      if (json) out << to_json(cert).dump(2) << "\n";
      else detail::print_group_certificate(out, cert);
    } else if (egyptian->parsed()) {
      const auto r = egyptian_complexity(Rational::parse(value), egyptian_cap);
      out << r.terms << ":" << (r.terms ? " " + r.witness.str() : "") << "\n";
    } else if (qbelow->parsed()) {
      const auto x = Rational::parse(limit);
      out << "Q=" << q_below(terms, x) << " eta=" << eta_gap(terms, x) << "\n";
    } else if (spectrum->parsed()) {
      SpectrumStore store;
      if (std::filesystem::exists(store_file)) {
        auto in = detail::open_input(store_file);
        store = SpectrumStore::parse(in);
      }
      populate(store, max_order, detail::parse_families(families), !no_products, cap);
      {
        std::ofstream o(store_file, std::ios::binary);
        if (!o) throw DomainError("cannot write '" + store_file + "'");
        o << store.serialize();
      }
      out << "values=" << store.value_count() << " witnesses=" << store.witness_count() << "\n";
      if (verify_gap) {
        const auto report = verify_five_eighths(store);
        out << "empirical: no stored value in (5/8, 1) among " << report.values_checked << " values\n";
        out << "5/8 attained by:";
        for (const auto& w : report.witnesses) out << " " << w.descriptor;
        out << "\n";
        if (auto g = gap_below(store, Rational(5, 8))) out << "empirical: next value below 5/8 is " << *g << "\n";
      }
    } else if (bilinear->parsed()) {
      auto in = detail::open_input(map_file);
      const auto phi = BilinearMap::parse(in);
      const auto rep = egyptian_decomposition_bilinear(phi);
      if (!eta_file.empty() && json) {
        out << to_json(bilinear_certificate(phi, detail::load_eta(eta_file))).dump(2) << "\n";
      } else {
        out << "pr=" << pr_zero(phi) << "\n";
        out << "decomposition=" << rep.sum_str() << " = " << rep.value() << "\n";
        if (!eta_file.empty()) detail::print_bilinear_certificate(out, bilinear_certificate(phi, detail::load_eta(eta_file)));
      }
    } else if (neumann->parsed()) {
      const auto r = neumann_subgroup(build_group(group, cap), Rational::parse(eps));
      out << "K_size=" << r.k.size() << "\n"
          << "K=" << detail::join(r.k.members()) << "\n"
          << "H_size=" << r.h.size() << "\n"
          << "H=" << detail::join(r.h.members()) << "\n"
          << "hypothesis=" << (r.hypothesis_held ? "held" : "not held") << "\n";
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InternalInvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace cprob::cli
