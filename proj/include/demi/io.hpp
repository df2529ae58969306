#pragma once

// JSON and CSV serialization of kernels, domains, grid functions and reports.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "demi/analysis.hpp"
#include "demi/bifurcate.hpp"

namespace demi {

using Json = nlohmann::json;

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_real(double x);

/// {"s","dim","lambda","Lambda","variant","densities"[, "sectors"]}.
Json to_json(const KernelClass& cls);
KernelClass kernel_class_from_json(const Json& j);

/// {"type":"interval","a","b"} | {"type":"union","parts":[[a,b],...]} | {"type":"ball","center","radius"}.
Json to_json(const DomainSpec& d);
DomainSpec domain_from_json(const Json& j);

/// CSV with columns x[,y],value over interior nodes (all box nodes when free_exterior).
void write_csv(std::ostream& os, const GridFunction& u);
/// Reads values back onto grid by matching coordinates to nodes.
GridFunction read_csv(std::istream& is, const GridPtr& grid);
/// [[x[,y], value], ...] over the same nodes as write_csv.
Json to_json(const GridFunction& u);

/// Lines "row col value" for every nonzero of the interior block (0-based).
void write_triplets(std::ostream& os, const NonlocalMatrix& a);

std::string to_string(SolveStatus s);
std::string to_string(BranchStatus s);

Json to_json(const SolveReport& r);
Json to_json(const EigenReport& r);
Json to_json(const Certificate& c);
Json to_json(const BoundaryFit& f);
Json to_json(const ProbeReport& r);
/// One row per trial: index, violation, then the union of value keys.
void write_csv(std::ostream& os, const ProbeReport& r);
Json to_json(const Branch& b);
/// Columns amplitude, mu, min_u, max_u, residual.
void write_csv(std::ostream& os, const Branch& b);

}  // namespace demi
