#pragma once

// Structured-text file formats: scenario definitions and symbol tables.
// Both are human-diffable and round-trip losslessly (%.17g doubles, fixed
// iteration order). Boundary-field grids use the binary format in dtn.hpp.

#include <string>

#include "scenario.hpp"
#include "symalg.hpp"

namespace emdtn {

std::string scenario_to_text(const Scenario& s);
// Parses and validates; throws ParseError on malformed input and the usual
// invariant errors (NonPositiveDefinite, NonPositiveParameter) otherwise.
Scenario scenario_from_text(const std::string& text);

void save_scenario(const std::string& path, const Scenario& s);
Scenario load_scenario(const std::string& path);

// The table file embeds the boundary inverse-metric jets (qref block): a
// symbol is an element of Jet3[xi,w]/(w^2 - Q) and cannot be evaluated
// without Q. Reconstruction uses that block only to evaluate the measured
// symbols at covectors, never as prior knowledge of the unknowns.
std::string symbols_to_text(const SymbolTable& t, double omega);
SymbolTable symbols_from_text(const std::string& text, double* omega_out = nullptr);

void save_symbols(const std::string& path, const SymbolTable& t, double omega);
SymbolTable load_symbols(const std::string& path, double* omega_out = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace emdtn
