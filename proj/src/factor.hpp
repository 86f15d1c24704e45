#pragma once

// Coefficient matrices of the second-order Maxwell system in boundary normal
// coordinates and the two symbol recursions built on them: the factorization
// symbols phi_1, phi_0, ..., and the normal-trace inverse symbols q_{-1},
// q_{-2}, ....

#include <map>

#include "scenario.hpp"

namespace emdtn {

struct OperatorCoefficients {
    SymbolElement b0;  // degree 0, 3x3, xi-free
    SymbolElement c2;  // degree 2, 3x3: -Q I3
    SymbolElement c1;  // degree 1, 3x3
    SymbolElement c0;  // degree 0, 3x3
};

OperatorCoefficients assemble_b_c(const Scenario& s);

// Applies the operator d33 + B d3 + C to a jet vector field, interpreting
// xi_a as -i d_a. Used to pin B and C against the directly assembled
// second-order Maxwell form.
VectorFieldJet apply_factored_operator(const OperatorCoefficients& coeffs, const Scenario& s, const VectorFieldJet& e);

// phi_1 = w I3 and then one degree per step down to lowest_degree.
SymbolTable phi_recursion(const OperatorCoefficients& coeffs, const Scenario& s, int lowest_degree);

// q_-1 = 1/(sigma w) and then down to lowest_degree. Needs phi at least two
// degrees deeper than the first q slot it feeds.
SymbolTable q_recursion(const SymbolTable& phi, const Scenario& s, int lowest_degree);

// The operand sum sigma (Phi^{33} + tr Gamma) + d3 sigma whose symbol q
// inverts; shared between the recursion and the residual check.
SymbolTable q_operand(const SymbolTable& phi, const Scenario& s);

// Graded slots of the full factorization symbol equation; degrees from 2
// down to phi.lowest()+1 must vanish, lower ones report the truncation
// remainder.
std::map<int, double> factorization_residual(const OperatorCoefficients& coeffs, const SymbolTable& phi);

// Graded slots of the q-composition identity (operand * q ~ 1).
std::map<int, double> q_composition_residual(const SymbolTable& phi, const SymbolTable& q, const Scenario& s);

// Graded slot of the composition sum over available pairs; no exactness
// guard (the recursions rely on the not-yet-computed pair being absent).
SymbolElement compose_slot(const SymbolTable& a, const SymbolTable& b, int degree);

}  // namespace emdtn
