#pragma once

#include <string>

#include "lsv/ast.hpp"
#include "lsv/dl.hpp"

namespace lsv {

// Compact, single-line renderings. Output reparses to a structurally
// identical tree; parse(print(x)) == x.
std::string prettyPrint(const ExprPtr &e);
std::string prettyPrint(const UpdateExpr &e);
std::string prettyPrint(const StmtPtr &s);
std::string prettyPrint(const StmtList &program);

// Indented multi-line program rendering, used for file/desugar output.
std::string prettyPrintIndented(const StmtList &program);

// Logic renderings used in proof trees and reports:
//   update  {a := 1 || b := 2}
//   box     [ program ](post)
std::string prettyPrint(const TermPtr &t);
std::string prettyPrint(const Update &u);
std::string prettyPrint(const FormulaPtr &f);
std::string prettyPrint(const Sequent &s);

} // namespace lsv
