// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0
//
// A deliberately small JavaScript syntax tree. One node type with a kind tag;
// the meaning of `text` and `kids` per kind is listed next to each enumerator.
// Absent optional children are stored as null pointers so positions in
// `kids` stay fixed.

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nlflow::js {

enum class Kind {
  // Expressions
  Identifier,    // text = name
  This,          //
  Super,         //
  Literal,       // text = raw value (number, true, false, null)
  String,        // text = cooked value
  Regex,         // text = raw
  Template,      // quasis; kids = substitutions
  TaggedTemplate, // kids = {tag, Template}
  Array,         // kids = elements (Elision for holes)
  Elision,       //
  Object,        // kids = Property | Spread
  Property,      // text = static key; kids = {value, computed key?}
  Function,      // text = name; params; kids = {body}
  Class,         // text = name; kids = {superclass?, members...}
  Unary,         // text = operator; kids = {operand}
  Update,        // text = operator; kids = {operand}; Prefix flag
  Binary,        // text = operator; kids = {lhs, rhs}
  Assign,        // text = operator; kids = {target, value}
  Conditional,   // kids = {test, then, else}
  Call,          // kids = {callee, args...}; Optional flag
  New,           // kids = {callee, args...}
  Member,        // text = static property; kids = {object, computed key?}
  Sequence,      // kids = expressions
  Spread,        // kids = {argument}
  Yield,         // kids = {argument?}
  Await,         // kids = {argument}
  // Patterns
  ObjectPattern, // kids = Property (value is a pattern) | Rest
  ArrayPattern,  // kids = patterns (Elision for holes)
  AssignPattern, // kids = {target, default}
  Rest,          // kids = {target}
  // Statements
  Program,       // kids = statements
  VarDecl,       // text = var|let|const; kids = Declarator
  Declarator,    // kids = {pattern, init?}
  ExprStmt,      // kids = {expression}
  Block,         // kids = statements
  If,            // kids = {test, then, else?}
  For,           // kids = {init?, test?, update?, body}
  ForIn,         // kids = {left, right, body}
  ForOf,         // kids = {left, right, body}
  While,         // kids = {test, body}
  DoWhile,       // kids = {body, test}
  Return,        // kids = {argument?}
  Throw,         // kids = {argument}
  Try,           // kids = {block, catch param?, catch body?, finally?}
  Switch,        // kids = {discriminant, Case...}
  Case,          // kids = {test?, statements...}
  Break,         //
  Continue,      //
  Empty,         //
  Labeled,       // text = label; kids = {body}
  Import,        // text = module; kids = ImportSpec
  ImportSpec,    // text = imported name ("default", "*" or a name); alias = local
  ExportNamed,   // text = module (re-export) or empty; kids = {declaration} or ExportSpec...
  ExportSpec,    // text = local name; alias = exported name
  ExportDefault, // kids = {declaration or expression}
  ExportAll,     // text = module
};

enum NodeFlag : unsigned {
  kComputed = 1u << 0,
  kAsync = 1u << 1,
  kGenerator = 1u << 2,
  kArrow = 1u << 3,
  kStatic = 1u << 4,
  kPrefix = 1u << 5,
  kOptional = 1u << 6,
  kShorthand = 1u << 7,
  kMethod = 1u << 8,
  kGetter = 1u << 9,
  kSetter = 1u << 10,
  kExpressionBody = 1u << 11, // arrow with a concise body
  kDeclaration = 1u << 12,    // function/class declaration statement
  kField = 1u << 13,          // class field
};

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  Kind kind;
  int line = 0;
  int column = 0;
  std::string text;
  std::string alias;
  unsigned flags = 0;
  std::vector<NodePtr> kids;
  std::vector<NodePtr> params;      // Function only
  std::vector<std::string> quasis;  // Template only
  std::string doc;                  // leading doc comment (functions, classes)

  Node(Kind k, int l, int c) : kind(k), line(l), column(c) {}

  bool has(NodeFlag f) const { return (flags & f) != 0; }
  Node *kid(std::size_t i) const { return i < kids.size() ? kids[i].get() : nullptr; }
};

std::string_view kind_name(Kind k);

} // namespace nlflow::js
