// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/js_parser.hpp"

#include "nlflow/common.hpp"
#include "nlflow/js_lexer.hpp"

#include <initializer_list>
#include <set>

namespace nlflow::js {

std::string_view kind_name(Kind k) {
  switch (k) {
  case Kind::Identifier: return "Identifier";
  case Kind::This: return "This";
  case Kind::Super: return "Super";
  case Kind::Literal: return "Literal";
  case Kind::String: return "String";
  case Kind::Regex: return "Regex";
  case Kind::Template: return "Template";
  case Kind::TaggedTemplate: return "TaggedTemplate";
  case Kind::Array: return "Array";
  case Kind::Elision: return "Elision";
  case Kind::Object: return "Object";
  case Kind::Property: return "Property";
  case Kind::Function: return "Function";
  case Kind::Class: return "Class";
  case Kind::Unary: return "Unary";
  case Kind::Update: return "Update";
  case Kind::Binary: return "Binary";
  case Kind::Assign: return "Assign";
  case Kind::Conditional: return "Conditional";
  case Kind::Call: return "Call";
  case Kind::New: return "New";
  case Kind::Member: return "Member";
  case Kind::Sequence: return "Sequence";
  case Kind::Spread: return "Spread";
  case Kind::Yield: return "Yield";
  case Kind::Await: return "Await";
  case Kind::ObjectPattern: return "ObjectPattern";
  case Kind::ArrayPattern: return "ArrayPattern";
  case Kind::AssignPattern: return "AssignPattern";
  case Kind::Rest: return "Rest";
  case Kind::Program: return "Program";
  case Kind::VarDecl: return "VarDecl";
  case Kind::Declarator: return "Declarator";
  case Kind::ExprStmt: return "ExprStmt";
  case Kind::Block: return "Block";
  case Kind::If: return "If";
  case Kind::For: return "For";
  case Kind::ForIn: return "ForIn";
  case Kind::ForOf: return "ForOf";
  case Kind::While: return "While";
  case Kind::DoWhile: return "DoWhile";
  case Kind::Return: return "Return";
  case Kind::Throw: return "Throw";
  case Kind::Try: return "Try";
  case Kind::Switch: return "Switch";
  case Kind::Case: return "Case";
  case Kind::Break: return "Break";
  case Kind::Continue: return "Continue";
  case Kind::Empty: return "Empty";
  case Kind::Labeled: return "Labeled";
  case Kind::Import: return "Import";
  case Kind::ImportSpec: return "ImportSpec";
  case Kind::ExportNamed: return "ExportNamed";
  case Kind::ExportSpec: return "ExportSpec";
  case Kind::ExportDefault: return "ExportDefault";
  case Kind::ExportAll: return "ExportAll";
  }
  return "?";
}

namespace {

const std::set<std::string_view> kReserved = {
    "break",    "case",   "catch",      "class",  "const",  "continue", "debugger",
    "default",  "delete", "do",         "else",   "export", "extends",  "finally",
    "for",      "function", "if",       "import", "in",     "instanceof", "new",
    "return",   "super",  "switch",     "this",   "throw",  "try",      "typeof",
    "var",      "void",   "while",      "with",   "null",   "true",     "false"};

const std::set<std::string_view> kAssignOps = {"=",   "+=",  "-=",  "*=",  "/=",   "%=",
                                               "**=", "<<=", ">>=", ">>>=", "&=",  "|=",
                                               "^=",  "&&=", "||=", "?\?="};

int binary_precedence(const Token &t, bool no_in) {
  if (t.type == TokenType::Identifier) {
    if (t.text == "instanceof")
      return 8;
    if (t.text == "in")
      return no_in ? -1 : 8;
    return -1;
  }
  if (t.type != TokenType::Punctuator)
    return -1;
  const std::string &op = t.text;
  if (op == "??")
    return 1;
  if (op == "||")
    return 2;
  if (op == "&&")
    return 3;
  if (op == "|")
    return 4;
  if (op == "^")
    return 5;
  if (op == "&")
    return 6;
  if (op == "==" || op == "!=" || op == "===" || op == "!==")
    return 7;
  if (op == "<" || op == ">" || op == "<=" || op == ">=")
    return 8;
  if (op == "<<" || op == ">>" || op == ">>>")
    return 9;
  if (op == "+" || op == "-")
    return 10;
  if (op == "*" || op == "/" || op == "%")
    return 11;
  if (op == "**")
    return 12;
  return -1;
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr program() {
    auto prog = make(Kind::Program, cur());
    while (cur().type != TokenType::End)
      prog->kids.push_back(statement());
    return prog;
  }

private:
  // ---- token helpers ----
  const Token &cur() const { return toks_[pos_]; }
  const Token &peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  const Token &next() {
    const Token &t = toks_[pos_];
    if (pos_ + 1 < toks_.size())
      ++pos_;
    return t;
  }
  bool at(std::string_view p) const { return cur().punct(p); }
  bool at_ident(std::string_view s) const { return cur().ident(s); }
  bool eat(std::string_view p) {
    if (at(p)) {
      next();
      return true;
    }
    return false;
  }
  bool eat_ident(std::string_view s) {
    if (at_ident(s)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &what) const {
    const Token &t = cur();
    std::string found = t.type == TokenType::End ? std::string("end of input")
                                                 : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, static_cast<std::size_t>(t.line),
                     static_cast<std::size_t>(t.column));
  }
  void expect(std::string_view p) {
    if (!eat(p))
      fail("expected '" + std::string(p) + "'");
  }
  void semicolon() {
    if (eat(";"))
      return;
    if (at("}") || cur().type == TokenType::End || cur().newline_before)
      return;
    fail("expected ';'");
  }

  NodePtr make(Kind k, const Token &t) { return std::make_unique<Node>(k, t.line, t.column); }

  std::string identifier_name() {
    // Property names may be reserved words.
    if (cur().type != TokenType::Identifier && cur().type != TokenType::PrivateName)
      fail("expected property name");
    return next().text;
  }

  std::string binding_identifier() {
    if (cur().type != TokenType::Identifier || kReserved.contains(cur().text))
      fail("expected identifier");
    return next().text;
  }

  bool is_identifier_token(const Token &t) const {
    return t.type == TokenType::Identifier && !kReserved.contains(t.text);
  }

  std::size_t matching_close(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < toks_.size(); ++i) {
      const Token &t = toks_[i];
      if (t.type != TokenType::Punctuator)
        continue;
      if (t.text == "(" || t.text == "[" || t.text == "{")
        ++depth;
      else if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0)
          return i;
      }
    }
    return toks_.size() - 1;
  }

  bool arrow_after_paren(std::size_t open) const {
    std::size_t close = matching_close(open);
    return close + 1 < toks_.size() && toks_[close + 1].punct("=>");
  }

  // ---- statements ----
  NodePtr statement() {
    const Token &start = cur();
    std::string doc = start.doc;
    NodePtr stmt = statement_inner();
    attach_doc(stmt.get(), doc);
    return stmt;
  }

  void attach_doc(Node *stmt, const std::string &doc) {
    if (doc.empty() || !stmt)
      return;
    auto set = [&](Node *n) {
      if (n && (n->kind == Kind::Function || n->kind == Kind::Class) && n->doc.empty())
        n->doc = doc;
    };
    switch (stmt->kind) {
    case Kind::Function:
    case Kind::Class: set(stmt); break;
    case Kind::ExprStmt: {
      Node *e = stmt->kid(0);
      while (e && e->kind == Kind::Assign) {
        set(e->kid(1));
        e = e->kid(1);
      }
      break;
    }
    case Kind::VarDecl:
      for (auto &d : stmt->kids)
        set(d->kid(1));
      break;
    case Kind::ExportNamed:
    case Kind::ExportDefault: attach_doc(stmt->kid(0), doc); break;
    default: break;
    }
  }

  NodePtr statement_inner() {
    const Token &t = cur();
    if (t.type == TokenType::Punctuator) {
      if (t.text == "{")
        return block();
      if (t.text == ";") {
        auto n = make(Kind::Empty, t);
        next();
        return n;
      }
    }
    if (t.type == TokenType::Identifier) {
      const std::string &w = t.text;
      if (w == "var" || w == "const")
        return var_statement();
      if (w == "let" && (is_identifier_token(peek()) || peek().punct("[") || peek().punct("{")))
        return var_statement();
      if (w == "function")
        return function(true, false);
      if (w == "async" && peek().ident("function") && !peek().newline_before) {
        next();
        return function(true, true);
      }
      if (w == "class")
        return class_(true);
      if (w == "if")
        return if_statement();
      if (w == "for")
        return for_statement();
      if (w == "while") {
        auto n = make(Kind::While, t);
        next();
        expect("(");
        n->kids.push_back(expression(false));
        expect(")");
        n->kids.push_back(statement());
        return n;
      }
      if (w == "do") {
        auto n = make(Kind::DoWhile, t);
        next();
        n->kids.push_back(statement());
        if (!eat_ident("while"))
          fail("expected 'while'");
        expect("(");
        n->kids.push_back(expression(false));
        expect(")");
        eat(";");
        return n;
      }
      if (w == "return") {
        auto n = make(Kind::Return, t);
        next();
        if (!at(";") && !at("}") && cur().type != TokenType::End && !cur().newline_before)
          n->kids.push_back(expression(false));
        semicolon();
        return n;
      }
      if (w == "throw") {
        auto n = make(Kind::Throw, t);
        next();
        n->kids.push_back(expression(false));
        semicolon();
        return n;
      }
      if (w == "try")
        return try_statement();
      if (w == "switch")
        return switch_statement();
      if (w == "break" || w == "continue") {
        auto n = make(w == "break" ? Kind::Break : Kind::Continue, t);
        next();
        if (cur().type == TokenType::Identifier && !cur().newline_before &&
            !kReserved.contains(cur().text))
          n->text = next().text;
        semicolon();
        return n;
      }
      if (w == "debugger") {
        auto n = make(Kind::Empty, t);
        next();
        semicolon();
        return n;
      }
      if (w == "with") {
        // Scope injection is not modelled; keep the object and the body so
        // taint in either is still seen.
        auto n = make(Kind::Block, t);
        next();
        expect("(");
        auto obj = make(Kind::ExprStmt, cur());
        obj->kids.push_back(expression(false));
        expect(")");
        n->kids.push_back(std::move(obj));
        n->kids.push_back(statement());
        return n;
      }
      if (w == "import" && !peek().punct("(") && !peek().punct("."))
        return import_declaration();
      if (w == "export")
        return export_declaration();
      if (is_identifier_token(t) && peek().punct(":")) {
        auto n = make(Kind::Labeled, t);
        n->text = next().text;
        next();
        n->kids.push_back(statement());
        return n;
      }
    }
    auto n = make(Kind::ExprStmt, t);
    n->kids.push_back(expression(false));
    semicolon();
    return n;
  }

  NodePtr block() {
    auto n = make(Kind::Block, cur());
    expect("{");
    while (!at("}")) {
      if (cur().type == TokenType::End)
        fail("expected '}'");
      n->kids.push_back(statement());
    }
    next();
    return n;
  }

  NodePtr var_declaration(bool no_in) {
    auto n = make(Kind::VarDecl, cur());
    n->text = next().text;
    do {
      auto d = make(Kind::Declarator, cur());
      d->kids.push_back(binding_target());
      if (eat("="))
        d->kids.push_back(assignment(no_in));
      else
        d->kids.push_back(nullptr);
      n->kids.push_back(std::move(d));
    } while (eat(","));
    return n;
  }

  NodePtr var_statement() {
    auto n = var_declaration(false);
    semicolon();
    return n;
  }

  NodePtr if_statement() {
    auto n = make(Kind::If, cur());
    next();
    expect("(");
    n->kids.push_back(expression(false));
    expect(")");
    n->kids.push_back(statement());
    if (eat_ident("else"))
      n->kids.push_back(statement());
    else
      n->kids.push_back(nullptr);
    return n;
  }

  NodePtr for_statement() {
    const Token &start = cur();
    next();
    eat_ident("await");
    expect("(");
    NodePtr init;
    if (at(";")) {
      // empty init
    } else if (at_ident("var") || at_ident("const") ||
               (at_ident("let") && (is_identifier_token(peek()) || peek().punct("[") ||
                                    peek().punct("{")))) {
      init = var_declaration(true);
    } else {
      init = expression(true);
    }
    if (init && (at_ident("of") || at_ident("in"))) {
      bool of = at_ident("of");
      next();
      auto n = make(of ? Kind::ForOf : Kind::ForIn, start);
      if (init->kind != Kind::VarDecl)
        init = to_pattern(std::move(init));
      n->kids.push_back(std::move(init));
      n->kids.push_back(of ? assignment(false) : expression(false));
      expect(")");
      n->kids.push_back(statement());
      return n;
    }
    auto n = make(Kind::For, start);
    expect(";");
    n->kids.push_back(std::move(init));
    n->kids.push_back(at(";") ? nullptr : expression(false));
    expect(";");
    n->kids.push_back(at(")") ? nullptr : expression(false));
    expect(")");
    n->kids.push_back(statement());
    return n;
  }

  NodePtr try_statement() {
    auto n = make(Kind::Try, cur());
    next();
    n->kids.push_back(block());
    NodePtr param, handler, finalizer;
    if (eat_ident("catch")) {
      if (eat("(")) {
        param = binding_target();
        expect(")");
      }
      handler = block();
    }
    if (eat_ident("finally"))
      finalizer = block();
    if (!handler && !finalizer)
      fail("expected 'catch' or 'finally'");
    n->kids.push_back(std::move(param));
    n->kids.push_back(std::move(handler));
    n->kids.push_back(std::move(finalizer));
    return n;
  }

  NodePtr switch_statement() {
    auto n = make(Kind::Switch, cur());
    next();
    expect("(");
    n->kids.push_back(expression(false));
    expect(")");
    expect("{");
    while (!eat("}")) {
      auto c = make(Kind::Case, cur());
      if (eat_ident("case")) {
        c->kids.push_back(expression(false));
      } else if (eat_ident("default")) {
        c->kids.push_back(nullptr);
      } else {
        fail("expected 'case' or 'default'");
      }
      expect(":");
      while (!at("}") && !at_ident("case") && !at_ident("default")) {
        if (cur().type == TokenType::End)
          fail("expected '}'");
        c->kids.push_back(statement());
      }
      n->kids.push_back(std::move(c));
    }
    return n;
  }

  std::string module_specifier() {
    if (cur().type != TokenType::String)
      fail("expected module specifier");
    return next().text;
  }

  NodePtr import_declaration() {
    auto n = make(Kind::Import, cur());
    next();
    if (cur().type == TokenType::String) {
      n->text = module_specifier();
      semicolon();
      return n;
    }
    auto spec = [&](std::string imported, std::string local, const Token &at_tok) {
      auto s = make(Kind::ImportSpec, at_tok);
      s->text = std::move(imported);
      s->alias = std::move(local);
      n->kids.push_back(std::move(s));
    };
    if (is_identifier_token(cur())) {
      const Token &t = cur();
      spec("default", binding_identifier(), t);
      if (!eat(","))
        goto from;
    }
    if (at("*")) {
      const Token &t = cur();
      next();
      if (!eat_ident("as"))
        fail("expected 'as'");
      spec("*", binding_identifier(), t);
    } else if (eat("{")) {
      while (!eat("}")) {
        const Token &t = cur();
        std::string imported = cur().type == TokenType::String ? next().text : identifier_name();
        std::string local = imported;
        if (eat_ident("as"))
          local = binding_identifier();
        spec(imported, local, t);
        if (!at("}"))
          expect(",");
      }
    } else {
      fail("expected import specifiers");
    }
  from:
    if (!eat_ident("from"))
      fail("expected 'from'");
    n->text = module_specifier();
    semicolon();
    return n;
  }

  NodePtr export_declaration() {
    const Token &start = cur();
    next();
    if (eat_ident("default")) {
      auto n = make(Kind::ExportDefault, start);
      if (at_ident("function")) {
        n->kids.push_back(function(true, false, true));
      } else if (at_ident("async") && peek().ident("function")) {
        next();
        n->kids.push_back(function(true, true, true));
      } else if (at_ident("class")) {
        n->kids.push_back(class_(true, true));
      } else {
        n->kids.push_back(assignment(false));
        semicolon();
      }
      return n;
    }
    if (at("*")) {
      auto n = make(Kind::ExportAll, start);
      next();
      if (eat_ident("as"))
        n->alias = identifier_name();
      if (!eat_ident("from"))
        fail("expected 'from'");
      n->text = module_specifier();
      semicolon();
      return n;
    }
    auto n = make(Kind::ExportNamed, start);
    if (eat("{")) {
      while (!eat("}")) {
        auto s = make(Kind::ExportSpec, cur());
        s->text = identifier_name();
        s->alias = s->text;
        if (eat_ident("as"))
          s->alias = identifier_name();
        n->kids.push_back(std::move(s));
        if (!at("}"))
          expect(",");
      }
      if (eat_ident("from"))
        n->text = module_specifier();
      semicolon();
      return n;
    }
    if (at_ident("var") || at_ident("let") || at_ident("const")) {
      n->kids.push_back(var_statement());
    } else if (at_ident("function")) {
      n->kids.push_back(function(true, false));
    } else if (at_ident("async") && peek().ident("function")) {
      next();
      n->kids.push_back(function(true, true));
    } else if (at_ident("class")) {
      n->kids.push_back(class_(true));
    } else {
      fail("unexpected token after 'export'");
    }
    return n;
  }

  // ---- functions and classes ----
  NodePtr function(bool declaration, bool is_async, bool name_optional = false) {
    auto n = make(Kind::Function, cur());
    next(); // 'function'
    if (is_async)
      n->flags |= kAsync;
    if (eat("*"))
      n->flags |= kGenerator;
    if (declaration)
      n->flags |= kDeclaration;
    if (is_identifier_token(cur()))
      n->text = next().text;
    else if (declaration && !name_optional)
      fail("expected function name");
    params(*n);
    n->kids.push_back(block());
    return n;
  }

  void params(Node &fn) {
    expect("(");
    while (!eat(")")) {
      if (at("...")) {
        auto r = make(Kind::Rest, cur());
        next();
        r->kids.push_back(binding_target());
        fn.params.push_back(std::move(r));
      } else {
        fn.params.push_back(binding_element());
      }
      if (!at(")"))
        expect(",");
    }
  }

  NodePtr binding_element() {
    auto target = binding_target();
    if (at("=")) {
      auto n = make(Kind::AssignPattern, cur());
      next();
      n->kids.push_back(std::move(target));
      n->kids.push_back(assignment(false));
      return n;
    }
    return target;
  }

  NodePtr binding_target() {
    const Token &t = cur();
    if (t.punct("{")) {
      auto n = make(Kind::ObjectPattern, t);
      next();
      while (!eat("}")) {
        if (at("...")) {
          auto r = make(Kind::Rest, cur());
          next();
          r->kids.push_back(binding_target());
          n->kids.push_back(std::move(r));
        } else {
          auto p = make(Kind::Property, cur());
          NodePtr computed;
          bool plain = is_identifier_token(cur());
          property_key(*p, computed);
          if (eat(":")) {
            p->kids.push_back(binding_element());
          } else {
            if (!plain)
              fail("expected ':'");
            p->flags |= kShorthand;
            auto id = make(Kind::Identifier, t);
            id->line = p->line;
            id->column = p->column;
            id->text = p->text;
            if (at("=")) {
              auto ap = make(Kind::AssignPattern, cur());
              next();
              ap->kids.push_back(std::move(id));
              ap->kids.push_back(assignment(false));
              p->kids.push_back(std::move(ap));
            } else {
              p->kids.push_back(std::move(id));
            }
          }
          p->kids.push_back(std::move(computed));
          n->kids.push_back(std::move(p));
        }
        if (!at("}"))
          expect(",");
      }
      return n;
    }
    if (t.punct("[")) {
      auto n = make(Kind::ArrayPattern, t);
      next();
      while (!eat("]")) {
        if (at(",")) {
          n->kids.push_back(make(Kind::Elision, cur()));
          next();
          continue;
        }
        if (at("...")) {
          auto r = make(Kind::Rest, cur());
          next();
          r->kids.push_back(binding_target());
          n->kids.push_back(std::move(r));
        } else {
          n->kids.push_back(binding_element());
        }
        if (!at("]"))
          expect(",");
      }
      return n;
    }
    auto id = make(Kind::Identifier, t);
    id->text = binding_identifier();
    return id;
  }

  // Reads a property key into `prop.text` (static) or `computed`.
  void property_key(Node &prop, NodePtr &computed) {
    const Token &t = cur();
    if (t.punct("[")) {
      next();
      computed = assignment(false);
      expect("]");
      prop.flags |= kComputed;
      return;
    }
    if (t.type == TokenType::String || t.type == TokenType::Number) {
      prop.text = next().text;
      return;
    }
    prop.text = identifier_name();
  }

  bool starts_property_key(const Token &t) const {
    return t.type == TokenType::Identifier || t.type == TokenType::String ||
           t.type == TokenType::Number || t.type == TokenType::PrivateName || t.punct("[");
  }

  // Parses "(params) { body }" after a method key.
  NodePtr method_function(const Token &at_tok, const std::string &name, unsigned flags) {
    auto fn = make(Kind::Function, at_tok);
    fn->text = name;
    fn->flags |= flags;
    params(*fn);
    fn->kids.push_back(block());
    return fn;
  }

  NodePtr class_(bool declaration, bool name_optional = false) {
    auto n = make(Kind::Class, cur());
    next(); // 'class'
    if (declaration)
      n->flags |= kDeclaration;
    if (is_identifier_token(cur()) && !at_ident("extends"))
      n->text = next().text;
    else if (declaration && !name_optional)
      fail("expected class name");
    if (eat_ident("extends"))
      n->kids.push_back(lhs_expression());
    else
      n->kids.push_back(nullptr);
    expect("{");
    while (!eat("}")) {
      if (eat(";"))
        continue;
      if (cur().type == TokenType::End)
        fail("expected '}'");
      const Token &start = cur();
      std::string doc = start.doc;
      auto member = make(Kind::Property, start);
      if (at_ident("static") && !peek().punct("(") && !peek().punct("=")) {
        next();
        member->flags |= kStatic;
        if (at("{")) {
          block(); // static initialization block
          continue;
        }
      }
      unsigned fn_flags = 0;
      if (at_ident("async") && !peek().punct("(") && !peek().punct("=") &&
          !peek().newline_before) {
        next();
        fn_flags |= kAsync;
      }
      if (eat("*"))
        fn_flags |= kGenerator;
      if ((at_ident("get") || at_ident("set")) && starts_property_key(peek())) {
        member->flags |= at_ident("get") ? kGetter : kSetter;
        next();
      }
      NodePtr computed;
      property_key(*member, computed);
      if (at("(")) {
        member->flags |= kMethod;
        auto fn = method_function(start, member->text, fn_flags | kMethod);
        fn->doc = doc;
        member->kids.push_back(std::move(fn));
      } else {
        member->flags |= kField;
        if (eat("="))
          member->kids.push_back(assignment(false));
        else
          member->kids.push_back(nullptr);
        semicolon();
      }
      member->kids.push_back(std::move(computed));
      n->kids.push_back(std::move(member));
    }
    return n;
  }

  // ---- expressions ----
  NodePtr expression(bool no_in) {
    auto first = assignment(no_in);
    if (!at(","))
      return first;
    auto seq = make(Kind::Sequence, cur());
    seq->line = first->line;
    seq->column = first->column;
    seq->kids.push_back(std::move(first));
    while (eat(","))
      seq->kids.push_back(assignment(no_in));
    return seq;
  }

  NodePtr arrow(bool is_async, const Token &start, bool no_in) {
    auto fn = make(Kind::Function, start);
    fn->flags |= kArrow;
    if (is_async)
      fn->flags |= kAsync;
    if (at("(")) {
      params(*fn);
    } else {
      auto id = make(Kind::Identifier, cur());
      id->text = binding_identifier();
      fn->params.push_back(std::move(id));
    }
    expect("=>");
    if (at("{")) {
      fn->kids.push_back(block());
    } else {
      fn->flags |= kExpressionBody;
      fn->kids.push_back(assignment(no_in));
    }
    return fn;
  }

  NodePtr assignment(bool no_in) {
    const Token &t = cur();
    // Arrow functions.
    if (is_identifier_token(t) && peek().punct("=>"))
      return arrow(false, t, no_in);
    if (t.punct("(") && arrow_after_paren(pos_))
      return arrow(false, t, no_in);
    if (t.ident("async") && !peek().newline_before) {
      if (is_identifier_token(peek()) && peek(2).punct("=>")) {
        next();
        return arrow(true, t, no_in);
      }
      if (peek().punct("(") && arrow_after_paren(pos_ + 1)) {
        next();
        return arrow(true, t, no_in);
      }
    }
    if (t.ident("yield") && in_generator_hint()) {
      auto n = make(Kind::Yield, t);
      next();
      eat("*");
      if (!cur().newline_before && !at(")") && !at("]") && !at("}") && !at(",") && !at(";") &&
          !at(":") && cur().type != TokenType::End)
        n->kids.push_back(assignment(no_in));
      return n;
    }
    auto lhs = conditional(no_in);
    if (cur().type == TokenType::Punctuator && kAssignOps.contains(cur().text)) {
      auto n = make(Kind::Assign, cur());
      n->line = lhs->line;
      n->column = lhs->column;
      n->text = next().text;
      if (n->text == "=")
        lhs = to_pattern(std::move(lhs));
      else if (lhs->kind != Kind::Identifier && lhs->kind != Kind::Member)
        throw ParseError("invalid assignment target", static_cast<std::size_t>(lhs->line),
                         static_cast<std::size_t>(lhs->column));
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(assignment(no_in));
      return n;
    }
    return lhs;
  }

  // `yield` is a contextual keyword; without generator tracking we treat it
  // as an operator whenever it cannot be a plain identifier reference.
  bool in_generator_hint() const {
    const Token &n = peek();
    return !(n.punct(")") || n.punct(",") || n.punct(";") || n.punct("=") || n.punct(".") ||
             n.punct("]") || n.punct("}")) ||
           n.newline_before;
  }

  NodePtr to_pattern(NodePtr e) {
    switch (e->kind) {
    case Kind::Identifier:
    case Kind::Member:
    case Kind::ObjectPattern:
    case Kind::ArrayPattern:
    case Kind::AssignPattern:
      return e;
    case Kind::Object: {
      auto p = std::make_unique<Node>(Kind::ObjectPattern, e->line, e->column);
      for (auto &prop : e->kids) {
        if (prop->kind == Kind::Spread) {
          auto r = std::make_unique<Node>(Kind::Rest, prop->line, prop->column);
          r->kids.push_back(to_pattern(std::move(prop->kids[0])));
          p->kids.push_back(std::move(r));
        } else {
          if (prop->has(kMethod) || prop->has(kGetter) || prop->has(kSetter))
            throw ParseError("invalid destructuring target", static_cast<std::size_t>(prop->line),
                             static_cast<std::size_t>(prop->column));
          prop->kids[0] = to_pattern(std::move(prop->kids[0]));
          p->kids.push_back(std::move(prop));
        }
      }
      return p;
    }
    case Kind::Array: {
      auto p = std::make_unique<Node>(Kind::ArrayPattern, e->line, e->column);
      for (auto &el : e->kids) {
        if (el->kind == Kind::Elision) {
          p->kids.push_back(std::move(el));
        } else if (el->kind == Kind::Spread) {
          auto r = std::make_unique<Node>(Kind::Rest, el->line, el->column);
          r->kids.push_back(to_pattern(std::move(el->kids[0])));
          p->kids.push_back(std::move(r));
        } else {
          p->kids.push_back(to_pattern(std::move(el)));
        }
      }
      return p;
    }
    case Kind::Assign:
      if (e->text == "=") {
        auto p = std::make_unique<Node>(Kind::AssignPattern, e->line, e->column);
        p->kids.push_back(to_pattern(std::move(e->kids[0])));
        p->kids.push_back(std::move(e->kids[1]));
        return p;
      }
      break;
    default: break;
    }
    throw ParseError("invalid assignment target", static_cast<std::size_t>(e->line),
                     static_cast<std::size_t>(e->column));
  }

  NodePtr conditional(bool no_in) {
    auto test = binary(0, no_in);
    if (!at("?"))
      return test;
    auto n = make(Kind::Conditional, cur());
    n->line = test->line;
    n->column = test->column;
    next();
    n->kids.push_back(std::move(test));
    n->kids.push_back(assignment(false));
    expect(":");
    n->kids.push_back(assignment(no_in));
    return n;
  }

  NodePtr binary(int min_prec, bool no_in) {
    auto lhs = unary();
    for (;;) {
      int prec = binary_precedence(cur(), no_in);
      if (prec < 0 || prec < min_prec)
        return lhs;
      auto n = make(Kind::Binary, cur());
      n->line = lhs->line;
      n->column = lhs->column;
      n->text = next().text;
      // '**' is right associative.
      auto rhs = binary(n->text == "**" ? prec : prec + 1, no_in);
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(std::move(rhs));
      lhs = std::move(n);
    }
  }

  NodePtr unary() {
    const Token &t = cur();
    if (t.type == TokenType::Punctuator &&
        (t.text == "!" || t.text == "~" || t.text == "+" || t.text == "-")) {
      auto n = make(Kind::Unary, t);
      n->text = next().text;
      n->kids.push_back(unary());
      return n;
    }
    if (t.type == TokenType::Punctuator && (t.text == "++" || t.text == "--")) {
      auto n = make(Kind::Update, t);
      n->text = next().text;
      n->flags |= kPrefix;
      n->kids.push_back(unary());
      return n;
    }
    if (t.ident("typeof") || t.ident("void") || t.ident("delete")) {
      auto n = make(Kind::Unary, t);
      n->text = next().text;
      n->kids.push_back(unary());
      return n;
    }
    if (t.ident("await") && !peek().punct(")") && !peek().punct(",") && !peek().punct(";") &&
        !peek().punct("=") && !peek().punct(".")) {
      auto n = make(Kind::Await, t);
      next();
      n->kids.push_back(unary());
      return n;
    }
    auto e = lhs_expression();
    if ((at("++") || at("--")) && !cur().newline_before) {
      auto n = make(Kind::Update, cur());
      n->line = e->line;
      n->column = e->column;
      n->text = next().text;
      n->kids.push_back(std::move(e));
      return n;
    }
    return e;
  }

  NodePtr arguments(NodePtr call) {
    expect("(");
    while (!eat(")")) {
      if (at("...")) {
        auto s = make(Kind::Spread, cur());
        next();
        s->kids.push_back(assignment(false));
        call->kids.push_back(std::move(s));
      } else {
        call->kids.push_back(assignment(false));
      }
      if (!at(")"))
        expect(",");
    }
    return call;
  }

  NodePtr lhs_expression() {
    NodePtr e;
    if (at_ident("new")) {
      e = new_expression();
    } else {
      e = primary();
    }
    return suffixes(std::move(e), true);
  }

  NodePtr new_expression() {
    const Token &t = cur();
    next();
    if (eat(".")) {
      auto id = make(Kind::Identifier, t);
      id->text = "new." + identifier_name();
      return id;
    }
    NodePtr callee = at_ident("new") ? new_expression() : primary();
    callee = suffixes(std::move(callee), false);
    auto n = make(Kind::New, t);
    n->kids.push_back(std::move(callee));
    if (at("("))
      return arguments(std::move(n));
    return n;
  }

  NodePtr suffixes(NodePtr e, bool allow_call) {
    for (;;) {
      const Token &t = cur();
      if (t.punct(".")) {
        next();
        auto m = make(Kind::Member, t);
        m->line = e->line;
        m->column = e->column;
        m->text = identifier_name();
        m->kids.push_back(std::move(e));
        e = std::move(m);
      } else if (t.punct("?.")) {
        if (!allow_call)
          return e;
        next();
        if (at("(")) {
          auto c = make(Kind::Call, t);
          c->line = e->line;
          c->column = e->column;
          c->flags |= kOptional;
          c->kids.push_back(std::move(e));
          e = arguments(std::move(c));
        } else if (eat("[")) {
          auto m = make(Kind::Member, t);
          m->line = e->line;
          m->column = e->column;
          m->flags |= kComputed | kOptional;
          m->kids.push_back(std::move(e));
          m->kids.push_back(expression(false));
          expect("]");
          e = std::move(m);
        } else {
          auto m = make(Kind::Member, t);
          m->line = e->line;
          m->column = e->column;
          m->flags |= kOptional;
          m->text = identifier_name();
          m->kids.push_back(std::move(e));
          e = std::move(m);
        }
      } else if (t.punct("[")) {
        next();
        auto m = make(Kind::Member, t);
        m->line = e->line;
        m->column = e->column;
        m->flags |= kComputed;
        m->kids.push_back(std::move(e));
        auto key = expression(false);
        if (key->kind == Kind::String)
          m->text = key->text;
        m->kids.push_back(std::move(key));
        expect("]");
        e = std::move(m);
      } else if (t.punct("(") && allow_call) {
        auto c = make(Kind::Call, t);
        c->line = e->line;
        c->column = e->column;
        c->kids.push_back(std::move(e));
        e = arguments(std::move(c));
      } else if (t.type == TokenType::Template &&
                 (t.template_part == TemplatePart::NoSubstitution ||
                  t.template_part == TemplatePart::Head)) {
        auto tt = make(Kind::TaggedTemplate, t);
        tt->line = e->line;
        tt->column = e->column;
        tt->kids.push_back(std::move(e));
        tt->kids.push_back(template_literal());
        e = std::move(tt);
      } else {
        return e;
      }
    }
  }

  NodePtr template_literal() {
    auto n = make(Kind::Template, cur());
    const Token &first = next();
    n->quasis.push_back(first.text);
    if (first.template_part == TemplatePart::NoSubstitution)
      return n;
    if (first.template_part != TemplatePart::Head)
      fail("unexpected template continuation");
    for (;;) {
      n->kids.push_back(expression(false));
      if (cur().type != TokenType::Template ||
          (cur().template_part != TemplatePart::Middle && cur().template_part != TemplatePart::Tail))
        fail("expected '}' in template literal");
      const Token &part = next();
      n->quasis.push_back(part.text);
      if (part.template_part == TemplatePart::Tail)
        return n;
    }
  }

  NodePtr primary() {
    const Token &t = cur();
    switch (t.type) {
    case TokenType::Number: {
      auto n = make(Kind::Literal, t);
      n->text = next().text;
      return n;
    }
    case TokenType::String: {
      auto n = make(Kind::String, t);
      n->text = next().text;
      return n;
    }
    case TokenType::Regex: {
      auto n = make(Kind::Regex, t);
      n->text = next().text;
      return n;
    }
    case TokenType::Template: return template_literal();
    case TokenType::PrivateName: {
      auto n = make(Kind::Identifier, t);
      n->text = next().text;
      return n;
    }
    case TokenType::End: fail("unexpected end of input");
    case TokenType::Punctuator: break;
    case TokenType::Identifier: {
      const std::string &w = t.text;
      if (w == "function")
        return function(false, false);
      if (w == "async" && peek().ident("function") && !peek().newline_before) {
        next();
        return function(false, true);
      }
      if (w == "class")
        return class_(false);
      if (w == "this") {
        next();
        return make(Kind::This, t);
      }
      if (w == "super") {
        next();
        return make(Kind::Super, t);
      }
      if (w == "true" || w == "false" || w == "null") {
        auto n = make(Kind::Literal, t);
        n->text = next().text;
        return n;
      }
      if (w == "import") {
        auto n = make(Kind::Identifier, t);
        n->text = next().text;
        return n;
      }
      if (kReserved.contains(w))
        fail("unexpected keyword");
      auto n = make(Kind::Identifier, t);
      n->text = next().text;
      return n;
    }
    }
    if (t.punct("(")) {
      next();
      auto e = expression(false);
      expect(")");
      return e;
    }
    if (t.punct("["))
      return array_literal();
    if (t.punct("{"))
      return object_literal();
    fail("unexpected token");
  }

  NodePtr array_literal() {
    auto n = make(Kind::Array, cur());
    next();
    while (!eat("]")) {
      if (at(",")) {
        n->kids.push_back(make(Kind::Elision, cur()));
        next();
        continue;
      }
      if (at("...")) {
        auto s = make(Kind::Spread, cur());
        next();
        s->kids.push_back(assignment(false));
        n->kids.push_back(std::move(s));
      } else {
        n->kids.push_back(assignment(false));
      }
      if (!at("]"))
        expect(",");
    }
    return n;
  }

  NodePtr object_literal() {
    auto n = make(Kind::Object, cur());
    next();
    while (!eat("}")) {
      if (cur().type == TokenType::End)
        fail("expected '}'");
      const Token &start = cur();
      std::string doc = start.doc;
      if (at("...")) {
        auto s = make(Kind::Spread, start);
        next();
        s->kids.push_back(assignment(false));
        n->kids.push_back(std::move(s));
        if (!at("}"))
          expect(",");
        continue;
      }
      auto p = make(Kind::Property, start);
      unsigned fn_flags = 0;
      if (at_ident("async") && starts_property_key(peek()) && !peek().newline_before) {
        next();
        fn_flags |= kAsync;
      }
      if (eat("*"))
        fn_flags |= kGenerator;
      if ((at_ident("get") || at_ident("set")) && starts_property_key(peek())) {
        p->flags |= at_ident("get") ? kGetter : kSetter;
        next();
      }
      bool plain = is_identifier_token(cur());
      NodePtr computed;
      property_key(*p, computed);
      if (at("(")) {
        p->flags |= kMethod;
        auto fn = method_function(start, p->text, fn_flags | kMethod);
        fn->doc = doc;
        p->kids.push_back(std::move(fn));
      } else if (eat(":")) {
        auto value = assignment(false);
        if ((value->kind == Kind::Function || value->kind == Kind::Class) && value->doc.empty())
          value->doc = doc;
        p->kids.push_back(std::move(value));
      } else {
        if (!plain || fn_flags || p->has(kGetter) || p->has(kSetter))
          fail("expected ':'");
        p->flags |= kShorthand;
        auto id = std::make_unique<Node>(Kind::Identifier, p->line, p->column);
        id->text = p->text;
        if (at("=")) {
          // Only valid once the literal is reinterpreted as a pattern.
          auto ap = make(Kind::AssignPattern, cur());
          next();
          ap->kids.push_back(std::move(id));
          ap->kids.push_back(assignment(false));
          p->kids.push_back(std::move(ap));
        } else {
          p->kids.push_back(std::move(id));
        }
      }
      p->kids.push_back(std::move(computed));
      n->kids.push_back(std::move(p));
      if (!at("}"))
        expect(",");
    }
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace

NodePtr parse_module(std::string_view source) { return Parser(tokenize(source)).program(); }

} // namespace nlflow::js
