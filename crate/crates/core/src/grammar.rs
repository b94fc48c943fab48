//! The embedded C11 grammar and the semantic actions that build the AST.
//!
//! Each rule is `lhs: rhs` with whitespace-separated symbols. A symbol is a
//! nonterminal iff it appears as some rule's left-hand side; everything else
//! is a terminal, spelled as the keyword or punctuator text or one of the
//! token classes `IDENTIFIER`, `TYPEDEF_NAME`, `I_CONSTANT`, `F_CONSTANT`,
//! `C_CONSTANT`, `STRING_LITERAL`. `%expr` is an internal marker selecting
//! the expression entry point.
//!
//! Rules tagged monadic are exactly those whose action touches the
//! environment: scope open/close and the naming of declared entities.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::ast::*;
use crate::diag::Diagnostic;
use crate::env::{Binding, BindingKind, Declared, Env, EnvOp, ScopeKind};
use crate::lalr::{self, Production, Sym, SymGrammar, Tables};
use crate::lexer::{Token, TokenKind};
use crate::source::{FileId, Range};

pub(crate) type ActionFn = fn(&mut Builder, &mut Kids) -> Sem;

pub(crate) struct RuleDef {
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub action: ActionFn,
    pub monadic: bool,
}

macro_rules! rules {
    ($($lhs:literal : $rhs:literal => $act:ident $(, $m:ident)?;)*) => {
        &[$(RuleDef { lhs: $lhs, rhs: $rhs, action: $act, monadic: rules!(@m $($m)?) }),*]
    };
    (@m) => { false };
    (@m monadic) => { true };
}

pub(crate) const START: &str = "$accept";
pub const EXPR_MARKER: &str = "%expr";

#[rustfmt::skip]
pub(crate) static RULES: &[RuleDef] = rules! {
    "$accept": "translation_unit" => pass;
    "$accept": "%expr expression" => second;

    "translation_unit": "external_declaration" => tu_first;
    "translation_unit": "translation_unit external_declaration" => tu_push;
    "external_declaration": "function_definition" => pass;
    "external_declaration": "declaration" => ext_decl;
    "function_head": "declaration_specifiers declarator" => fn_head, monadic;
    "function_definition": "function_head compound_statement" => fn_def, monadic;

    "declaration": "declaration_specifiers ;" => decl_bare;
    "declaration": "init_declarator_list ;" => decl_list;
    "declaration": "static_assert_declaration" => pass;
    "declarator_head": "declaration_specifiers declarator" => dh_first, monadic;
    "declarator_head": "init_declarator_list , declarator" => dh_next, monadic;
    "init_declarator_list": "declarator_head" => pass;
    "init_declarator_list": "declarator_head = initializer" => idl_init;

    "declaration_specifiers": "storage_class_specifier declaration_specifiers" => specs_cons;
    "declaration_specifiers": "storage_class_specifier" => specs_one;
    "declaration_specifiers": "type_specifier declaration_specifiers" => specs_cons;
    "declaration_specifiers": "type_specifier" => specs_one;
    "declaration_specifiers": "type_qualifier declaration_specifiers" => specs_cons;
    "declaration_specifiers": "type_qualifier" => specs_one;
    "declaration_specifiers": "function_specifier declaration_specifiers" => specs_cons;
    "declaration_specifiers": "function_specifier" => specs_one;

    "storage_class_specifier": "typedef" => storage;
    "storage_class_specifier": "extern" => storage;
    "storage_class_specifier": "static" => storage;
    "storage_class_specifier": "_Thread_local" => storage;
    "storage_class_specifier": "auto" => storage;
    "storage_class_specifier": "register" => storage;

    "type_specifier": "void" => basic_type;
    "type_specifier": "char" => basic_type;
    "type_specifier": "short" => basic_type;
    "type_specifier": "int" => basic_type;
    "type_specifier": "long" => basic_type;
    "type_specifier": "float" => basic_type;
    "type_specifier": "double" => basic_type;
    "type_specifier": "signed" => basic_type;
    "type_specifier": "unsigned" => basic_type;
    "type_specifier": "_Bool" => basic_type;
    "type_specifier": "_Complex" => basic_type;
    "type_specifier": "_Imaginary" => basic_type;
    "type_specifier": "struct_or_union_specifier" => pass;
    "type_specifier": "enum_specifier" => pass;
    "type_specifier": "TYPEDEF_NAME" => typedef_type;

    "struct_or_union_specifier": "struct_or_union { struct_declaration_list }" => su_anon;
    "struct_or_union_specifier": "struct_tag_open struct_declaration_list }" => su_named;
    "struct_or_union_specifier": "struct_or_union IDENTIFIER" => su_ref, monadic;
    "struct_tag_open": "struct_or_union IDENTIFIER {" => su_open, monadic;
    "struct_or_union": "struct" => su_kind;
    "struct_or_union": "union" => su_kind;
    "struct_declaration_list": "struct_declaration" => list_first;
    "struct_declaration_list": "struct_declaration_list struct_declaration" => list_push;
    "struct_declaration": "specifier_qualifier_list ;" => sdecl_bare;
    "struct_declaration": "specifier_qualifier_list struct_declarator_list ;" => sdecl;
    "struct_declaration": "static_assert_declaration" => sdecl_assert;
    "specifier_qualifier_list": "type_specifier specifier_qualifier_list" => specs_cons;
    "specifier_qualifier_list": "type_specifier" => specs_one;
    "specifier_qualifier_list": "type_qualifier specifier_qualifier_list" => specs_cons;
    "specifier_qualifier_list": "type_qualifier" => specs_one;
    "struct_declarator_list": "struct_declarator" => list_first;
    "struct_declarator_list": "struct_declarator_list , struct_declarator" => list_push_sep;
    "struct_declarator": ": constant_expression" => sdeclr_width;
    "struct_declarator": "declarator : constant_expression" => sdeclr_named_width;
    "struct_declarator": "declarator" => sdeclr;

    "enum_specifier": "enum { enumerator_list }" => enum_anon;
    "enum_specifier": "enum { enumerator_list , }" => enum_anon;
    "enum_specifier": "enum_tag_open enumerator_list }" => enum_named;
    "enum_specifier": "enum_tag_open enumerator_list , }" => enum_named;
    "enum_specifier": "enum IDENTIFIER" => enum_ref, monadic;
    "enum_tag_open": "enum IDENTIFIER {" => enum_open, monadic;
    "enumerator_list": "enumerator" => list_first;
    "enumerator_list": "enumerator_list , enumerator" => list_push_sep;
    "enumerator": "IDENTIFIER = constant_expression" => enumerator, monadic;
    "enumerator": "IDENTIFIER" => enumerator, monadic;

    "type_qualifier": "const" => qual;
    "type_qualifier": "restrict" => qual;
    "type_qualifier": "volatile" => qual;
    "function_specifier": "inline" => func_spec;
    "function_specifier": "_Noreturn" => func_spec;

    "declarator": "pointer direct_declarator" => apply_pointer;
    "declarator": "direct_declarator" => pass;
    "direct_declarator": "IDENTIFIER" => dd_ident;
    "direct_declarator": "( declarator )" => second;
    "direct_declarator": "direct_declarator [ ]" => dd_array;
    "direct_declarator": "direct_declarator [ * ]" => dd_array;
    "direct_declarator": "direct_declarator [ static type_qualifier_list assignment_expression ]" => dd_array;
    "direct_declarator": "direct_declarator [ static assignment_expression ]" => dd_array;
    "direct_declarator": "direct_declarator [ type_qualifier_list * ]" => dd_array;
    "direct_declarator": "direct_declarator [ type_qualifier_list static assignment_expression ]" => dd_array;
    "direct_declarator": "direct_declarator [ type_qualifier_list assignment_expression ]" => dd_array;
    "direct_declarator": "direct_declarator [ type_qualifier_list ]" => dd_array;
    "direct_declarator": "direct_declarator [ assignment_expression ]" => dd_array;
    "direct_declarator": "direct_declarator ( parameter_type_list )" => dd_func;
    "direct_declarator": "direct_declarator ( )" => dd_func;
    "direct_declarator": "direct_declarator ( identifier_list )" => dd_knr;
    "pointer": "* type_qualifier_list pointer" => ptr;
    "pointer": "* type_qualifier_list" => ptr;
    "pointer": "* pointer" => ptr;
    "pointer": "*" => ptr;
    "type_qualifier_list": "type_qualifier" => quals_first;
    "type_qualifier_list": "type_qualifier_list type_qualifier" => quals_push;
    "parameter_type_list": "parameter_list , ..." => params_variadic;
    "parameter_type_list": "parameter_list" => params_fixed;
    "parameter_list": "parameter_declaration" => list_first;
    "parameter_list": "parameter_list , parameter_declaration" => list_push_sep;
    "parameter_declaration": "declaration_specifiers declarator" => param;
    "parameter_declaration": "declaration_specifiers abstract_declarator" => param;
    "parameter_declaration": "declaration_specifiers" => param;
    "identifier_list": "IDENTIFIER" => idents_first;
    "identifier_list": "identifier_list , IDENTIFIER" => idents_push;
    "type_name": "specifier_qualifier_list abstract_declarator" => type_name;
    "type_name": "specifier_qualifier_list" => type_name;
    "abstract_declarator": "pointer direct_abstract_declarator" => apply_pointer;
    "abstract_declarator": "pointer" => apply_pointer;
    "abstract_declarator": "direct_abstract_declarator" => pass;
    "direct_abstract_declarator": "( abstract_declarator )" => second;
    "direct_abstract_declarator": "[ ]" => dd_array;
    "direct_abstract_declarator": "[ * ]" => dd_array;
    "direct_abstract_declarator": "[ static type_qualifier_list assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "[ static assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "[ type_qualifier_list static assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "[ type_qualifier_list assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "[ type_qualifier_list ]" => dd_array;
    "direct_abstract_declarator": "[ assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ * ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ static type_qualifier_list assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ static assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ type_qualifier_list assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ type_qualifier_list static assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ type_qualifier_list ]" => dd_array;
    "direct_abstract_declarator": "direct_abstract_declarator [ assignment_expression ]" => dd_array;
    "direct_abstract_declarator": "( )" => dd_func;
    "direct_abstract_declarator": "( parameter_type_list )" => dd_func;
    "direct_abstract_declarator": "direct_abstract_declarator ( )" => dd_func;
    "direct_abstract_declarator": "direct_abstract_declarator ( parameter_type_list )" => dd_func;

    "initializer": "{ initializer_list }" => init_list;
    "initializer": "{ initializer_list , }" => init_list;
    "initializer": "assignment_expression" => init_expr;
    "initializer_list": "designation initializer" => ilist_first;
    "initializer_list": "initializer" => ilist_first;
    "initializer_list": "initializer_list , designation initializer" => ilist_push;
    "initializer_list": "initializer_list , initializer" => ilist_push;
    "designation": "designator_list =" => pass;
    "designator_list": "designator" => pass;
    "designator_list": "designator_list designator" => designators_push;
    "designator": "[ constant_expression ]" => designator_index;
    "designator": ". IDENTIFIER" => designator_member;
    "static_assert_declaration": "_Static_assert ( constant_expression , STRING_LITERAL ) ;" => static_assert;

    "statement": "labeled_statement" => pass;
    "statement": "compound_statement" => pass;
    "statement": "expression_statement" => pass;
    "statement": "selection_statement" => pass;
    "statement": "iteration_statement" => pass;
    "statement": "jump_statement" => pass;
    "labeled_statement": "IDENTIFIER : statement" => labeled, monadic;
    "labeled_statement": "case constant_expression : statement" => case_stmt;
    "labeled_statement": "default : statement" => default_stmt;
    "compound_statement": "lbrace }" => compound, monadic;
    "compound_statement": "lbrace block_item_list }" => compound, monadic;
    "lbrace": "{" => open_block, monadic;
    "block_item_list": "block_item" => list_first;
    "block_item_list": "block_item_list block_item" => list_push;
    "block_item": "declaration" => item_decl;
    "block_item": "statement" => item_stmt;
    "expression_statement": ";" => expr_stmt;
    "expression_statement": "expression ;" => expr_stmt;
    "selection_statement": "if ( expression ) statement else statement" => if_stmt;
    "selection_statement": "if ( expression ) statement" => if_stmt;
    "selection_statement": "switch ( expression ) statement" => switch_stmt;
    "iteration_statement": "while ( expression ) statement" => while_stmt;
    "iteration_statement": "do statement while ( expression ) ;" => do_stmt;
    "iteration_statement": "for_start expression_statement expression_statement ) statement" => for_stmt, monadic;
    "iteration_statement": "for_start expression_statement expression_statement expression ) statement" => for_stmt, monadic;
    "iteration_statement": "for_start declaration expression_statement ) statement" => for_stmt, monadic;
    "iteration_statement": "for_start declaration expression_statement expression ) statement" => for_stmt, monadic;
    "for_start": "for (" => open_block, monadic;
    "jump_statement": "goto IDENTIFIER ;" => goto_stmt;
    "jump_statement": "continue ;" => continue_stmt;
    "jump_statement": "break ;" => break_stmt;
    "jump_statement": "return ;" => return_stmt;
    "jump_statement": "return expression ;" => return_stmt;

    "primary_expression": "IDENTIFIER" => ident_expr;
    "primary_expression": "I_CONSTANT" => int_lit;
    "primary_expression": "F_CONSTANT" => float_lit;
    "primary_expression": "C_CONSTANT" => char_lit;
    "primary_expression": "string" => pass;
    "primary_expression": "( expression )" => second;
    "string": "STRING_LITERAL" => str_first;
    "string": "string STRING_LITERAL" => str_push;
    "postfix_expression": "primary_expression" => pass;
    "postfix_expression": "postfix_expression [ expression ]" => index_expr;
    "postfix_expression": "postfix_expression ( )" => call_expr;
    "postfix_expression": "postfix_expression ( argument_expression_list )" => call_expr;
    "postfix_expression": "postfix_expression . IDENTIFIER" => member_expr;
    "postfix_expression": "postfix_expression -> IDENTIFIER" => member_expr;
    "postfix_expression": "postfix_expression ++" => post_incdec;
    "postfix_expression": "postfix_expression --" => post_incdec;
    "postfix_expression": "( type_name ) { initializer_list }" => compound_lit;
    "postfix_expression": "( type_name ) { initializer_list , }" => compound_lit;
    "argument_expression_list": "assignment_expression" => list_first;
    "argument_expression_list": "argument_expression_list , assignment_expression" => list_push_sep;
    "unary_expression": "postfix_expression" => pass;
    "unary_expression": "++ unary_expression" => pre_incdec;
    "unary_expression": "-- unary_expression" => pre_incdec;
    "unary_expression": "unary_operator cast_expression" => unary;
    "unary_expression": "sizeof unary_expression" => sizeof_expr;
    "unary_expression": "sizeof ( type_name )" => sizeof_type;
    "unary_expression": "_Alignof ( type_name )" => alignof_type;
    "unary_operator": "&" => unop;
    "unary_operator": "*" => unop;
    "unary_operator": "+" => unop;
    "unary_operator": "-" => unop;
    "unary_operator": "~" => unop;
    "unary_operator": "!" => unop;
    "cast_expression": "unary_expression" => pass;
    "cast_expression": "( type_name ) cast_expression" => cast;
    "multiplicative_expression": "cast_expression" => pass;
    "multiplicative_expression": "multiplicative_expression * cast_expression" => binary;
    "multiplicative_expression": "multiplicative_expression / cast_expression" => binary;
    "multiplicative_expression": "multiplicative_expression % cast_expression" => binary;
    "additive_expression": "multiplicative_expression" => pass;
    "additive_expression": "additive_expression + multiplicative_expression" => binary;
    "additive_expression": "additive_expression - multiplicative_expression" => binary;
    "shift_expression": "additive_expression" => pass;
    "shift_expression": "shift_expression << additive_expression" => binary;
    "shift_expression": "shift_expression >> additive_expression" => binary;
    "relational_expression": "shift_expression" => pass;
    "relational_expression": "relational_expression < shift_expression" => binary;
    "relational_expression": "relational_expression > shift_expression" => binary;
    "relational_expression": "relational_expression <= shift_expression" => binary;
    "relational_expression": "relational_expression >= shift_expression" => binary;
    "equality_expression": "relational_expression" => pass;
    "equality_expression": "equality_expression == relational_expression" => binary;
    "equality_expression": "equality_expression != relational_expression" => binary;
    "and_expression": "equality_expression" => pass;
    "and_expression": "and_expression & equality_expression" => binary;
    "exclusive_or_expression": "and_expression" => pass;
    "exclusive_or_expression": "exclusive_or_expression ^ and_expression" => binary;
    "inclusive_or_expression": "exclusive_or_expression" => pass;
    "inclusive_or_expression": "inclusive_or_expression | exclusive_or_expression" => binary;
    "logical_and_expression": "inclusive_or_expression" => pass;
    "logical_and_expression": "logical_and_expression && inclusive_or_expression" => binary;
    "logical_or_expression": "logical_and_expression" => pass;
    "logical_or_expression": "logical_or_expression || logical_and_expression" => binary;
    "conditional_expression": "logical_or_expression" => pass;
    "conditional_expression": "logical_or_expression ? expression : conditional_expression" => cond_expr;
    "assignment_expression": "conditional_expression" => pass;
    "assignment_expression": "unary_expression assignment_operator assignment_expression" => assign_expr;
    "assignment_operator": "=" => assign_op;
    "assignment_operator": "*=" => assign_op;
    "assignment_operator": "/=" => assign_op;
    "assignment_operator": "%=" => assign_op;
    "assignment_operator": "+=" => assign_op;
    "assignment_operator": "-=" => assign_op;
    "assignment_operator": "<<=" => assign_op;
    "assignment_operator": ">>=" => assign_op;
    "assignment_operator": "&=" => assign_op;
    "assignment_operator": "^=" => assign_op;
    "assignment_operator": "|=" => assign_op;
    "expression": "assignment_expression" => pass;
    "expression": "expression , assignment_expression" => comma_expr;
    "constant_expression": "conditional_expression" => pass;
};

/// A grammar rule as exposed to wrappers, navigation and dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

#[derive(Debug, Clone)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: &'static str,
    pub rhs: Vec<&'static str>,
    pub monadic: bool,
}

impl Rule {
    pub fn arity(&self) -> usize {
        self.rhs.len()
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs.join(" "))
    }
}

/// The compiled grammar: symbol tables plus LALR(1) tables.
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub terminals: Vec<&'static str>,
    pub nonterminals: Vec<&'static str>,
    term_ids: HashMap<&'static str, u16>,
    nt_ids: HashMap<&'static str, u16>,
    pub(crate) lhs_ids: Vec<u16>,
    pub tables: Tables,
    pub eof: u16,
}

/// The process-wide grammar, built on first use.
pub fn grammar() -> &'static Grammar {
    static G: OnceLock<Grammar> = OnceLock::new();
    G.get_or_init(Grammar::build)
}

impl Grammar {
    fn build() -> Grammar {
        let mut nonterminals: Vec<&'static str> = Vec::new();
        let mut nt_ids = HashMap::new();
        for r in RULES {
            if !nt_ids.contains_key(r.lhs) {
                nt_ids.insert(r.lhs, nonterminals.len() as u16);
                nonterminals.push(r.lhs);
            }
        }
        let mut terminals: Vec<&'static str> = vec!["$end"];
        let mut term_ids = HashMap::from([("$end", 0u16)]);
        let mut rules = Vec::new();
        let mut prods = Vec::new();
        for (i, r) in RULES.iter().enumerate() {
            let rhs: Vec<&'static str> = r.rhs.split_whitespace().collect();
            let syms = rhs
                .iter()
                .map(|s| match nt_ids.get(s) {
                    Some(&n) => Sym::N(n),
                    None => {
                        let next = terminals.len() as u16;
                        let id = *term_ids.entry(*s).or_insert(next);
                        if id == next {
                            terminals.push(s);
                        }
                        Sym::T(id)
                    }
                })
                .collect();
            prods.push(Production {
                lhs: nt_ids[r.lhs],
                rhs: syms,
            });
            rules.push(Rule {
                id: RuleId(i as u32),
                lhs: r.lhs,
                rhs,
                monadic: r.monadic,
            });
        }
        let sg = SymGrammar {
            n_terminals: terminals.len(),
            n_nonterminals: nonterminals.len(),
            rules: prods,
            start: nt_ids[START],
            eof: 0,
        };
        let tables = lalr::build_tables(&sg);
        Grammar {
            lhs_ids: sg.rules.iter().map(|p| p.lhs).collect(),
            rules,
            terminals,
            nonterminals,
            term_ids,
            nt_ids,
            tables,
            eof: 0,
        }
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id.0 as usize]
    }

    /// Finds a rule by its text, e.g. `("primary_expression", "IDENTIFIER")`.
    pub fn find_rule(&self, lhs: &str, rhs: &str) -> Option<RuleId> {
        let want: Vec<&str> = rhs.split_whitespace().collect();
        self.rules
            .iter()
            .find(|r| r.lhs == lhs && r.rhs == want)
            .map(|r| r.id)
    }

    pub fn rules_for(&self, lhs: &str) -> impl Iterator<Item = &Rule> + '_ {
        let lhs = lhs.to_string();
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    pub fn terminal(&self, name: &str) -> Option<u16> {
        self.term_ids.get(name).copied()
    }

    pub fn nonterminal(&self, name: &str) -> Option<u16> {
        self.nt_ids.get(name).copied()
    }

    pub(crate) fn action_of(&self, id: RuleId) -> ActionFn {
        RULES[id.0 as usize].action
    }

    /// Terminal for a token, before typedef classification.
    pub fn token_terminal(&self, t: &Token) -> Option<u16> {
        let name = match t.kind {
            TokenKind::Keyword(k) => k,
            TokenKind::Punct(p) => p,
            TokenKind::Identifier => "IDENTIFIER",
            TokenKind::IntLit => "I_CONSTANT",
            TokenKind::FloatLit => "F_CONSTANT",
            TokenKind::CharLit => "C_CONSTANT",
            TokenKind::StringLit => "STRING_LITERAL",
        };
        self.terminal(name)
    }
}

// ---------------------------------------------------------------------------
// Semantic values

#[derive(Debug)]
pub(crate) enum Sem {
    None,
    Tok(usize),
    Unit(TranslationUnit),
    Ext(ExternalDecl),
    FnHead(Vec<DeclSpec>, Declarator),
    Decl(Decl),
    DeclBuild(Vec<DeclSpec>, Vec<InitDeclarator>),
    Spec(DeclSpec),
    Specs(Vec<DeclSpec>),
    StructKind(StructKind),
    StructTag(StructKind, Ident),
    EnumTag(Ident),
    Declr(Declarator),
    Ptr(Vec<Vec<TypeQual>>),
    Quals(Vec<TypeQual>),
    Params(Vec<ParamDecl>, bool),
    Param(ParamDecl),
    Idents(Vec<Ident>),
    TypeName(TypeName),
    Init(Initializer),
    InitItems(Vec<InitItem>),
    Designators(Vec<Designator>),
    Stmt(Stmt),
    Item(BlockItem),
    Expr(Expr),
    UnOp(UnOp),
    AssignOp(AssignOp),
    Member(StructMember),
    SDeclr(StructDeclarator),
    Enumerator(Enumerator),
    List(Vec<Sem>),
}

pub(crate) struct Kid {
    pub sem: Sem,
    pub range: Range,
}

/// The matched right-hand side of a reduction.
pub(crate) struct Kids {
    pub v: Vec<Kid>,
    pub range: Range,
}

macro_rules! takers {
    ($($name:ident: $variant:ident => $ty:ty;)*) => {
        $(
            fn $name(&mut self, i: usize) -> $ty {
                match self.take(i) {
                    Sem::$variant(x) => x,
                    other => panic!(concat!("expected ", stringify!($variant), ", got {:?}"), other),
                }
            }
        )*
    };
}

impl Kids {
    fn len(&self) -> usize {
        self.v.len()
    }

    fn take(&mut self, i: usize) -> Sem {
        std::mem::replace(&mut self.v[i].sem, Sem::None)
    }

    fn tok(&self, i: usize) -> usize {
        match self.v[i].sem {
            Sem::Tok(t) => t,
            ref other => panic!("expected token, got {other:?}"),
        }
    }

    fn is_tok(&self, i: usize) -> bool {
        matches!(self.v[i].sem, Sem::Tok(_))
    }

    fn r(&self, i: usize) -> Range {
        self.v[i].range
    }

    takers! {
        expr: Expr => Expr;
        stmt: Stmt => Stmt;
        specs: Specs => Vec<DeclSpec>;
        declr: Declr => Declarator;
        type_name: TypeName => TypeName;
        init: Init => Initializer;
        list: List => Vec<Sem>;
        quals: Quals => Vec<TypeQual>;
    }
}

/// What an environment-touching action did, for wrappers to report on.
#[derive(Debug, Clone)]
pub enum EnvEvent {
    Declared {
        binding: Arc<Binding>,
        name_range: Range,
        file: FileId,
        shadows: Option<Arc<Binding>>,
    },
    Redeclared {
        binding: Arc<Binding>,
        name_range: Range,
        file: FileId,
    },
    Referenced {
        binding: Arc<Binding>,
        name_range: Range,
        file: FileId,
    },
    ScopePushed,
    ScopePopped,
}

/// Mutable state threaded through the semantic actions.
pub(crate) struct Builder<'t> {
    pub tokens: &'t [Token],
    pub env: Env,
    pub log: Vec<(u32, EnvOp)>,
    pub events: Vec<EnvEvent>,
    pub diagnostics: Vec<Diagnostic>,
    /// Index of the forest event being executed.
    pub event: u32,
    pub file: FileId,
    next_id: u32,
    pub node_events: Vec<(NodeId, u32)>,
}

impl<'t> Builder<'t> {
    pub fn new(tokens: &'t [Token], env: Env) -> Builder<'t> {
        Builder {
            tokens,
            env,
            log: Vec::new(),
            events: Vec::new(),
            diagnostics: Vec::new(),
            event: 0,
            file: FileId(0),
            next_id: 0,
            node_events: Vec::new(),
        }
    }

    fn text(&self, tok: usize) -> &'t str {
        &self.tokens[tok].text
    }

    fn ident(&self, tok: usize) -> Ident {
        Ident {
            name: self.tokens[tok].text.clone(),
            range: self.tokens[tok].range,
        }
    }

    fn id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.node_events.push((id, self.event));
        id
    }

    fn expr(&mut self, range: Range, kind: ExprKind) -> Sem {
        Sem::Expr(Expr {
            id: self.id(),
            range,
            kind,
        })
    }

    fn stmt(&mut self, range: Range, kind: StmtKind) -> Sem {
        Sem::Stmt(Stmt {
            id: self.id(),
            range,
            kind,
        })
    }

    fn error(&mut self, range: Range, msg: impl Into<String>) {
        let d = Diagnostic::error(range, msg).in_file(self.file);
        self.diagnostics.push(d);
    }

    pub fn push_scope(&mut self, kind: ScopeKind) {
        self.env.push_scope(kind);
        self.log.push((self.event, EnvOp::Push(kind)));
        self.events.push(EnvEvent::ScopePushed);
    }

    pub fn pop_scope(&mut self) {
        if self.env.pop_scope() {
            self.log.push((self.event, EnvOp::Pop));
            self.events.push(EnvEvent::ScopePopped);
        }
    }

    fn declare(&mut self, name: &Ident, kind: BindingKind, type_text: &str) {
        match self.env.declare(&name.name, kind, type_text, name.range, self.file) {
            Ok(Declared::New { binding, shadows }) => {
                self.log.push((self.event, EnvOp::Bind(binding.clone())));
                self.events.push(EnvEvent::Declared {
                    binding,
                    name_range: name.range,
                    file: self.file,
                    shadows,
                });
            }
            Ok(Declared::Existing(binding)) => self.events.push(EnvEvent::Redeclared {
                binding,
                name_range: name.range,
                file: self.file,
            }),
            Err(d) => self.diagnostics.push(d),
        }
    }

    fn reference_tag(&mut self, name: &Ident, type_text: &str) {
        match self.env.lookup_tag(&name.name).cloned() {
            Some(binding) => self.events.push(EnvEvent::Referenced {
                binding,
                name_range: name.range,
                file: self.file,
            }),
            None => self.declare(name, BindingKind::Tag, type_text),
        }
    }

    fn declare_declarator(&mut self, specs: &[DeclSpec], d: &Declarator) {
        let Some(name) = d.name() else { return };
        let kind = if specs.contains(&DeclSpec::Storage(StorageClass::Typedef)) {
            BindingKind::Typedef
        } else if d.is_function() {
            BindingKind::Function
        } else {
            BindingKind::Object
        };
        let ty = type_text(specs, d);
        let name = name.clone();
        self.declare(&name, kind, &ty);
    }
}

// ---------------------------------------------------------------------------
// Canonical type text

/// The base type words of a specifier list, e.g. `unsigned int` or
/// `struct s`.
pub fn base_type_text(specs: &[DeclSpec]) -> String {
    let mut words: Vec<String> = Vec::new();
    for s in specs {
        if let DeclSpec::Qual(q) = s {
            words.push(q.as_str().to_string());
        }
    }
    for s in specs {
        if let DeclSpec::Type(t) = s {
            words.push(match t {
                TypeSpec::Basic(b) => b.to_string(),
                TypeSpec::Struct(st) => {
                    let kw = match st.kind {
                        StructKind::Struct => "struct",
                        StructKind::Union => "union",
                    };
                    match &st.name {
                        Some(n) => format!("{kw} {}", n.name),
                        None => kw.to_string(),
                    }
                }
                TypeSpec::Enum(e) => match &e.name {
                    Some(n) => format!("enum {}", n.name),
                    None => "enum".to_string(),
                },
                TypeSpec::TypedefName(n) => n.name.clone(),
            });
        }
    }
    words.join(" ")
}

/// Canonical compact type text: `int`, `int*`, `int[10]`, `int(int,int)`,
/// `int(*)[3]`.
pub fn type_text(specs: &[DeclSpec], d: &Declarator) -> String {
    let mut chain = Vec::new();
    let mut cur = d;
    loop {
        match &cur.kind {
            DeclaratorKind::Name(_) | DeclaratorKind::Abstract => break,
            DeclaratorKind::Pointer { inner, .. }
            | DeclaratorKind::Array { inner, .. }
            | DeclaratorKind::Function { inner, .. }
            | DeclaratorKind::KnR { inner, .. } => {
                chain.push(cur);
                cur = inner;
            }
        }
    }
    // `chain` runs outermost node first; the node next to the name is the
    // outermost type constructor.
    let mut s = String::new();
    for node in chain.iter().rev() {
        match &node.kind {
            DeclaratorKind::Pointer { .. } => s.insert(0, '*'),
            DeclaratorKind::Array { size, .. } => {
                if s.starts_with('*') {
                    s = format!("({s})");
                }
                match size {
                    ArraySize::Expr(e) => s.push_str(&format!("[{}]", crate::pretty::expr(e))),
                    ArraySize::Star => s.push_str("[*]"),
                    ArraySize::Unspecified => s.push_str("[]"),
                }
            }
            DeclaratorKind::Function {
                params, variadic, ..
            } => {
                if s.starts_with('*') {
                    s = format!("({s})");
                }
                let mut ps: Vec<String> = params
                    .iter()
                    .map(|p| type_text(&p.specs, &p.declarator))
                    .collect();
                if *variadic {
                    ps.push("...".into());
                }
                s.push_str(&format!("({})", ps.join(",")));
            }
            DeclaratorKind::KnR { .. } => {
                if s.starts_with('*') {
                    s = format!("({s})");
                }
                s.push_str("()");
            }
            _ => unreachable!(),
        }
    }
    format!("{}{s}", base_type_text(specs))
}

// ---------------------------------------------------------------------------
// Actions

fn pass(_: &mut Builder, k: &mut Kids) -> Sem {
    k.take(0)
}

fn second(_: &mut Builder, k: &mut Kids) -> Sem {
    k.take(1)
}

fn list_first(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::List(vec![k.take(0)])
}

fn list_push(_: &mut Builder, k: &mut Kids) -> Sem {
    let mut l = k.list(0);
    l.push(k.take(1));
    Sem::List(l)
}

fn list_push_sep(_: &mut Builder, k: &mut Kids) -> Sem {
    let mut l = k.list(0);
    l.push(k.take(2));
    Sem::List(l)
}

fn tu_first(_: &mut Builder, k: &mut Kids) -> Sem {
    let item = ext_of(k.take(0));
    Sem::Unit(TranslationUnit { items: vec![item] })
}

fn tu_push(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::Unit(mut tu) = k.take(0) else { unreachable!() };
    tu.items.push(ext_of(k.take(1)));
    Sem::Unit(tu)
}

fn ext_of(s: Sem) -> ExternalDecl {
    match s {
        Sem::Ext(e) => e,
        Sem::Decl(d) => ExternalDecl::Decl(d),
        other => panic!("expected external declaration, got {other:?}"),
    }
}

fn ext_decl(_: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(0) {
        Sem::Decl(d) => Sem::Ext(ExternalDecl::Decl(d)),
        other => panic!("{other:?}"),
    }
}

fn fn_head(b: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    let d = k.declr(1);
    if d.function_params().is_none() {
        b.error(k.r(1), "function definition requires a function declarator");
    }
    b.declare_declarator(&specs, &d);
    b.push_scope(ScopeKind::Function);
    if let Some((params, _)) = d.function_params() {
        for p in params {
            if let Some(name) = p.declarator.name() {
                let ty = type_text(&p.specs, &p.declarator);
                let name = name.clone();
                b.declare(&name, BindingKind::Param, &ty);
            }
        }
    }
    Sem::FnHead(specs, d)
}

fn fn_def(b: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::FnHead(specs, declarator) = k.take(0) else { unreachable!() };
    let body = k.stmt(1);
    b.pop_scope();
    Sem::Ext(ExternalDecl::Function(FunctionDef {
        id: b.id(),
        range: k.range,
        specs,
        declarator,
        body,
    }))
}

fn decl_bare(b: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    Sem::Decl(Decl {
        id: b.id(),
        range: k.range,
        kind: DeclKind::Var {
            specs,
            items: Vec::new(),
        },
    })
}

fn decl_list(b: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::DeclBuild(specs, items) = k.take(0) else { unreachable!() };
    Sem::Decl(Decl {
        id: b.id(),
        range: k.range,
        kind: DeclKind::Var { specs, items },
    })
}

fn dh_first(b: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    let d = k.declr(1);
    b.declare_declarator(&specs, &d);
    Sem::DeclBuild(
        specs,
        vec![InitDeclarator {
            declarator: d,
            init: None,
        }],
    )
}

fn dh_next(b: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::DeclBuild(specs, mut items) = k.take(0) else { unreachable!() };
    let d = k.declr(2);
    b.declare_declarator(&specs, &d);
    items.push(InitDeclarator {
        declarator: d,
        init: None,
    });
    Sem::DeclBuild(specs, items)
}

fn idl_init(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::DeclBuild(specs, mut items) = k.take(0) else { unreachable!() };
    items.last_mut().unwrap().init = Some(k.init(2));
    Sem::DeclBuild(specs, items)
}

fn specs_one(_: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(0) {
        Sem::Spec(s) => Sem::Specs(vec![s]),
        other => panic!("{other:?}"),
    }
}

fn specs_cons(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::Spec(s) = k.take(0) else { unreachable!() };
    let mut rest = k.specs(1);
    rest.insert(0, s);
    Sem::Specs(rest)
}

fn storage(b: &mut Builder, k: &mut Kids) -> Sem {
    let sc = match b.text(k.tok(0)) {
        "typedef" => StorageClass::Typedef,
        "extern" => StorageClass::Extern,
        "static" => StorageClass::Static,
        "_Thread_local" => StorageClass::ThreadLocal,
        "auto" => StorageClass::Auto,
        _ => StorageClass::Register,
    };
    Sem::Spec(DeclSpec::Storage(sc))
}

fn basic_type(b: &mut Builder, k: &mut Kids) -> Sem {
    let TokenKind::Keyword(kw) = b.tokens[k.tok(0)].kind else { unreachable!() };
    Sem::Spec(DeclSpec::Type(TypeSpec::Basic(kw)))
}

fn typedef_type(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Spec(DeclSpec::Type(TypeSpec::TypedefName(b.ident(k.tok(0)))))
}

macro_rules! unwrap_all {
    ($list:expr, $variant:ident) => {
        $list
            .into_iter()
            .map(|s| match s {
                Sem::$variant(x) => x,
                other => panic!(concat!("expected ", stringify!($variant), ", got {:?}"), other),
            })
            .collect::<Vec<_>>()
    };
}

impl Builder<'_> {
    fn punct(&self, tok: usize) -> &'static str {
        match self.tokens[tok].kind {
            TokenKind::Punct(p) | TokenKind::Keyword(p) => p,
            _ => unreachable!("not a punctuator"),
        }
    }
}

fn su_kind(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::StructKind(if b.text(k.tok(0)) == "struct" {
        StructKind::Struct
    } else {
        StructKind::Union
    })
}

fn struct_kw(kind: StructKind) -> &'static str {
    match kind {
        StructKind::Struct => "struct",
        StructKind::Union => "union",
    }
}

fn take_struct_kind(k: &mut Kids, i: usize) -> StructKind {
    match k.take(i) {
        Sem::StructKind(s) => s,
        other => panic!("{other:?}"),
    }
}

fn su_anon(_: &mut Builder, k: &mut Kids) -> Sem {
    let kind = take_struct_kind(k, 0);
    let members = unwrap_all!(k.list(2), Member);
    Sem::Spec(DeclSpec::Type(TypeSpec::Struct(StructSpec {
        kind,
        name: None,
        members: Some(members),
    })))
}

fn su_named(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::StructTag(kind, name) = k.take(0) else { unreachable!() };
    let members = unwrap_all!(k.list(1), Member);
    Sem::Spec(DeclSpec::Type(TypeSpec::Struct(StructSpec {
        kind,
        name: Some(name),
        members: Some(members),
    })))
}

fn su_ref(b: &mut Builder, k: &mut Kids) -> Sem {
    let kind = take_struct_kind(k, 0);
    let name = b.ident(k.tok(1));
    b.reference_tag(&name, &format!("{} {}", struct_kw(kind), name.name));
    Sem::Spec(DeclSpec::Type(TypeSpec::Struct(StructSpec {
        kind,
        name: Some(name),
        members: None,
    })))
}

fn su_open(b: &mut Builder, k: &mut Kids) -> Sem {
    let kind = take_struct_kind(k, 0);
    let name = b.ident(k.tok(1));
    b.declare(&name, BindingKind::Tag, &format!("{} {}", struct_kw(kind), name.name));
    Sem::StructTag(kind, name)
}

fn sdecl_bare(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Member(StructMember::Field {
        specs: k.specs(0),
        declarators: Vec::new(),
    })
}

fn sdecl(_: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    let declarators = unwrap_all!(k.list(1), SDeclr);
    Sem::Member(StructMember::Field { specs, declarators })
}

fn sdecl_assert(_: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(0) {
        Sem::Decl(Decl {
            kind: DeclKind::StaticAssert { cond, message },
            ..
        }) => Sem::Member(StructMember::StaticAssert { cond, message }),
        other => panic!("{other:?}"),
    }
}

fn check_width(b: &mut Builder, w: &Expr) {
    if !matches!(w.kind, ExprKind::IntLit(_)) {
        b.error(w.range, "unsupported construct: non-constant bit-field width");
    }
}

fn sdeclr_width(b: &mut Builder, k: &mut Kids) -> Sem {
    let w = k.expr(1);
    check_width(b, &w);
    Sem::SDeclr(StructDeclarator {
        declarator: None,
        width: Some(w),
    })
}

fn sdeclr_named_width(b: &mut Builder, k: &mut Kids) -> Sem {
    let d = k.declr(0);
    let w = k.expr(2);
    check_width(b, &w);
    Sem::SDeclr(StructDeclarator {
        declarator: Some(d),
        width: Some(w),
    })
}

fn sdeclr(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::SDeclr(StructDeclarator {
        declarator: Some(k.declr(0)),
        width: None,
    })
}

fn enum_anon(_: &mut Builder, k: &mut Kids) -> Sem {
    let enumerators = unwrap_all!(k.list(2), Enumerator);
    Sem::Spec(DeclSpec::Type(TypeSpec::Enum(EnumSpec {
        name: None,
        enumerators: Some(enumerators),
    })))
}

fn enum_named(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::EnumTag(name) = k.take(0) else { unreachable!() };
    let enumerators = unwrap_all!(k.list(1), Enumerator);
    Sem::Spec(DeclSpec::Type(TypeSpec::Enum(EnumSpec {
        name: Some(name),
        enumerators: Some(enumerators),
    })))
}

fn enum_ref(b: &mut Builder, k: &mut Kids) -> Sem {
    let name = b.ident(k.tok(1));
    b.reference_tag(&name, &format!("enum {}", name.name));
    Sem::Spec(DeclSpec::Type(TypeSpec::Enum(EnumSpec {
        name: Some(name),
        enumerators: None,
    })))
}

fn enum_open(b: &mut Builder, k: &mut Kids) -> Sem {
    let name = b.ident(k.tok(1));
    b.declare(&name, BindingKind::Tag, &format!("enum {}", name.name));
    Sem::EnumTag(name)
}

fn enumerator(b: &mut Builder, k: &mut Kids) -> Sem {
    let name = b.ident(k.tok(0));
    let value = (k.len() == 3).then(|| k.expr(2));
    b.declare(&name, BindingKind::EnumConst, "int");
    Sem::Enumerator(Enumerator { name, value })
}

fn qual(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Spec(DeclSpec::Qual(qual_of(b.text(k.tok(0)))))
}

fn qual_of(text: &str) -> TypeQual {
    match text {
        "const" => TypeQual::Const,
        "restrict" => TypeQual::Restrict,
        _ => TypeQual::Volatile,
    }
}

fn func_spec(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Spec(DeclSpec::Func(if b.text(k.tok(0)) == "inline" {
        FuncSpec::Inline
    } else {
        FuncSpec::Noreturn
    }))
}

fn apply_pointer(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::Ptr(levels) = k.take(0) else { unreachable!() };
    let mut d = if k.len() == 2 {
        k.declr(1)
    } else {
        Declarator::abstract_()
    };
    for quals in levels.into_iter().rev() {
        d = Declarator {
            range: Some(k.range),
            kind: DeclaratorKind::Pointer {
                quals,
                inner: Box::new(d),
            },
        };
    }
    Sem::Declr(d)
}

fn dd_ident(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Declr(Declarator {
        range: Some(k.range),
        kind: DeclaratorKind::Name(b.ident(k.tok(0))),
    })
}

/// Leading declarator of a direct (abstract) declarator suffix rule, and
/// the index of the opening bracket.
fn suffix_base(k: &mut Kids) -> (Declarator, usize) {
    if k.is_tok(0) {
        (Declarator::abstract_(), 0)
    } else {
        (k.declr(0), 1)
    }
}

fn dd_array(b: &mut Builder, k: &mut Kids) -> Sem {
    let (inner, open) = suffix_base(k);
    let mut quals = Vec::new();
    let mut is_static = false;
    let mut size = ArraySize::Unspecified;
    for i in open + 1..k.len() - 1 {
        match k.take(i) {
            Sem::Tok(t) if b.text(t) == "static" => is_static = true,
            Sem::Tok(_) => size = ArraySize::Star,
            Sem::Quals(q) => quals = q,
            Sem::Expr(e) => size = ArraySize::Expr(Box::new(e)),
            other => panic!("{other:?}"),
        }
    }
    Sem::Declr(Declarator {
        range: Some(k.range),
        kind: DeclaratorKind::Array {
            inner: Box::new(inner),
            quals,
            is_static,
            size,
        },
    })
}

fn dd_func(_: &mut Builder, k: &mut Kids) -> Sem {
    let (inner, open) = suffix_base(k);
    let (params, variadic) = match k.take(open + 1) {
        Sem::Params(p, v) => (p, v),
        _ => (Vec::new(), false),
    };
    Sem::Declr(Declarator {
        range: Some(k.range),
        kind: DeclaratorKind::Function {
            inner: Box::new(inner),
            params,
            variadic,
        },
    })
}

fn dd_knr(b: &mut Builder, k: &mut Kids) -> Sem {
    let inner = k.declr(0);
    let Sem::Idents(names) = k.take(2) else { unreachable!() };
    b.error(k.range, "unsupported construct: K&R-style parameter list");
    Sem::Declr(Declarator {
        range: Some(k.range),
        kind: DeclaratorKind::KnR {
            inner: Box::new(inner),
            names,
        },
    })
}

fn ptr(_: &mut Builder, k: &mut Kids) -> Sem {
    let mut quals = Vec::new();
    let mut rest = Vec::new();
    for i in 1..k.len() {
        match k.take(i) {
            Sem::Quals(q) => quals = q,
            Sem::Ptr(p) => rest = p,
            other => panic!("{other:?}"),
        }
    }
    let mut levels = vec![quals];
    levels.extend(rest);
    Sem::Ptr(levels)
}

fn quals_first(b: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(0) {
        Sem::Spec(DeclSpec::Qual(q)) => Sem::Quals(vec![q]),
        Sem::Tok(t) => Sem::Quals(vec![qual_of(b.text(t))]),
        other => panic!("{other:?}"),
    }
}

fn quals_push(_: &mut Builder, k: &mut Kids) -> Sem {
    let mut q = k.quals(0);
    if let Sem::Spec(DeclSpec::Qual(x)) = k.take(1) {
        q.push(x);
    }
    Sem::Quals(q)
}

fn params_variadic(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Params(unwrap_all!(k.list(0), Param), true)
}

fn params_fixed(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Params(unwrap_all!(k.list(0), Param), false)
}

fn param(_: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    let declarator = if k.len() == 2 {
        k.declr(1)
    } else {
        Declarator::abstract_()
    };
    Sem::Param(ParamDecl { specs, declarator })
}

fn idents_first(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Idents(vec![b.ident(k.tok(0))])
}

fn idents_push(b: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::Idents(mut v) = k.take(0) else { unreachable!() };
    v.push(b.ident(k.tok(2)));
    Sem::Idents(v)
}

fn type_name(_: &mut Builder, k: &mut Kids) -> Sem {
    let specs = k.specs(0);
    let declarator = if k.len() == 2 {
        k.declr(1)
    } else {
        Declarator::abstract_()
    };
    Sem::TypeName(TypeName { specs, declarator })
}

fn init_list(_: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(1) {
        Sem::InitItems(items) => Sem::Init(Initializer::List(items)),
        other => panic!("{other:?}"),
    }
}

fn init_expr(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Init(Initializer::Expr(k.expr(0)))
}

/// `designation? initializer` starting at kid `i`.
fn init_item(k: &mut Kids, i: usize) -> InitItem {
    if k.len() > i + 1 {
        let Sem::Designators(designators) = k.take(i) else { unreachable!() };
        InitItem {
            designators,
            init: k.init(i + 1),
        }
    } else {
        InitItem {
            designators: Vec::new(),
            init: k.init(i),
        }
    }
}

fn ilist_first(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::InitItems(vec![init_item(k, 0)])
}

fn ilist_push(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::InitItems(mut items) = k.take(0) else { unreachable!() };
    items.push(init_item(k, 2));
    Sem::InitItems(items)
}

fn designators_push(_: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::Designators(mut a) = k.take(0) else { unreachable!() };
    let Sem::Designators(b) = k.take(1) else { unreachable!() };
    a.extend(b);
    Sem::Designators(a)
}

fn designator_index(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Designators(vec![Designator::Index(k.expr(1))])
}

fn designator_member(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Designators(vec![Designator::Member(b.ident(k.tok(1)))])
}

fn static_assert(b: &mut Builder, k: &mut Kids) -> Sem {
    let cond = k.expr(2);
    let message = b.text(k.tok(4)).to_string();
    Sem::Decl(Decl {
        id: b.id(),
        range: k.range,
        kind: DeclKind::StaticAssert { cond, message },
    })
}

fn labeled(b: &mut Builder, k: &mut Kids) -> Sem {
    let label = b.ident(k.tok(0));
    let body = Box::new(k.stmt(2));
    b.declare(&label, BindingKind::Label, "");
    b.stmt(k.range, StmtKind::Labeled { label, body })
}

fn case_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let value = k.expr(1);
    let body = Box::new(k.stmt(3));
    b.stmt(k.range, StmtKind::Case { value, body })
}

fn default_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let body = Box::new(k.stmt(2));
    b.stmt(k.range, StmtKind::Default(body))
}

fn compound(b: &mut Builder, k: &mut Kids) -> Sem {
    let items = if k.len() == 3 {
        unwrap_all!(k.list(1), Item)
    } else {
        Vec::new()
    };
    b.pop_scope();
    b.stmt(k.range, StmtKind::Compound(items))
}

fn open_block(b: &mut Builder, _: &mut Kids) -> Sem {
    b.push_scope(ScopeKind::Block);
    Sem::None
}

fn item_decl(_: &mut Builder, k: &mut Kids) -> Sem {
    match k.take(0) {
        Sem::Decl(d) => Sem::Item(BlockItem::Decl(d)),
        other => panic!("{other:?}"),
    }
}

fn item_stmt(_: &mut Builder, k: &mut Kids) -> Sem {
    Sem::Item(BlockItem::Stmt(k.stmt(0)))
}

fn expr_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let e = (k.len() == 2).then(|| k.expr(0));
    b.stmt(k.range, StmtKind::Expr(e))
}

fn if_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let cond = k.expr(2);
    let then = Box::new(k.stmt(4));
    let els = (k.len() == 7).then(|| Box::new(k.stmt(6)));
    b.stmt(k.range, StmtKind::If { cond, then, els })
}

fn switch_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let cond = k.expr(2);
    let body = Box::new(k.stmt(4));
    b.stmt(k.range, StmtKind::Switch { cond, body })
}

fn while_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let cond = k.expr(2);
    let body = Box::new(k.stmt(4));
    b.stmt(k.range, StmtKind::While { cond, body })
}

fn do_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let body = Box::new(k.stmt(1));
    let cond = k.expr(4);
    b.stmt(k.range, StmtKind::DoWhile { body, cond })
}

fn expr_of_stmt(s: Stmt) -> Option<Expr> {
    match s.kind {
        StmtKind::Expr(e) => e,
        _ => unreachable!(),
    }
}

fn for_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let init = match k.take(1) {
        Sem::Stmt(s) => expr_of_stmt(s).map_or(ForInit::None, ForInit::Expr),
        Sem::Decl(d) => ForInit::Decl(d),
        other => panic!("{other:?}"),
    };
    let cond = expr_of_stmt(k.stmt(2));
    let step = (k.len() == 6).then(|| k.expr(3));
    let body = Box::new(k.stmt(k.len() - 1));
    b.pop_scope();
    b.stmt(
        k.range,
        StmtKind::For {
            init,
            cond,
            step,
            body,
        },
    )
}

fn goto_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let label = b.ident(k.tok(1));
    b.stmt(k.range, StmtKind::Goto(label))
}

fn continue_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    b.stmt(k.range, StmtKind::Continue)
}

fn break_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    b.stmt(k.range, StmtKind::Break)
}

fn return_stmt(b: &mut Builder, k: &mut Kids) -> Sem {
    let e = (k.len() == 3).then(|| k.expr(1));
    b.stmt(k.range, StmtKind::Return(e))
}

fn ident_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let name = b.text(k.tok(0)).to_string();
    b.expr(k.range, ExprKind::Ident(name))
}

fn int_lit(b: &mut Builder, k: &mut Kids) -> Sem {
    let t = b.text(k.tok(0)).to_string();
    b.expr(k.range, ExprKind::IntLit(t))
}

fn float_lit(b: &mut Builder, k: &mut Kids) -> Sem {
    let t = b.text(k.tok(0)).to_string();
    b.expr(k.range, ExprKind::FloatLit(t))
}

fn char_lit(b: &mut Builder, k: &mut Kids) -> Sem {
    let t = b.text(k.tok(0)).to_string();
    b.expr(k.range, ExprKind::CharLit(t))
}

fn str_first(b: &mut Builder, k: &mut Kids) -> Sem {
    let t = b.text(k.tok(0)).to_string();
    b.expr(k.range, ExprKind::StrLit(vec![t]))
}

fn str_push(b: &mut Builder, k: &mut Kids) -> Sem {
    let e = k.expr(0);
    let ExprKind::StrLit(mut parts) = e.kind else { unreachable!() };
    parts.push(b.text(k.tok(1)).to_string());
    b.expr(k.range, ExprKind::StrLit(parts))
}

fn index_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let base = Box::new(k.expr(0));
    let idx = Box::new(k.expr(2));
    b.expr(k.range, ExprKind::Index(base, idx))
}

fn call_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let f = Box::new(k.expr(0));
    let args = if k.len() == 4 {
        unwrap_all!(k.list(2), Expr)
    } else {
        Vec::new()
    };
    b.expr(k.range, ExprKind::Call(f, args))
}

fn member_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let base = Box::new(k.expr(0));
    let arrow = b.punct(k.tok(1)) == "->";
    let field = b.ident(k.tok(2));
    b.expr(k.range, ExprKind::Member { base, field, arrow })
}

fn post_incdec(b: &mut Builder, k: &mut Kids) -> Sem {
    let e = Box::new(k.expr(0));
    let kind = if b.punct(k.tok(1)) == "++" {
        ExprKind::PostInc(e)
    } else {
        ExprKind::PostDec(e)
    };
    b.expr(k.range, kind)
}

fn compound_lit(b: &mut Builder, k: &mut Kids) -> Sem {
    let tn = Box::new(k.type_name(1));
    let Sem::InitItems(items) = k.take(4) else { unreachable!() };
    b.expr(k.range, ExprKind::CompoundLiteral(tn, items))
}

fn pre_incdec(b: &mut Builder, k: &mut Kids) -> Sem {
    let op = if b.punct(k.tok(0)) == "++" {
        UnOp::PreInc
    } else {
        UnOp::PreDec
    };
    let e = Box::new(k.expr(1));
    b.expr(k.range, ExprKind::Unary(op, e))
}

fn unop(b: &mut Builder, k: &mut Kids) -> Sem {
    Sem::UnOp(match b.punct(k.tok(0)) {
        "&" => UnOp::AddrOf,
        "*" => UnOp::Deref,
        "+" => UnOp::Plus,
        "-" => UnOp::Neg,
        "~" => UnOp::BitNot,
        _ => UnOp::Not,
    })
}

fn unary(b: &mut Builder, k: &mut Kids) -> Sem {
    let Sem::UnOp(op) = k.take(0) else { unreachable!() };
    let e = Box::new(k.expr(1));
    b.expr(k.range, ExprKind::Unary(op, e))
}

fn sizeof_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let e = Box::new(k.expr(1));
    b.expr(k.range, ExprKind::SizeofExpr(e))
}

fn sizeof_type(b: &mut Builder, k: &mut Kids) -> Sem {
    let tn = Box::new(k.type_name(2));
    b.expr(k.range, ExprKind::SizeofType(tn))
}

fn alignof_type(b: &mut Builder, k: &mut Kids) -> Sem {
    let tn = Box::new(k.type_name(2));
    b.expr(k.range, ExprKind::AlignofType(tn))
}

fn cast(b: &mut Builder, k: &mut Kids) -> Sem {
    let tn = Box::new(k.type_name(1));
    let e = Box::new(k.expr(3));
    b.expr(k.range, ExprKind::Cast(tn, e))
}

fn binary(b: &mut Builder, k: &mut Kids) -> Sem {
    let op = BinOp::from_str(b.punct(k.tok(1))).expect("binary operator");
    let l = Box::new(k.expr(0));
    let r = Box::new(k.expr(2));
    b.expr(k.range, ExprKind::Binary(op, l, r))
}

fn cond_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let c = Box::new(k.expr(0));
    let t = Box::new(k.expr(2));
    let e = Box::new(k.expr(4));
    b.expr(k.range, ExprKind::Cond(c, t, e))
}

fn assign_op(b: &mut Builder, k: &mut Kids) -> Sem {
    let p = b.punct(k.tok(0));
    let op = if p == "=" {
        None
    } else {
        Some(BinOp::from_str(&p[..p.len() - 1]).expect("compound assignment"))
    };
    Sem::AssignOp(AssignOp(op))
}

fn assign_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let l = Box::new(k.expr(0));
    let Sem::AssignOp(op) = k.take(1) else { unreachable!() };
    let r = Box::new(k.expr(2));
    b.expr(k.range, ExprKind::Assign(op, l, r))
}

fn comma_expr(b: &mut Builder, k: &mut Kids) -> Sem {
    let l = Box::new(k.expr(0));
    let r = Box::new(k.expr(2));
    b.expr(k.range, ExprKind::Comma(l, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_dangling_else_conflicts() {
        let g = grammar();
        let else_t = g.terminal("else").unwrap();
        for c in &g.tables.conflicts {
            match c {
                lalr::Conflict::ShiftReduce { terminal, rule, .. } => {
                    assert_eq!(*terminal, else_t, "unexpected conflict on {}", g.terminals[*terminal as usize]);
                    assert_eq!(g.rule(RuleId(*rule)).lhs, "selection_statement");
                }
                other => panic!("unexpected conflict {other:?}"),
            }
        }
        assert!(!g.tables.conflicts.is_empty());
    }

    #[test]
    fn no_empty_rules_and_rule_lookup() {
        let g = grammar();
        assert!(g.rules.iter().all(|r| !r.rhs.is_empty()));
        let id = g.find_rule("primary_expression", "IDENTIFIER").unwrap();
        assert_eq!(g.rule(id).arity(), 1);
        assert!(g.rule(g.find_rule("lbrace", "{").unwrap()).monadic);
        assert!(!g.rule(id).monadic);
        assert!(g.terminal("TYPEDEF_NAME").is_some());
    }
}
