//! C11 abstract syntax.
//!
//! Every expression, statement and declaration carries a [`NodeId`] and the
//! logical [`Range`] of the reduction that created it. Parentheses are not
//! represented; the pretty printer re-inserts them from precedence.

use crate::source::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub range: Range,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationUnit {
    pub items: Vec<ExternalDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExternalDecl {
    Function(FunctionDef),
    Decl(Decl),
}

impl ExternalDecl {
    pub fn range(&self) -> Range {
        match self {
            ExternalDecl::Function(f) => f.range,
            ExternalDecl::Decl(d) => d.range,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub id: NodeId,
    pub range: Range,
    pub specs: Vec<DeclSpec>,
    pub declarator: Declarator,
    pub body: Stmt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub id: NodeId,
    pub range: Range,
    pub kind: DeclKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclKind {
    Var {
        specs: Vec<DeclSpec>,
        items: Vec<InitDeclarator>,
    },
    StaticAssert {
        cond: Expr,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitDeclarator {
    pub declarator: Declarator,
    pub init: Option<Initializer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StorageClass {
    Typedef,
    Extern,
    Static,
    ThreadLocal,
    Auto,
    Register,
}

impl StorageClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StorageClass::Typedef => "typedef",
            StorageClass::Extern => "extern",
            StorageClass::Static => "static",
            StorageClass::ThreadLocal => "_Thread_local",
            StorageClass::Auto => "auto",
            StorageClass::Register => "register",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeQual {
    Const,
    Restrict,
    Volatile,
}

impl TypeQual {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeQual::Const => "const",
            TypeQual::Restrict => "restrict",
            TypeQual::Volatile => "volatile",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FuncSpec {
    Inline,
    Noreturn,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeSpec {
    /// `void`, `int`, `unsigned`, `_Bool`, ...
    Basic(&'static str),
    Struct(StructSpec),
    Enum(EnumSpec),
    TypedefName(Ident),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclSpec {
    Storage(StorageClass),
    Type(TypeSpec),
    Qual(TypeQual),
    Func(FuncSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructKind {
    Struct,
    Union,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructSpec {
    pub kind: StructKind,
    pub name: Option<Ident>,
    pub members: Option<Vec<StructMember>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StructMember {
    Field {
        specs: Vec<DeclSpec>,
        declarators: Vec<StructDeclarator>,
    },
    StaticAssert {
        cond: Expr,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructDeclarator {
    pub declarator: Option<Declarator>,
    pub width: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumSpec {
    pub name: Option<Ident>,
    pub enumerators: Option<Vec<Enumerator>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumerator {
    pub name: Ident,
    pub value: Option<Expr>,
}

/// A (possibly abstract) declarator. The nesting mirrors the source text:
/// `*p[3]` is `Pointer(Array(Name p))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub range: Option<Range>,
    pub kind: DeclaratorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclaratorKind {
    Name(Ident),
    Abstract,
    Pointer {
        quals: Vec<TypeQual>,
        inner: Box<Declarator>,
    },
    Array {
        inner: Box<Declarator>,
        quals: Vec<TypeQual>,
        is_static: bool,
        size: ArraySize,
    },
    Function {
        inner: Box<Declarator>,
        params: Vec<ParamDecl>,
        variadic: bool,
    },
    /// Old-style identifier list; rejected after parsing but kept in the tree.
    KnR {
        inner: Box<Declarator>,
        names: Vec<Ident>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArraySize {
    Unspecified,
    Star,
    Expr(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub specs: Vec<DeclSpec>,
    pub declarator: Declarator,
}

impl Declarator {
    pub fn abstract_() -> Declarator {
        Declarator {
            range: None,
            kind: DeclaratorKind::Abstract,
        }
    }

    /// The declared name, if any.
    pub fn name(&self) -> Option<&Ident> {
        match &self.kind {
            DeclaratorKind::Name(id) => Some(id),
            DeclaratorKind::Abstract => None,
            DeclaratorKind::Pointer { inner, .. }
            | DeclaratorKind::Array { inner, .. }
            | DeclaratorKind::Function { inner, .. }
            | DeclaratorKind::KnR { inner, .. } => inner.name(),
        }
    }

    /// The function declarator applied directly to the name, if the
    /// declared entity is a function.
    pub fn function_params(&self) -> Option<(&[ParamDecl], bool)> {
        match &self.kind {
            DeclaratorKind::Function {
                inner,
                params,
                variadic,
            } => match &inner.kind {
                DeclaratorKind::Name(_) => Some((params, *variadic)),
                _ => inner.function_params(),
            },
            DeclaratorKind::Pointer { inner, .. }
            | DeclaratorKind::Array { inner, .. }
            | DeclaratorKind::KnR { inner, .. } => inner.function_params(),
            _ => None,
        }
    }

    /// True when the outermost type derivation of the named entity is a
    /// function.
    pub fn is_function(&self) -> bool {
        match &self.kind {
            DeclaratorKind::Function { inner, .. } | DeclaratorKind::KnR { inner, .. } => {
                matches!(inner.kind, DeclaratorKind::Name(_)) || inner.is_function()
            }
            DeclaratorKind::Pointer { inner, .. } | DeclaratorKind::Array { inner, .. } => {
                !matches!(inner.kind, DeclaratorKind::Name(_)) && inner.is_function()
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeName {
    pub specs: Vec<DeclSpec>,
    pub declarator: Declarator,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initializer {
    Expr(Expr),
    List(Vec<InitItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitItem {
    pub designators: Vec<Designator>,
    pub init: Initializer,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Designator {
    Index(Expr),
    Member(Ident),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub range: Range,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockItem {
    Decl(Decl),
    Stmt(Stmt),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    None,
    Expr(Expr),
    Decl(Decl),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Compound(Vec<BlockItem>),
    Expr(Option<Expr>),
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    For {
        init: ForInit,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Goto(Ident),
    Labeled {
        label: Ident,
        body: Box<Stmt>,
    },
    Switch {
        cond: Expr,
        body: Box<Stmt>,
    },
    Case {
        value: Expr,
        body: Box<Stmt>,
    },
    Default(Box<Stmt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitXor,
    BitOr,
    And,
    Or,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        use BinOp::*;
        match self {
            Mul => "*",
            Div => "/",
            Rem => "%",
            Add => "+",
            Sub => "-",
            Shl => "<<",
            Shr => ">>",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            BitAnd => "&",
            BitXor => "^",
            BitOr => "|",
            And => "&&",
            Or => "||",
        }
    }

    pub fn from_str(s: &str) -> Option<BinOp> {
        use BinOp::*;
        Some(match s {
            "*" => Mul,
            "/" => Div,
            "%" => Rem,
            "+" => Add,
            "-" => Sub,
            "<<" => Shl,
            ">>" => Shr,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => Eq,
            "!=" => Ne,
            "&" => BitAnd,
            "^" => BitXor,
            "|" => BitOr,
            "&&" => And,
            "||" => Or,
            _ => return None,
        })
    }

    /// Binding strength; higher binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Mul | Div | Rem => 10,
            Add | Sub => 9,
            Shl | Shr => 8,
            Lt | Gt | Le | Ge => 7,
            Eq | Ne => 6,
            BitAnd => 5,
            BitXor => 4,
            BitOr => 3,
            And => 2,
            Or => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    AddrOf,
    Deref,
    Plus,
    Neg,
    BitNot,
    Not,
    PreInc,
    PreDec,
}

impl UnOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnOp::AddrOf => "&",
            UnOp::Deref => "*",
            UnOp::Plus => "+",
            UnOp::Neg => "-",
            UnOp::BitNot => "~",
            UnOp::Not => "!",
            UnOp::PreInc => "++",
            UnOp::PreDec => "--",
        }
    }
}

/// `=` is `Assign(None)`, `+=` is `Assign(Some(Add))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssignOp(pub Option<BinOp>);

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        use BinOp::*;
        match self.0 {
            None => "=",
            Some(Mul) => "*=",
            Some(Div) => "/=",
            Some(Rem) => "%=",
            Some(Add) => "+=",
            Some(Sub) => "-=",
            Some(Shl) => "<<=",
            Some(Shr) => ">>=",
            Some(BitAnd) => "&=",
            Some(BitXor) => "^=",
            Some(BitOr) => "|=",
            Some(op) => op.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub range: Range,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    IntLit(String),
    FloatLit(String),
    CharLit(String),
    /// Adjacent string literals, kept as separate pieces.
    StrLit(Vec<String>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Assign(AssignOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    PostInc(Box<Expr>),
    PostDec(Box<Expr>),
    Call(Box<Expr>, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Member {
        base: Box<Expr>,
        field: Ident,
        arrow: bool,
    },
    Cast(Box<TypeName>, Box<Expr>),
    SizeofExpr(Box<Expr>),
    SizeofType(Box<TypeName>),
    AlignofType(Box<TypeName>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Comma(Box<Expr>, Box<Expr>),
    CompoundLiteral(Box<TypeName>, Vec<InitItem>),
}
