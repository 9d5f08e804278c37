use std::fmt;

/// A parsed snippet.
#[derive(Debug, Clone)]
pub struct Program {
    pub statements: Vec<Stmt>,
    pub source_text: String,
    pub source_id: String,
}

impl Program {
    /// Compares statement trees, ignoring line numbers and source text.
    pub fn structurally_eq(&self, other: &Program) -> bool {
        blocks_eq(&self.statements, &other.statements)
    }

    /// Number of `if`, `while` and `for` headers in the program.
    pub fn decision_count(&self) -> usize {
        fn count(block: &[Stmt]) -> usize {
            block
                .iter()
                .map(|s| match &s.kind {
                    StmtKind::If {
                        then_block, else_block, ..
                    } => 1 + count(then_block) + else_block.as_deref().map_or(0, count),
                    StmtKind::While { body, .. } | StmtKind::For { body, .. } => 1 + count(body),
                    _ => 0,
                })
                .sum()
        }
        count(&self.statements)
    }
}

fn blocks_eq(a: &[Stmt], b: &[Stmt]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| stmts_eq(x, y))
}

fn stmts_eq(a: &Stmt, b: &Stmt) -> bool {
    use StmtKind::*;
    match (&a.kind, &b.kind) {
        (
            Assign {
                target: t1,
                op: o1,
                value: v1,
            },
            Assign {
                target: t2,
                op: o2,
                value: v2,
            },
        ) => t1 == t2 && o1 == o2 && v1 == v2,
        (ExprStmt(e1), ExprStmt(e2)) => e1 == e2,
        (Print(a1), Print(a2)) => a1 == a2,
        (
            If {
                condition: c1,
                then_block: t1,
                else_block: e1,
            },
            If {
                condition: c2,
                then_block: t2,
                else_block: e2,
            },
        ) => {
            c1 == c2
                && blocks_eq(t1, t2)
                && match (e1, e2) {
                    (None, None) => true,
                    (Some(x), Some(y)) => blocks_eq(x, y),
                    _ => false,
                }
        }
        (
            While {
                condition: c1,
                body: b1,
            },
            While {
                condition: c2,
                body: b2,
            },
        ) => c1 == c2 && blocks_eq(b1, b2),
        (
            For {
                var: v1,
                iterable: i1,
                body: b1,
            },
            For {
                var: v2,
                iterable: i2,
                body: b2,
            },
        ) => v1 == v2 && i1 == i2 && blocks_eq(b1, b2),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    /// 1-based source line of the statement (or of its header).
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
    ExprStmt(Expr),
    Print(Vec<Expr>),
    /// `elif` is stored as a single nested `If` in `else_block`.
    If {
        condition: Expr,
        then_block: Vec<Stmt>,
        else_block: Option<Vec<Stmt>>,
    },
    While {
        condition: Expr,
        body: Vec<Stmt>,
    },
    For {
        var: String,
        iterable: Expr,
        body: Vec<Stmt>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    /// Kept as written so that printing is exact.
    Float(String),
    Str(String),
    Bool(bool),
    Name(String),
    List(Vec<Expr>),
    /// Callee is an opaque, possibly dotted, name such as `len` or `arr.append`.
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    Index {
        target: Box<Expr>,
        index: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

impl UnaryOp {
    pub fn precedence(self) -> u8 {
        match self {
            UnaryOp::Not => 3,
            UnaryOp::Neg => 7,
        }
    }
}

pub(crate) const POSTFIX_PRECEDENCE: u8 = 8;
pub(crate) const ATOM_PRECEDENCE: u8 = 9;

impl Expr {
    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Unary { op, .. } => op.precedence(),
            Expr::Call { .. } | Expr::Index { .. } => POSTFIX_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::expr_text(self))
    }
}
