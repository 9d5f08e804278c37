use super::ast::*;

const INDENT: &str = "    ";

pub(crate) fn program_text(stmts: &[Stmt]) -> String {
    let mut out = String::new();
    write_block(&mut out, stmts, 0);
    out
}

fn write_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        write_stmt(out, stmt, depth);
    }
}

fn push_line(out: &mut String, depth: usize, text: &str) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push_str(text);
    out.push('\n');
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    match &stmt.kind {
        StmtKind::If { .. } => write_if(out, stmt, depth, "if"),
        StmtKind::While { condition, body } => {
            push_line(out, depth, &format!("while {}:", expr_text(condition)));
            write_block(out, body, depth + 1);
        }
        StmtKind::For { var, iterable, body } => {
            push_line(out, depth, &format!("for {var} in {}:", expr_text(iterable)));
            write_block(out, body, depth + 1);
        }
        _ => push_line(out, depth, &simple_stmt_text(&stmt.kind)),
    }
}

fn write_if(out: &mut String, stmt: &Stmt, depth: usize, keyword: &str) {
    let StmtKind::If {
        condition,
        then_block,
        else_block,
    } = &stmt.kind
    else {
        unreachable!("write_if called on a non-if statement");
    };
    push_line(out, depth, &format!("{keyword} {}:", expr_text(condition)));
    write_block(out, then_block, depth + 1);
    match else_block.as_deref() {
        None => {}
        Some(
            [nested @ Stmt {
                kind: StmtKind::If { .. },
                ..
            }],
        ) => write_if(out, nested, depth, "elif"),
        Some(block) => {
            push_line(out, depth, "else:");
            write_block(out, block, depth + 1);
        }
    }
}

/// Single-line text of a statement header or simple statement.
pub(crate) fn header_text(kind: &StmtKind) -> String {
    match kind {
        StmtKind::If { condition, .. } => format!("if {}", expr_text(condition)),
        StmtKind::While { condition, .. } => format!("while {}", expr_text(condition)),
        StmtKind::For { var, iterable, .. } => format!("for {var} in {}", expr_text(iterable)),
        other => simple_stmt_text(other),
    }
}

fn simple_stmt_text(kind: &StmtKind) -> String {
    match kind {
        StmtKind::Assign { target, op, value } => {
            format!("{} {} {}", expr_text(target), op.symbol(), expr_text(value))
        }
        StmtKind::ExprStmt(e) => expr_text(e),
        StmtKind::Print(args) => format!("print({})", join_exprs(args)),
        _ => unreachable!("compound statement passed to simple_stmt_text"),
    }
}

fn join_exprs(items: &[Expr]) -> String {
    items.iter().map(expr_text).collect::<Vec<_>>().join(", ")
}

pub(crate) fn expr_text(expr: &Expr) -> String {
    match expr {
        Expr::Int(v) => v.to_string(),
        Expr::Float(s) => s.clone(),
        Expr::Str(s) => quote(s),
        Expr::Bool(true) => "True".into(),
        Expr::Bool(false) => "False".into(),
        Expr::Name(n) => n.clone(),
        Expr::List(items) => format!("[{}]", join_exprs(items)),
        Expr::Call { callee, args } => format!("{callee}({})", join_exprs(args)),
        Expr::Index { target, index } => {
            format!("{}[{}]", wrap(target, POSTFIX_PRECEDENCE), expr_text(index))
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            // Left associative: the right operand needs parens at equal precedence.
            format!("{} {} {}", wrap(lhs, p), op.symbol(), wrap(rhs, p + 1))
        }
        Expr::Unary {
            op: UnaryOp::Not,
            operand,
        } => {
            format!("not {}", wrap(operand, UnaryOp::Not.precedence()))
        }
        Expr::Unary {
            op: UnaryOp::Neg,
            operand,
        } => {
            format!("-{}", wrap(operand, UnaryOp::Neg.precedence()))
        }
    }
}

fn wrap(expr: &Expr, min_precedence: u8) -> String {
    if expr.precedence() < min_precedence {
        format!("({})", expr_text(expr))
    } else {
        expr_text(expr)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
