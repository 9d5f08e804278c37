use super::ast::*;
use super::lexer::{lex, Line, Tok, Token};
use super::SyntaxError;

const RESERVED: &[&str] = &[
    "def", "class", "return", "try", "except", "finally", "break", "continue", "import", "from", "with", "lambda",
    "pass", "global", "nonlocal", "yield", "raise", "del", "assert", "is",
];

pub(crate) fn parse_statements(source: &str) -> Result<Vec<Stmt>, SyntaxError> {
    let lines = lex(source)?;
    if lines.is_empty() {
        return Err(SyntaxError::new(1, 1, "empty program"));
    }
    let mut parser = Parser { lines: &lines, pos: 0 };
    let first_indent = lines[0].indent;
    if first_indent != 0 {
        return Err(SyntaxError::new(lines[0].number, 1, "unexpected indent"));
    }
    let block = parser.block(0)?;
    if let Some(line) = parser.lines.get(parser.pos) {
        return Err(SyntaxError::new(
            line.number,
            line.indent + 1,
            "inconsistent indentation",
        ));
    }
    Ok(block)
}

struct Parser<'a> {
    lines: &'a [Line],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn block(&mut self, indent: usize) -> Result<Vec<Stmt>, SyntaxError> {
        let mut stmts = Vec::new();
        while let Some(line) = self.lines.get(self.pos) {
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return Err(SyntaxError::new(line.number, line.indent + 1, "unexpected indent"));
            }
            stmts.push(self.statement(indent)?);
        }
        Ok(stmts)
    }

    /// Parses the indented body that follows a header line at `header_indent`.
    fn suite(&mut self, header: &Line) -> Result<Vec<Stmt>, SyntaxError> {
        match self.lines.get(self.pos) {
            Some(next) if next.indent > header.indent => self.block(next.indent),
            Some(next) => Err(SyntaxError::new(
                next.number,
                next.indent + 1,
                "expected an indented block",
            )),
            None => Err(SyntaxError::new(
                header.number,
                header.end_col,
                "expected an indented block",
            )),
        }
    }

    fn statement(&mut self, indent: usize) -> Result<Stmt, SyntaxError> {
        let line = &self.lines[self.pos];
        self.pos += 1;
        let mut cur = Cursor::new(line);
        let keyword = match cur.peek() {
            Some(Tok::Name(n)) => Some(n.clone()),
            _ => None,
        };
        match keyword.as_deref() {
            Some("if") => {
                cur.bump();
                self.if_chain(line, cur, indent)
            }
            Some("while") => {
                cur.bump();
                let condition = cur.expr()?;
                cur.expect_header_end()?;
                let body = self.suite(line)?;
                Ok(Stmt {
                    kind: StmtKind::While { condition, body },
                    line: line.number,
                })
            }
            Some("for") => {
                cur.bump();
                let var = match cur.next() {
                    Some(Token { tok: Tok::Name(n), .. }) if !is_keyword(&n) => n,
                    _ => return Err(cur.error("expected loop variable name")),
                };
                if !matches!(cur.next(), Some(Token { tok: Tok::Name(ref n), .. }) if n == "in") {
                    return Err(cur.error("expected 'in'"));
                }
                let iterable = cur.expr()?;
                cur.expect_header_end()?;
                let body = self.suite(line)?;
                Ok(Stmt {
                    kind: StmtKind::For { var, iterable, body },
                    line: line.number,
                })
            }
            Some(k @ ("elif" | "else")) => Err(SyntaxError::new(
                line.number,
                line.indent + 1,
                format!("'{k}' without matching 'if'"),
            )),
            Some(k) if RESERVED.contains(&k) => Err(SyntaxError::new(
                line.number,
                line.indent + 1,
                format!("unsupported construct '{k}'"),
            )),
            _ => {
                let kind = cur.simple_statement()?;
                Ok(Stmt {
                    kind,
                    line: line.number,
                })
            }
        }
    }

    /// Parses `if cond:` (cursor positioned after `if`/`elif`) plus any elif/else.
    fn if_chain(&mut self, line: &'a Line, mut cur: Cursor<'a>, indent: usize) -> Result<Stmt, SyntaxError> {
        let condition = cur.expr()?;
        cur.expect_header_end()?;
        let then_block = self.suite(line)?;
        let mut else_block = None;
        if let Some(next) = self.lines.get(self.pos) {
            if next.indent == indent {
                match next.tokens.first().map(|t| &t.tok) {
                    Some(Tok::Name(n)) if n == "elif" => {
                        self.pos += 1;
                        let mut c = Cursor::new(next);
                        c.bump();
                        let nested = self.if_chain(next, c, indent)?;
                        else_block = Some(vec![nested]);
                    }
                    Some(Tok::Name(n)) if n == "else" => {
                        self.pos += 1;
                        let mut c = Cursor::new(next);
                        c.bump();
                        c.expect_header_end()?;
                        else_block = Some(self.suite(next)?);
                    }
                    _ => {}
                }
            }
        }
        Ok(Stmt {
            kind: StmtKind::If {
                condition,
                then_block,
                else_block,
            },
            line: line.number,
        })
    }
}

fn is_keyword(name: &str) -> bool {
    matches!(
        name,
        "if" | "elif" | "else" | "while" | "for" | "in" | "and" | "or" | "not" | "True" | "False"
    ) || RESERVED.contains(&name)
}

struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a Line) -> Self {
        Cursor { line, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.line.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(Tok::Op(o)) if *o == op)
    }

    fn peek_name(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == name)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.line.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn col(&self) -> usize {
        self.line.tokens.get(self.pos).map_or(self.line.end_col, |t| t.col)
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let msg = msg.into();
        let msg = if self.pos >= self.line.tokens.len() {
            format!("{msg}, found end of line")
        } else {
            msg
        };
        SyntaxError::new(self.line.number, self.col(), msg)
    }

    fn expect_op(&mut self, op: &str) -> Result<(), SyntaxError> {
        if self.peek_op(op) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")))
        }
    }

    fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.pos < self.line.tokens.len() {
            Err(self.error("unexpected token"))
        } else {
            Ok(())
        }
    }

    fn expect_header_end(&mut self) -> Result<(), SyntaxError> {
        self.expect_op(":")?;
        if self.pos < self.line.tokens.len() {
            return Err(self.error("statements after ':' must start on a new line"));
        }
        Ok(())
    }

    fn simple_statement(&mut self) -> Result<StmtKind, SyntaxError> {
        let start_col = self.col();
        let expr = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Op("=")) => Some(AssignOp::Set),
            Some(Tok::Op("+=")) => Some(AssignOp::Add),
            Some(Tok::Op("-=")) => Some(AssignOp::Sub),
            Some(Tok::Op("*=")) => Some(AssignOp::Mul),
            Some(Tok::Op("/=")) => Some(AssignOp::Div),
            _ => None,
        };
        if let Some(op) = op {
            if !matches!(expr, Expr::Name(_) | Expr::Index { .. }) {
                return Err(SyntaxError::new(
                    self.line.number,
                    start_col,
                    "invalid assignment target",
                ));
            }
            self.bump();
            let value = self.expr()?;
            self.expect_end()?;
            return Ok(StmtKind::Assign {
                target: expr,
                op,
                value,
            });
        }
        self.expect_end()?;
        match expr {
            Expr::Call { callee, args } if callee == "print" => Ok(StmtKind::Print(args)),
            e @ Expr::Call { .. } => Ok(StmtKind::ExprStmt(e)),
            _ => Err(SyntaxError::new(
                self.line.number,
                start_col,
                "expression statement must be a call",
            )),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binop().filter(|op| op.precedence() >= min_prec) {
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        Some(match self.peek()? {
            Tok::Op("+") => BinOp::Add,
            Tok::Op("-") => BinOp::Sub,
            Tok::Op("*") => BinOp::Mul,
            Tok::Op("/") => BinOp::Div,
            Tok::Op("==") => BinOp::Eq,
            Tok::Op("!=") => BinOp::Ne,
            Tok::Op("<") => BinOp::Lt,
            Tok::Op("<=") => BinOp::Le,
            Tok::Op(">") => BinOp::Gt,
            Tok::Op(">=") => BinOp::Ge,
            Tok::Name(n) if n == "and" => BinOp::And,
            Tok::Name(n) if n == "or" => BinOp::Or,
            _ => return None,
        })
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek_name("not") {
            self.bump();
            // `not` binds looser than comparisons: `not a == b` is `not (a == b)`.
            let operand = self.binary(UnaryOp::Not.precedence())?;
            return Ok(Expr::Unary {
                op: UnaryOp::Not,
                operand: Box::new(operand),
            });
        }
        if self.peek_op("-") {
            self.bump();
            let operand = self.unary()?;
            return Ok(Expr::Unary {
                op: UnaryOp::Neg,
                operand: Box::new(operand),
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, SyntaxError> {
        let mut expr = self.atom()?;
        while self.peek_op("[") {
            self.bump();
            let index = self.expr()?;
            self.expect_op("]")?;
            expr = Expr::Index {
                target: Box::new(expr),
                index: Box::new(index),
            };
        }
        Ok(expr)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let col = self.col();
        let Some(token) = self.next() else {
            self.pos -= 1;
            return Err(self.error("expected an expression"));
        };
        match token.tok {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Float(s) => Ok(Expr::Float(s)),
            Tok::Str(s) => Ok(Expr::Str(s)),
            Tok::Name(n) if n == "True" => Ok(Expr::Bool(true)),
            Tok::Name(n) if n == "False" => Ok(Expr::Bool(false)),
            Tok::Name(n) if is_keyword(&n) => Err(SyntaxError::new(
                self.line.number,
                col,
                format!("unexpected keyword '{n}'"),
            )),
            Tok::Name(mut name) => {
                let mut dotted = false;
                while self.peek_op(".") {
                    self.bump();
                    match self.next() {
                        Some(Token {
                            tok: Tok::Name(part), ..
                        }) if !is_keyword(&part) => {
                            name.push('.');
                            name.push_str(&part);
                            dotted = true;
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.error("expected attribute name after '.'"));
                        }
                    }
                }
                if self.peek_op("(") {
                    self.bump();
                    let args = self.list_items(")")?;
                    Ok(Expr::Call { callee: name, args })
                } else if dotted {
                    Err(SyntaxError::new(
                        self.line.number,
                        col,
                        "attribute access is only supported as a call",
                    ))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            Tok::Op("(") => {
                let inner = self.expr()?;
                self.expect_op(")")?;
                Ok(inner)
            }
            Tok::Op("[") => Ok(Expr::List(self.list_items("]")?)),
            Tok::Op(op) => Err(SyntaxError::new(self.line.number, col, format!("unexpected '{op}'"))),
        }
    }

    /// Comma separated expressions up to and including `close`.
    fn list_items(&mut self, close: &str) -> Result<Vec<Expr>, SyntaxError> {
        let mut items = Vec::new();
        if self.peek_op(close) {
            self.bump();
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.peek_op(",") {
                self.bump();
                continue;
            }
            self.expect_op(close)?;
            return Ok(items);
        }
    }
}
