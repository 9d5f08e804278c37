use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Name(String),
    Int(i64),
    Float(String),
    Str(String),
    Op(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based column.
    pub col: usize,
}

/// One non-blank physical line.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub number: usize,
    pub indent: usize,
    pub tokens: Vec<Token>,
    /// Column just past the last character, used for end-of-line errors.
    pub end_col: usize,
}

// Longest first so that `<=` wins over `<`.
const OPERATORS: &[&str] = &[
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "+", "-", "*", "/", "<", ">", "=", "(", ")", "[", "]", ",", ":",
    ".",
];

pub(crate) fn lex(source: &str) -> Result<Vec<Line>, SyntaxError> {
    let mut lines = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let number = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let chars: Vec<char> = raw.chars().collect();
        let mut indent = 0;
        while indent < chars.len() && (chars[indent] == ' ' || chars[indent] == '\t') {
            if chars[indent] == '\t' {
                return Err(SyntaxError::new(number, indent + 1, "tab in indentation"));
            }
            indent += 1;
        }
        let tokens = lex_line(&chars, indent, number)?;
        let mut depth: i32 = 0;
        for t in &tokens {
            match t.tok {
                Tok::Op("(") | Tok::Op("[") => depth += 1,
                Tok::Op(")") | Tok::Op("]") => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(SyntaxError::new(number, t.col, "unbalanced closing bracket"));
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(SyntaxError::new(number, chars.len() + 1, "unbalanced parentheses"));
        }
        lines.push(Line {
            number,
            indent,
            tokens,
            end_col: chars.len() + 1,
        });
    }
    Ok(lines)
}

fn lex_line(chars: &[char], start: usize, line: usize) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut i = start;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == ' ' {
            i += 1;
            continue;
        }
        if c == '\t' {
            return Err(SyntaxError::new(line, col, "tab character"));
        }
        if c == '#' {
            return Err(SyntaxError::new(line, col, "comments are not supported"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Name(chars[begin..i].iter().collect()),
                col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let is_float = i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit();
            if is_float {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Float(chars[begin..i].iter().collect()),
                    col,
                });
            } else {
                let text: String = chars[begin..i].iter().collect();
                let value = text
                    .parse::<i64>()
                    .map_err(|_| SyntaxError::new(line, col, "integer literal out of range"))?;
                out.push(Token {
                    tok: Tok::Int(value),
                    col,
                });
            }
            if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                return Err(SyntaxError::new(line, i + 1, "malformed number"));
            }
            continue;
        }
        if c == '"' || c == '\'' {
            let (value, next) = lex_string(chars, i, line)?;
            out.push(Token {
                tok: Tok::Str(value),
                col,
            });
            i = next;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match OPERATORS.iter().find(|op| rest.starts_with(*op)) {
            Some(op) => {
                out.push(Token { tok: Tok::Op(op), col });
                i += op.len();
            }
            None => {
                return Err(SyntaxError::new(line, col, format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(out)
}

fn lex_string(chars: &[char], start: usize, line: usize) -> Result<(String, usize), SyntaxError> {
    let quote = chars[start];
    let mut value = String::new();
    let mut i = start + 1;
    while i < chars.len() {
        match chars[i] {
            c if c == quote => return Ok((value, i + 1)),
            '\\' => {
                let Some(&next) = chars.get(i + 1) else { break };
                value.push(match next {
                    'n' => '\n',
                    't' => '\t',
                    other => other,
                });
                i += 2;
            }
            c => {
                value.push(c);
                i += 1;
            }
        }
    }
    Err(SyntaxError::new(line, start + 1, "unterminated string literal"))
}
