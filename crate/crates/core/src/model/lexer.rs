//! Tokenizer for the Java subset the structural parser understands.
//!
//! Comments and whitespace are dropped; every token remembers the line and
//! column it starts on so that line-of-code counts can be derived from the
//! set of lines that still carry a token.

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub col: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == text
    }

    pub fn is_word(&self, word: &str) -> bool {
        self.kind == TokenKind::Ident && self.text == word
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }
}

// `>` is never fused so that nested generics (`List<List<T>>`) close one
// level per token.
const PUNCT: &[&str] = &[
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "+=", "-=", "*=", "/=",
    "&=", "|=", "^=", "%=", "<<",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            let (l, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(l, c0, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }

        let (tl, tc) = (line, col);
        let start = i;
        let kind;
        if c == '"' {
            kind = TokenKind::Str;
            if next == Some('"') && chars.get(i + 2) == Some(&'"') {
                // text block
                bump!();
                bump!();
                bump!();
                loop {
                    if i >= chars.len() {
                        return Err(ParseError::new(tl, tc, "unterminated text block"));
                    }
                    if chars[i] == '\\' {
                        bump!();
                        if i < chars.len() {
                            bump!();
                        }
                        continue;
                    }
                    if chars[i] == '"' && chars.get(i + 1) == Some(&'"') && chars.get(i + 2) == Some(&'"')
                    {
                        bump!();
                        bump!();
                        bump!();
                        break;
                    }
                    bump!();
                }
            } else {
                bump!();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(ParseError::new(tl, tc, "unterminated string literal"));
                    }
                    if chars[i] == '\\' {
                        bump!();
                        if i < chars.len() {
                            bump!();
                        }
                        continue;
                    }
                    if chars[i] == '"' {
                        bump!();
                        break;
                    }
                    bump!();
                }
            }
        } else if c == '\'' {
            kind = TokenKind::Char;
            bump!();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(ParseError::new(tl, tc, "unterminated character literal"));
                }
                if chars[i] == '\\' {
                    bump!();
                    if i < chars.len() {
                        bump!();
                    }
                    continue;
                }
                if chars[i] == '\'' {
                    bump!();
                    break;
                }
                bump!();
            }
        } else if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) {
            kind = TokenKind::Number;
            while i < chars.len() {
                let d = chars[i];
                let hex = chars[start..i].iter().any(|x| matches!(x, 'x' | 'X'));
                let exp_sign = matches!(d, '+' | '-')
                    && match chars[i - 1] {
                        'e' | 'E' => !hex,
                        'p' | 'P' => hex,
                        _ => false,
                    };
                if d.is_ascii_alphanumeric() || d == '_' || d == '.' || exp_sign {
                    bump!();
                } else {
                    break;
                }
            }
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            kind = TokenKind::Ident;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                bump!();
            }
        } else {
            kind = TokenKind::Punct;
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let len = PUNCT
                .iter()
                .find(|p| rest.starts_with(*p))
                .map(|p| p.len())
                .unwrap_or(1);
            if len == 1 && !"{}()[];,.@=<>!~?:+-*/&|^%".contains(c) {
                return Err(ParseError::new(tl, tc, format!("unexpected character '{c}'")));
            }
            for _ in 0..len {
                bump!();
            }
        }
        tokens.push(Token {
            kind,
            text: chars[start..i].iter().collect(),
            line: tl,
            col: tc,
        });
    }
    Ok(tokens)
}
