//! Tokenization of SBN text.

use crate::concept::ConceptKey;

use super::Constant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Concept(ConceptKey),
    /// Alphabetic, starts uppercase, contains a lowercase letter.
    Role,
    /// All-uppercase word. Whether it acts as a role (`TPR now`) or a
    /// discourse relation (`ELABORATION <1`) depends on its argument and is
    /// decided by the parser.
    Upper,
    RefIndex(i64),
    /// `<k` is `Before(k)`, `>k` is `After(k)`.
    BoxIndex(BoxDirection, u64),
    /// Quoted literal, unescaped and without its quotes.
    Literal(String),
    /// Bare unsigned number used as a literal value.
    Number,
    Constant(Constant),
    /// Matches no kind.
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxDirection {
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SbnToken {
    pub kind: TokenKind,
    /// Source text of the token (for literals: including quotes).
    pub text: String,
    /// Token ordinal, from 0.
    pub position: usize,
}

/// Splits `text` into tokens. Never fails: unrecognized tokens come back as
/// [`TokenKind::Invalid`].
pub fn tokenize(text: &str) -> Vec<SbnToken> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = if c == '"' {
            let (end, literal) = read_literal(&chars, i);
            i = end;
            match literal {
                Some(value) => TokenKind::Literal(value),
                None => TokenKind::Invalid,
            }
        } else {
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            classify(&chars[start..i].iter().collect::<String>())
        };
        tokens.push(SbnToken { kind, text: chars[start..i].iter().collect(), position: tokens.len() });
    }
    tokens
}

/// Reads a quoted literal starting at the opening quote. Returns the index
/// after the token and the unescaped value, or `None` when unterminated (the
/// rest of the input is then consumed).
fn read_literal(chars: &[char], open: usize) -> (usize, Option<String>) {
    let mut value = String::new();
    let mut j = open + 1;
    while j < chars.len() {
        match chars[j] {
            '\\' if chars.get(j + 1) == Some(&'"') => {
                value.push('"');
                j += 2;
            }
            '"' => return (j + 1, Some(value)),
            c => {
                value.push(c);
                j += 1;
            }
        }
    }
    (chars.len(), None)
}

fn classify(tok: &str) -> TokenKind {
    if let Some(k) = signed_index(tok) {
        return TokenKind::RefIndex(k);
    }
    if let Some(rest) = tok.strip_prefix('<') {
        if let Some(k) = digits(rest) {
            return TokenKind::BoxIndex(BoxDirection::Before, k);
        }
    }
    if let Some(rest) = tok.strip_prefix('>') {
        if let Some(k) = digits(rest) {
            return TokenKind::BoxIndex(BoxDirection::After, k);
        }
    }
    if let Some(c) = Constant::from_token(tok) {
        return TokenKind::Constant(c);
    }
    if let Ok(key) = tok.parse::<ConceptKey>() {
        return TokenKind::Concept(key);
    }
    if tok.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        if tok.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
            return TokenKind::Upper;
        }
        if tok.chars().all(|c| c.is_ascii_alphabetic()) {
            return TokenKind::Role;
        }
    }
    if is_number(tok) {
        return TokenKind::Number;
    }
    TokenKind::Invalid
}

fn digits(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn signed_index(tok: &str) -> Option<i64> {
    let (sign, rest) = match tok.as_bytes().first()? {
        b'+' => (1, &tok[1..]),
        b'-' => (-1, &tok[1..]),
        _ => return None,
    };
    let k = i64::try_from(digits(rest)?).ok()?;
    Some(sign * k)
}

/// `123` or `1.5`.
fn is_number(tok: &str) -> bool {
    let mut parts = tok.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let ok_int = !int.is_empty() && int.bytes().all(|b| b.is_ascii_digit());
    match parts.next() {
        None => ok_int,
        Some(frac) => ok_int && !frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit()),
    }
}
