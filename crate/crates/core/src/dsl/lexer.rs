//! Line-oriented tokenizer shared by the three file formats.

use std::path::Path;

use super::error::ParseError;
use crate::model::SourcePos;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokKind {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tok {
    pub kind: TokKind,
    /// 1-based column of the first character.
    pub col: usize,
}

impl Tok {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokKind::Word(w) => format!("`{w}`"),
            TokKind::Str(s) => format!("string \"{s}\""),
            TokKind::LBrace => "`{`".into(),
            TokKind::RBrace => "`}`".into(),
            TokKind::LBracket => "`[`".into(),
            TokKind::RBracket => "`]`".into(),
            TokKind::Comma => "`,`".into(),
        }
    }
}

/// Tokens of one non-empty source line.
#[derive(Debug, Clone)]
pub(crate) struct LineToks {
    pub line: usize,
    pub toks: Vec<Tok>,
    /// Column just past the last non-comment character.
    pub end_col: usize,
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '"' | '{' | '}' | '[' | ']' | ',' | '#')
}

pub(crate) fn lex(text: &str, file: &Path) -> Result<(Vec<LineToks>, usize), ParseError> {
    let mut out = Vec::new();
    let mut line_count = 0;
    for (n, raw) in text.lines().enumerate() {
        line_count = n + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        let mut end_col = 1;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let simple = match c {
                '{' => Some(TokKind::LBrace),
                '}' => Some(TokKind::RBrace),
                '[' => Some(TokKind::LBracket),
                ']' => Some(TokKind::RBracket),
                ',' => Some(TokKind::Comma),
                _ => None,
            };
            if let Some(kind) = simple {
                toks.push(Tok { kind, col });
                i += 1;
            } else if c == '"' {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(ParseError::new(
                                SourcePos::new(file, n + 1, chars.len() + 1),
                                "closing quote",
                                "end of line",
                            ));
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                other => {
                                    return Err(ParseError::new(
                                        SourcePos::new(file, n + 1, i + 2),
                                        "escape sequence \\\", \\\\ or \\n",
                                        other.map_or("end of line".to_owned(), |c| format!("`\\{c}`")),
                                    ));
                                }
                            };
                            s.push(esc);
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push(Tok {
                    kind: TokKind::Str(s),
                    col,
                });
            } else {
                let start = i;
                while i < chars.len() && !is_delim(chars[i]) {
                    i += 1;
                }
                toks.push(Tok {
                    kind: TokKind::Word(chars[start..i].iter().collect()),
                    col,
                });
            }
            end_col = i + 1;
        }
        if !toks.is_empty() {
            out.push(LineToks {
                line: n + 1,
                toks,
                end_col,
            });
        }
    }
    Ok((out, line_count))
}
