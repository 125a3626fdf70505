//! Line/token reader shared by the text file formats. Blank lines are skipped;
//! positions are reported 1-based.

use crate::error::{parse_err, Result};

pub(crate) struct Token<'a> {
    pub column: usize,
    pub text: &'a str,
}

pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in raw.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        column: s + 1,
                        text: &raw[s..i],
                    });
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            tokens.push(Token {
                column: s + 1,
                text: &raw[s..],
            });
        }
        Self { number, tokens }
    }

    pub fn expect_len(&self, n: usize, what: &str) -> Result<()> {
        if self.tokens.len() != n {
            let column = self
                .tokens
                .get(n.min(self.tokens.len().saturating_sub(1)))
                .map_or(1, |t| t.column);
            return Err(parse_err(
                self.number,
                column,
                format!("expected {n} {what}, found {}", self.tokens.len()),
            ));
        }
        Ok(())
    }

    pub fn usize_at(&self, i: usize) -> Result<usize> {
        let t = &self.tokens[i];
        t.text.parse::<usize>().map_err(|_| {
            parse_err(
                self.number,
                t.column,
                format!("expected a count, found {:?}", t.text),
            )
        })
    }

    pub fn f64_at(&self, i: usize) -> Result<f64> {
        let t = &self.tokens[i];
        parse_f64(t.text).ok_or_else(|| {
            parse_err(
                self.number,
                t.column,
                format!("expected a finite decimal, found {:?}", t.text),
            )
        })
    }

    pub fn bit_at(&self, i: usize) -> Result<bool> {
        let t = &self.tokens[i];
        match t.text {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(parse_err(
                self.number,
                t.column,
                format!("expected 0 or 1, found {other:?}"),
            )),
        }
    }

    /// Reads a row of `n` bits written either space separated or as one
    /// contiguous run of digits.
    pub fn bits(&self, n: usize) -> Result<Vec<bool>> {
        if self.tokens.len() == 1 && n > 1 {
            let t = &self.tokens[0];
            if t.text.len() != n {
                return Err(parse_err(
                    self.number,
                    t.column,
                    format!("expected {n} bits, found {}", t.text.len()),
                ));
            }
            return t
                .text
                .chars()
                .enumerate()
                .map(|(k, c)| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(parse_err(
                        self.number,
                        t.column + k,
                        format!("expected 0 or 1, found {c:?}"),
                    )),
                })
                .collect();
        }
        self.expect_len(n, "bits")?;
        (0..n).map(|i| self.bit_at(i)).collect()
    }
}

pub(crate) fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Reader<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            last: 0,
        }
    }

    pub fn next_line(&mut self) -> Option<Line<'a>> {
        for (i, raw) in self.lines.by_ref() {
            self.last = i + 1;
            if !raw.trim().is_empty() {
                return Some(Line::new(i + 1, raw));
            }
        }
        None
    }

    pub fn expect_line(&mut self, what: &str) -> Result<Line<'a>> {
        let last = self.last;
        self.next_line().ok_or_else(|| {
            parse_err(
                last + 1,
                1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    pub fn expect_end(&mut self) -> Result<()> {
        match self.next_line() {
            None => Ok(()),
            Some(line) => Err(parse_err(line.number, 1, "unexpected trailing content")),
        }
    }
}
