//! Plain-text formats for spaces, spans and cospans.
//!
//! A file is read as a sequence of non-empty lines; `#` starts a comment.
//!
//! * A space is its dimension `n`, then `n` Gram rows as 0/1 strings, then
//!   the diagonal values `q(e_i)` as a 0/1 string (`-` when `n = 0`).
//! * A matrix with `r` rows and `c` columns is `r` lines of length `c`
//!   (`-` when `c = 0`).
//! * A cospan `[V → X ← W]` is the spaces `V`, `W`, `X` followed by the
//!   left leg (`dim X × dim V`) and the right leg (`dim X × dim W`).
//! * A span `[V ← D → W]` is the spaces `V`, `W`, `D` followed by the
//!   left leg (`dim V × dim D`) and the right leg (`dim W × dim D`).
//!
//! Spaces may also be given inline as block sums such as `H0+H0+x1` or
//! `H1+H0^2`; `0` is the zero space.

use std::fmt::Write as _;

use crate::cospancat::Cospan;
use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use crate::qmorph::QuadMap;
use crate::quadform::QuadSpace;
use crate::spancat::{canonicalize_span, SpanMorphism};

/// Parses an inline block descriptor.
pub fn parse_descriptor(s: &str) -> Result<QuadSpace> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty space descriptor".into()));
    }
    if s == "0" {
        return Ok(QuadSpace::zero());
    }
    let mut space = QuadSpace::zero();
    for term in s.split('+') {
        let term = term.trim();
        let (name, count) = match term.split_once('^') {
            Some((name, exp)) => {
                let count: usize = exp
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                (name.trim(), count)
            }
            None => (term, 1),
        };
        let block = match name.to_ascii_lowercase().as_str() {
            "h0" => QuadSpace::h0(),
            "h1" => QuadSpace::h1(),
            "x0" => QuadSpace::point(false),
            "x1" => QuadSpace::point(true),
            "0" => QuadSpace::zero(),
            _ => {
                return Err(Error::Parse(format!(
                    "unknown block `{name}` (expected H0, H1, x0 or x1)"
                )))
            }
        };
        if space.dim() + block.dim() * count > crate::f2::MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: space.dim() + block.dim() * count,
                max: crate::f2::MAX_DIM,
            });
        }
        space = space.orthogonal_sum(&block.power(count));
    }
    Ok(space)
}

/// Line reader over the significant lines of a text block.
pub struct Tokens<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, line)| {
                let line = line.split('#').next().unwrap_or("").trim();
                (!line.is_empty()).then_some((i + 1, line))
            })
            .collect();
        Self { lines, pos: 0 }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.lines.len()
    }

    /// Fails if anything is left over.
    pub fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            None => Ok(()),
            Some((n, _)) => Err(Error::Parse(format!("line {n}: trailing content"))),
        }
    }

    fn bit_row(&mut self, len: usize, what: &str) -> Result<u64> {
        let (n, line) = self.next_line(what)?;
        if len == 0 {
            return if line == "-" {
                Ok(0)
            } else {
                Err(Error::Parse(format!(
                    "line {n}: expected `-` for an empty {what}"
                )))
            };
        }
        if line.len() != len {
            return Err(Error::Parse(format!(
                "line {n}: {what} has length {}, expected {len}",
                line.len()
            )));
        }
        line.bytes()
            .enumerate()
            .try_fold(0u64, |acc, (i, b)| match b {
                b'0' => Ok(acc),
                b'1' => Ok(acc | (1 << i)),
                _ => Err(Error::Parse(format!(
                    "line {n}: `{}` is not a 0/1 digit",
                    b as char
                ))),
            })
    }

    /// A matrix with `rows` rows and `cols` columns.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> Result<BitMatrix> {
        if cols > crate::f2::MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: cols,
                max: crate::f2::MAX_DIM,
            });
        }
        let bits = (0..rows)
            .map(|_| self.bit_row(cols, "matrix row"))
            .collect::<Result<Vec<u64>>>()?;
        Ok(BitMatrix::from_rows(cols, &bits))
    }

    /// A space block.
    pub fn space(&mut self) -> Result<QuadSpace> {
        let (n, line) = self.next_line("space dimension")?;
        let dim: usize = line
            .parse()
            .map_err(|_| Error::Parse(format!("line {n}: `{line}` is not a dimension")))?;
        if dim > crate::f2::MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                max: crate::f2::MAX_DIM,
            });
        }
        let rows = (0..dim)
            .map(|_| self.bit_row(dim, "gram row"))
            .collect::<Result<Vec<u64>>>()?;
        let diag = self.bit_row(dim, "diagonal")?;
        QuadSpace::from_bits(dim, &rows, diag)
    }
}

fn write_bits(out: &mut String, len: usize, bits: u64) {
    if len == 0 {
        out.push('-');
    } else {
        out.extend((0..len).map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' }));
    }
    out.push('\n');
}

pub fn write_matrix(out: &mut String, m: &BitMatrix) {
    for i in 0..m.rows() {
        write_bits(out, m.cols(), m.row_bits(i));
    }
}

pub fn write_space(out: &mut String, s: &QuadSpace) {
    let _ = writeln!(out, "{}", s.dim());
    for i in 0..s.dim() {
        write_bits(out, s.dim(), s.gram_row(i));
    }
    write_bits(out, s.dim(), s.diag_bits());
}

pub fn format_space(s: &QuadSpace) -> String {
    let mut out = String::new();
    write_space(&mut out, s);
    out
}

pub fn parse_space(text: &str) -> Result<QuadSpace> {
    let mut t = Tokens::new(text);
    let s = t.space()?;
    t.finish()?;
    Ok(s)
}

/// A space given either inline or as the contents of a file.
pub fn parse_space_any(text: &str) -> Result<QuadSpace> {
    let trimmed = text.trim();
    if !trimmed.contains('\n') && trimmed.chars().any(|c| c.is_ascii_alphabetic()) || trimmed == "0"
    {
        parse_descriptor(trimmed)
    } else {
        parse_space(text)
    }
}

pub fn write_cospan(out: &mut String, t: &Cospan) {
    write_space(out, t.dom());
    write_space(out, t.cod());
    write_space(out, t.apex());
    write_matrix(out, &t.left().matrix());
    write_matrix(out, &t.right().matrix());
}

pub fn format_cospan(t: &Cospan) -> String {
    let mut out = String::new();
    write_cospan(&mut out, t);
    out
}

impl Tokens<'_> {
    pub fn cospan(&mut self) -> Result<Cospan> {
        let v = self.space()?;
        let w = self.space()?;
        let x = self.space()?;
        let left = self.matrix(x.dim(), v.dim())?;
        let right = self.matrix(x.dim(), w.dim())?;
        Cospan::new(
            QuadMap::new(v, x.clone(), &left)?,
            QuadMap::new(w, x, &right)?,
        )
    }

    pub fn span(&mut self) -> Result<SpanMorphism> {
        let v = self.space()?;
        let w = self.space()?;
        let d = self.space()?;
        let f = self.matrix(v.dim(), d.dim())?;
        let g = self.matrix(w.dim(), d.dim())?;
        canonicalize_span(&QuadMap::new(d.clone(), v, &f)?, &QuadMap::new(d, w, &g)?)
    }
}

pub fn parse_cospan(text: &str) -> Result<Cospan> {
    let mut t = Tokens::new(text);
    let c = t.cospan()?;
    t.finish()?;
    Ok(c)
}

pub fn parse_span(text: &str) -> Result<SpanMorphism> {
    let mut t = Tokens::new(text);
    let s = t.span()?;
    t.finish()?;
    Ok(s)
}

pub fn write_span(out: &mut String, s: &SpanMorphism) {
    let (f, g) = s.legs();
    write_space(out, s.dom());
    write_space(out, s.cod());
    write_space(out, f.dom());
    write_matrix(out, &f.matrix());
    write_matrix(out, &g.matrix());
}

pub fn format_span(s: &SpanMorphism) -> String {
    let mut out = String::new();
    write_span(&mut out, s);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cospancat::sigma_lift;
    use crate::spancat::enumerate_span_homs;
    use crate::Limits;

    #[test]
    fn descriptors() {
        assert_eq!(parse_descriptor("H0").unwrap(), QuadSpace::h0());
        assert_eq!(parse_descriptor("0").unwrap(), QuadSpace::zero());
        assert_eq!(
            parse_descriptor("H0+H0+x1").unwrap(),
            QuadSpace::h0()
                .power(2)
                .orthogonal_sum(&QuadSpace::point(true))
        );
        assert_eq!(
            parse_descriptor("h0^2 + x1").unwrap(),
            parse_descriptor("H0+H0+x1").unwrap()
        );
        assert!(parse_descriptor("H2").is_err());
        assert!(parse_descriptor("H0^x").is_err());
        assert!(parse_descriptor("").is_err());
    }

    #[test]
    fn space_round_trip() {
        for d in ["0", "H0", "H1+x0", "H0+x1+x1"] {
            let s = parse_descriptor(d).unwrap();
            let text = format_space(&s);
            assert_eq!(parse_space(&text).unwrap(), s);
            assert_eq!(parse_space_any(&text).unwrap(), s);
        }
        assert_eq!(format_space(&QuadSpace::zero()), "0\n-\n");
        assert_eq!(format_space(&QuadSpace::h1()), "2\n01\n10\n11\n");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# H0\n2\n\n01  # first row\n10\n00\n";
        assert_eq!(parse_space(text).unwrap(), QuadSpace::h0());
    }

    #[test]
    fn malformed_input() {
        assert!(parse_space("2\n01\n10\n").is_err());
        assert!(parse_space("2\n11\n10\n00\n").is_err());
        assert!(parse_space("2\n01\n10\n0a\n").is_err());
        assert!(parse_space("2\n01\n10\n00\n1\n").is_err());
        assert!(parse_space("x\n").is_err());
    }

    #[test]
    fn span_and_cospan_round_trip() {
        let lim = Limits::default();
        for s in enumerate_span_homs(&QuadSpace::h0(), &QuadSpace::h1(), &lim).unwrap() {
            let text = format_span(&s);
            assert_eq!(parse_span(&text).unwrap(), s);
            let t = sigma_lift(&s).unwrap();
            let text = format_cospan(&t);
            assert_eq!(parse_cospan(&text).unwrap(), t);
        }
    }
}
