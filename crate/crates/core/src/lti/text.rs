use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::statespace::StateSpace;
use crate::error::{Error, Result};

const HEADER: &str = "wh2-ss 1";

fn push_row(out: &mut String, values: impl Iterator<Item = f64>) {
    let row: Vec<String> = values.map(|v| format!("{v:.16e}")).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

/// Line-oriented text encoding with 17 significant digits per entry.
pub fn serialize(sys: &StateSpace) -> String {
    let n = sys.order();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(out, "d {:.16e}", sys.d());
    for (name, m) in [("E", sys.e()), ("A", sys.a())] {
        out.push_str(name);
        out.push('\n');
        for i in 0..n {
            push_row(&mut out, m.row(i).iter().copied());
        }
    }
    for (name, v) in [("b", sys.b()), ("c", sys.c())] {
        out.push_str(name);
        out.push('\n');
        push_row(&mut out, v.iter().copied());
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Ok((i + 1, line));
            }
        }
        Err(Error::Parse {
            line: 0,
            message: "unexpected end of input".into(),
        })
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (no, line) = self.next()?;
        let mut parts = line.splitn(2, char::is_whitespace);
        if parts.next() != Some(key) {
            return Err(Error::Parse {
                line: no,
                message: format!("expected `{key}`"),
            });
        }
        Ok((no, parts.next().unwrap_or("").trim()))
    }

    fn floats(&mut self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let (no, line) = self.next()?;
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line: no,
                    message: format!("invalid number `{t}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != count {
            return Err(Error::Parse {
                line: no,
                message: format!("expected {count} values, found {}", values.len()),
            });
        }
        Ok(values)
    }
}

/// Inverse of [`serialize`]; `#` starts a comment and blank lines are skipped.
pub fn parse(text: &str) -> Result<StateSpace> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (no, header) = lines.next()?;
    if header.split_whitespace().collect::<Vec<_>>() != ["wh2-ss", "1"] {
        return Err(Error::Parse {
            line: no,
            message: format!("expected header `{HEADER}`"),
        });
    }
    let (no, n) = lines.keyword("n")?;
    let n: usize = n.parse().map_err(|_| Error::Parse {
        line: no,
        message: format!("invalid order `{n}`"),
    })?;
    let (no, d) = lines.keyword("d")?;
    let d: f64 = d.parse().map_err(|_| Error::Parse {
        line: no,
        message: format!("invalid feedthrough `{d}`"),
    })?;
    let mut mats = Vec::with_capacity(2);
    for key in ["E", "A"] {
        lines.keyword(key)?;
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n {
            data.extend(lines.floats(n)?);
        }
        mats.push(DMatrix::from_row_slice(n, n, &data));
    }
    let mut vecs = Vec::with_capacity(2);
    for key in ["b", "c"] {
        lines.keyword(key)?;
        vecs.push(DVector::from_vec(lines.floats(n)?));
    }
    if let Ok((no, _)) = lines.next() {
        return Err(Error::Parse {
            line: no,
            message: "trailing content".into(),
        });
    }
    let c = vecs.pop().expect("c parsed");
    let b = vecs.pop().expect("b parsed");
    let a = mats.pop().expect("A parsed");
    let e = mats.pop().expect("E parsed");
    StateSpace::new(e, a, b, c, d)
}
