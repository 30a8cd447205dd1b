//! Plain-text state snapshots.
//!
//! ```text
//! waves-snapshot v1
//! dim 1
//! n 8
//! length 6.2831853071795862e0
//! t 0.0000000000000000e0
//! g 1.0000000000000000e0
//! eta
//! <n values per row, n^(d-1) rows>
//! psi
//! <same layout>
//! ```
//!
//! Numbers carry 17 significant digits, enough to reread every `f64` exactly.

use std::io::{BufRead, Write};

use zakharov_core::dynamics::SurfaceState;
use zakharov_core::{Grid, RealField};

use crate::CliError;

pub const MAGIC: &str = "waves-snapshot v1";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot(sink: &mut impl Write, s: &SurfaceState) -> Result<(), CliError> {
    let grid = s.grid();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("dim {}\nn {}\nlength {}\nt {}\ng {}\n", grid.dim(), grid.n(), fmt(grid.length()), fmt(s.t), fmt(s.g)));
    for (name, f) in [("eta", &s.eta), ("psi", &s.psi)] {
        out.push_str(name);
        out.push('\n');
        for row in f.values().chunks(grid.n()) {
            let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("snapshot line {line}: {msg}"))
}

struct Cursor<I> {
    lines: I,
    at: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Cursor<I> {
    fn next(&mut self) -> Result<String, CliError> {
        self.at += 1;
        match self.lines.next() {
            Some(l) => Ok(l?),
            None => Err(bad(self.at, "unexpected end of snapshot")),
        }
    }

    fn header<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let l = self.next()?;
        match l.trim().split_once(' ') {
            Some((k, v)) if k == key => v.trim().parse().map_err(|e| bad(self.at, e)),
            _ => Err(bad(self.at, format!("expected `{key} <value>`"))),
        }
    }

    fn field(&mut self, name: &str, grid: Grid) -> Result<RealField, CliError> {
        if self.next()?.trim() != name {
            return Err(bad(self.at, format!("expected section {name:?}")));
        }
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() / n {
            let l = self.next()?;
            let row: Vec<f64> = l
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|e| bad(self.at, e)))
                .collect::<Result<_, _>>()?;
            if row.len() != n {
                return Err(bad(self.at, format!("expected {n} values, found {}", row.len())));
            }
            values.extend(row);
        }
        Ok(RealField::new(grid, values)?)
    }
}

pub fn read_snapshot(source: impl BufRead) -> Result<SurfaceState, CliError> {
    let mut c = Cursor { lines: source.lines(), at: 0 };
    if c.next()?.trim() != MAGIC {
        return Err(bad(1, format!("expected {MAGIC:?}")));
    }
    let dim: usize = c.header("dim")?;
    let n: usize = c.header("n")?;
    let length: f64 = c.header("length")?;
    let t: f64 = c.header("t")?;
    let g: f64 = c.header("g")?;
    let grid = Grid::new(dim, n, length).map_err(|e| bad(c.at, e))?;
    let eta = c.field("eta", grid)?;
    let psi = c.field("psi", grid)?;
    Ok(SurfaceState::new(t, eta, psi, g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        for grid in [Grid::unit_1d(16).unwrap(), Grid::new(2, 8, 3.3).unwrap()] {
            let eta = RealField::from_fn(grid, |x| (x[0] * 1.234567).sin() / 3.0 + x[1] * 1e-17);
            let psi = RealField::from_fn(grid, |x| (x[0] - x[1]).exp() * 1e300);
            let s = SurfaceState::new(0.1 + 0.2, eta, psi, 9.81).unwrap();
            let mut buf = Vec::new();
            write_snapshot(&mut buf, &s).unwrap();
            let back = read_snapshot(buf.as_slice()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn malformed_input_is_reported() {
        assert!(read_snapshot("hello\n".as_bytes()).is_err());
        let s = SurfaceState::rest(Grid::unit_1d(8).unwrap(), 1.0);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
        assert!(read_snapshot(truncated.as_bytes()).is_err());
        let broken = text.replacen("0.0000000000000000e0 ", "x ", 1);
        assert!(read_snapshot(broken.as_bytes()).unwrap_err().to_string().contains("line"));
    }
}
