//! Textual window, lattice and matrix specs.
//!
//! ```text
//! gauss:gamma=<v>            hermite:n=<k>,gamma=<v>      oddbump      file:<path>
//! sq:delta=<v>               sep:alpha=<a>,beta=<b>       symp:delta=<v>,S=<a,b,c,d>
//! ```
//!
//! Numbers accept `p/q`, products and `sqrt(..)`, e.g. `sqrt(2)/2`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::symplectic::SymplecticMatrix;
use crate::windows::{from_points, parse_window_csv, sample, SampledWindow, TimeGrid, WindowSpec};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Evaluates `number | sqrt(expr) | (expr)` joined by `*` and `/`, with an
/// optional leading sign.
pub fn parse_number(text: &str) -> Result<f64> {
    let mut p = Expr { s: text.trim().as_bytes(), i: 0, depth: 0 };
    let v = p.product()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(parse_err(format!("unexpected trailing input in number `{text}`")));
    }
    if !v.is_finite() {
        return Err(parse_err(format!("number `{text}` is not finite")));
    }
    Ok(v)
}

struct Expr<'a> {
    s: &'a [u8],
    i: usize,
    depth: usize,
}

impl Expr<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.i) == Some(&b) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn product(&mut self) -> Result<f64> {
        let mut v = self.factor()?;
        loop {
            if self.eat(b'*') {
                v *= self.factor()?;
            } else if self.eat(b'/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64> {
        self.depth += 1;
        if self.depth > 32 {
            return Err(parse_err("number expression nested too deeply"));
        }
        let v = self.atom();
        self.depth -= 1;
        v
    }

    fn atom(&mut self) -> Result<f64> {
        self.skip_ws();
        if self.eat(b'-') {
            return Ok(-self.factor()?);
        }
        if self.eat(b'+') {
            return self.factor();
        }
        if self.s[self.i..].starts_with(b"sqrt") {
            self.i += 4;
            if !self.eat(b'(') {
                return Err(parse_err("expected `(` after sqrt"));
            }
            let v = self.product()?;
            if !self.eat(b')') {
                return Err(parse_err("missing `)`"));
            }
            if v < 0.0 {
                return Err(parse_err("sqrt of a negative number"));
            }
            return Ok(v.sqrt());
        }
        if self.eat(b'(') {
            let v = self.product()?;
            if !self.eat(b')') {
                return Err(parse_err("missing `)`"));
            }
            return Ok(v);
        }
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || matches!(self.s[self.i], b'.' | b'e' | b'E'))
        {
            // Exponent signs belong to the literal.
            if matches!(self.s[self.i], b'e' | b'E') && matches!(self.s.get(self.i + 1), Some(b'+' | b'-')) {
                self.i += 1;
            }
            self.i += 1;
        }
        let lit = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| parse_err("invalid UTF-8"))?;
        lit.parse::<f64>().map_err(|_| parse_err(format!("invalid number `{lit}`")))
    }
}

/// `key=value` pairs separated by commas.
fn key_values(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(format!("expected key=value, got `{kv}`")))?;
            Ok((k.trim(), v.trim()))
        })
        .collect()
}

fn take(pairs: &[(&str, &str)], allowed: &[&str], key: &str) -> Result<f64> {
    if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(parse_err(format!("unknown key `{k}`")));
    }
    let mut found = pairs.iter().filter(|(k, _)| *k == key);
    let (_, v) = found.next().ok_or_else(|| parse_err(format!("missing `{key}`")))?;
    if found.next().is_some() {
        return Err(parse_err(format!("duplicate `{key}`")));
    }
    parse_number(v)
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(parse_err(format!("{what} must be positive")))
    }
}

/// A parsed window spec; `File` still has to be read.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSource {
    Analytic(WindowSpec),
    File(PathBuf),
}

pub fn parse_window_spec(text: &str) -> Result<WindowSource> {
    let text = text.trim();
    if text == "oddbump" {
        return Ok(WindowSource::Analytic(WindowSpec::OddCompactBump));
    }
    let (kind, body) = text.split_once(':').ok_or_else(|| parse_err(format!("unrecognised window spec `{text}`")))?;
    match kind.trim() {
        "gauss" => {
            let kv = key_values(body)?;
            let gamma = positive(take(&kv, &["gamma"], "gamma")?, "gamma")?;
            Ok(WindowSource::Analytic(WindowSpec::Gaussian { gamma }))
        }
        "hermite" => {
            let kv = key_values(body)?;
            let n = take(&kv, &["n", "gamma"], "n")?;
            if n < 0.0 || n.fract() != 0.0 || n > 200.0 {
                return Err(parse_err("hermite order must be an integer in 0..=200"));
            }
            let gamma = if kv.iter().any(|(k, _)| *k == "gamma") {
                positive(take(&kv, &["n", "gamma"], "gamma")?, "gamma")?
            } else {
                1.0
            };
            Ok(WindowSource::Analytic(WindowSpec::Hermite { n: n as usize, gamma }))
        }
        "file" if !body.is_empty() => Ok(WindowSource::File(PathBuf::from(body))),
        _ => Err(parse_err(format!("unrecognised window spec `{text}`"))),
    }
}

/// Parses and samples a window, reading `file:` sources from disk.
pub fn load_window(text: &str, grid: TimeGrid) -> Result<SampledWindow> {
    match parse_window_spec(text)? {
        WindowSource::Analytic(spec) => sample(&spec, grid),
        WindowSource::File(path) => load_window_file(&path, grid),
    }
}

pub fn load_window_file(path: &Path, grid: TimeGrid) -> Result<SampledWindow> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_points(&parse_window_csv(&text)?, grid)
}

/// Row-major `a,b,c,d`, validated symplectic.
pub fn parse_matrix_spec(text: &str) -> Result<SymplecticMatrix> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(parse_err(format!("matrix needs 4 comma-separated entries, got {}", parts.len())));
    }
    let mut e = [0.0; 4];
    for (slot, p) in e.iter_mut().zip(&parts) {
        *slot = parse_number(p)?;
    }
    SymplecticMatrix::from_2x2(e)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeSpec {
    Square { delta: f64 },
    Separable { alpha: f64, beta: f64 },
    Symplectic { delta: f64, s: SymplecticMatrix },
}

impl LatticeSpec {
    pub fn delta(&self) -> f64 {
        match self {
            LatticeSpec::Square { delta } | LatticeSpec::Symplectic { delta, .. } => *delta,
            LatticeSpec::Separable { alpha, beta } => 1.0 / (alpha * beta),
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match self {
            LatticeSpec::Square { delta } => Lattice::square(1, *delta),
            LatticeSpec::Separable { alpha, beta } => Lattice::separable(*alpha, *beta),
            LatticeSpec::Symplectic { delta, s } => Lattice::from_symplectic(s.clone(), *delta),
        }
    }
}

pub fn parse_lattice_spec(text: &str) -> Result<LatticeSpec> {
    let text = text.trim();
    let (kind, body) = text.split_once(':').ok_or_else(|| parse_err(format!("unrecognised lattice spec `{text}`")))?;
    match kind.trim() {
        "sq" => {
            let kv = key_values(body)?;
            Ok(LatticeSpec::Square { delta: positive(take(&kv, &["delta"], "delta")?, "delta")? })
        }
        "sep" => {
            let kv = key_values(body)?;
            let alpha = positive(take(&kv, &["alpha", "beta"], "alpha")?, "alpha")?;
            let beta = positive(take(&kv, &["alpha", "beta"], "beta")?, "beta")?;
            Ok(LatticeSpec::Separable { alpha, beta })
        }
        "symp" => {
            let (head, matrix) = body.split_once("S=").ok_or_else(|| parse_err("symp lattice needs S=<a,b,c,d>"))?;
            let head = head.trim().trim_end_matches(',');
            let kv = key_values(head)?;
            let delta = positive(take(&kv, &["delta"], "delta")?, "delta")?;
            let s = parse_matrix_spec(matrix).map_err(|e| match e {
                Error::Parse(_) => e,
                other => Error::Hypothesis(format!("S is not symplectic: {other}")),
            })?;
            Ok(LatticeSpec::Symplectic { delta, s })
        }
        _ => Err(parse_err(format!("unrecognised lattice spec `{text}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("0.5").unwrap(), 0.5);
        assert_eq!(parse_number("2/3").unwrap(), 2.0 / 3.0);
        assert_eq!(parse_number("-1e-3").unwrap(), -1e-3);
        assert_eq!(parse_number("1.5E+2").unwrap(), 150.0);
        assert!((parse_number("sqrt(2)/2").unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(parse_number("2*(3/4)").unwrap(), 1.5);
        for bad in ["", "abc", "1/", "sqrt(-1)", "1..2", "(1", "1)", "1/0", "sqrt2"] {
            assert!(parse_number(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn window_specs() {
        assert_eq!(
            parse_window_spec("gauss:gamma=1").unwrap(),
            WindowSource::Analytic(WindowSpec::Gaussian { gamma: 1.0 })
        );
        assert_eq!(
            parse_window_spec("hermite:n=3,gamma=2").unwrap(),
            WindowSource::Analytic(WindowSpec::Hermite { n: 3, gamma: 2.0 })
        );
        assert_eq!(
            parse_window_spec("hermite:n=1").unwrap(),
            WindowSource::Analytic(WindowSpec::Hermite { n: 1, gamma: 1.0 })
        );
        assert_eq!(parse_window_spec("oddbump").unwrap(), WindowSource::Analytic(WindowSpec::OddCompactBump));
        assert_eq!(parse_window_spec("file:w.csv").unwrap(), WindowSource::File("w.csv".into()));
        for bad in [
            "gauss",
            "gauss:gamma=0",
            "gauss:sigma=1",
            "hermite:n=1.5",
            "hermite:gamma=1",
            "file:",
            "tri:x=1",
            "gauss:gamma=1,gamma=2",
        ] {
            assert!(matches!(parse_window_spec(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn lattice_specs() {
        assert_eq!(parse_lattice_spec("sq:delta=2").unwrap(), LatticeSpec::Square { delta: 2.0 });
        let sep = parse_lattice_spec("sep:alpha=1,beta=1/2").unwrap();
        assert_eq!(sep, LatticeSpec::Separable { alpha: 1.0, beta: 0.5 });
        assert_eq!(sep.delta(), 2.0);
        let symp = parse_lattice_spec("symp:delta=3/2,S=1,0,1,1").unwrap();
        assert_eq!(symp.delta(), 1.5);
        assert_eq!(symp.lattice().unwrap().generator.entries(), vec![1.0, 0.0, 1.0, 1.0]);
        assert!(matches!(parse_lattice_spec("symp:delta=1,S=2,0,0,1"), Err(Error::Hypothesis(_))));
        for bad in [
            "sq",
            "sq:delta=-1",
            "sep:alpha=1",
            "symp:delta=1",
            "symp:S=1,0,0,1",
            "hex:delta=1",
            "symp:delta=1,S=1,0,0",
        ] {
            assert!(matches!(parse_lattice_spec(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn matrix_specs() {
        assert_eq!(parse_matrix_spec("0,1,-1,0").unwrap().entries(), vec![0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(parse_matrix_spec("2,0,0,1"), Err(Error::NotSymplectic { .. } | Error::Singular { .. })));
        assert!(parse_matrix_spec("1,0,0").is_err());
    }
}
