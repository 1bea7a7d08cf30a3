//! Named spaces usable directly in a run config.

use ckn_core::space::conjugate;
use ckn_core::PointedRadialSpace;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Euclidean(u32),
    Cone { a: f64, n: f64 },
    Counterexample { n: u32, atom: f64 },
    HalfLine,
}

/// Name pattern and one-line description of every builtin.
pub const BUILTINS: &[(&str, &str)] = &[
    ("euclidean(N)", "Lebesgue measure on R^N around the origin, C = N/p'"),
    ("cone(A,N)", "exact N-volume cone with m(B_r) = A w_N r^N, C = N/p'"),
    ("counterexample(n,M)", "Lebesgue measure on R^n plus a point mass M at the origin, C = n/p'"),
    ("half_line", "[0, inf) with unit density, C = 1/p'"),
];

impl Builtin {
    /// Parse `name(args)` or a bare name. `None` means the string is not a builtin.
    pub fn parse(s: &str) -> Option<Result<Self>> {
        let s = s.trim();
        if s == "half_line" {
            return Some(Ok(Builtin::HalfLine));
        }
        let open = s.find('(')?;
        if !s.ends_with(')') {
            return None;
        }
        let name = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
        let bad = || LabError::Config(format!("bad arguments in builtin `{s}`"));
        let num = |a: &str| a.parse::<f64>().map_err(|_| bad());
        let int = |a: &str| a.parse::<u32>().map_err(|_| bad());
        let parsed = match (name, args.as_slice()) {
            ("euclidean", [n]) => int(n).and_then(|n| if n >= 1 { Ok(Builtin::Euclidean(n)) } else { Err(bad()) }),
            ("cone", [a, n]) => num(a).and_then(|a| num(n).map(|n| Builtin::Cone { a, n })),
            ("counterexample", [n, m]) => {
                int(n).and_then(|n| num(m).map(|atom| Builtin::Counterexample { n, atom }))
            }
            ("euclidean" | "cone" | "counterexample", _) => Err(bad()),
            _ => return None,
        };
        Some(parsed)
    }

    pub fn build(&self) -> Result<PointedRadialSpace> {
        let space = match *self {
            Builtin::Euclidean(n) => PointedRadialSpace::euclidean(n),
            Builtin::Cone { a, n } => PointedRadialSpace::cone(a, n),
            Builtin::Counterexample { n, atom } => PointedRadialSpace::counterexample(n, atom),
            Builtin::HalfLine => PointedRadialSpace::half_line(),
        };
        space.map_err(|e| LabError::Config(format!("{}: {e}", self.name())))
    }

    /// The constant `C = N / p'` the builtin is checked against in `L^p`.
    pub fn constant(&self, p: f64) -> f64 {
        let n = match *self {
            Builtin::Euclidean(n) | Builtin::Counterexample { n, .. } => n as f64,
            Builtin::Cone { n, .. } => n,
            Builtin::HalfLine => 1.0,
        };
        n / conjugate(p)
    }

    pub fn name(&self) -> String {
        match *self {
            Builtin::Euclidean(n) => format!("euclidean({n})"),
            Builtin::Cone { a, n } => format!("cone({a},{n})"),
            Builtin::Counterexample { n, atom } => format!("counterexample({n},{atom})"),
            Builtin::HalfLine => "half_line".into(),
        }
    }
}
