//! Lebesgue measure plus a point mass `M` at the base point: CKN holds for
//! every `k >= 1` at `C = n/2` but fails at `k = 0`, and the volume ratio is
//! not monotone.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ckn::{ckn_check, ckn_integrals, verify_k_range};
use crate::error::{Error, Result};
use crate::grid;
use crate::profiles::{dyadic_epsilons, FamilyPart, FamilySpec, RadialProfile};
use crate::quadrature::QuadratureSpec;
use crate::report::{CheckReport, MonotonicityReport};
use crate::space::PointedRadialSpace;
use crate::volume::{check_volume_ratio_monotone, CLOSED_FORM_TOL};

/// Number of trailing sequence points used in the log-log slope fit.
pub const SLOPE_FIT_POINTS: usize = 6;
/// Allowed deviation of the fitted slope from `2n`.
pub const SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSpec {
    pub n: u32,
    pub atom: f64,
    pub c: f64,
    /// Strictly decreasing, inside `(0, 1)`.
    pub epsilons: Vec<f64>,
}

impl CounterexampleSpec {
    /// `C = n/2` and `eps = 2^-j`, `j = 1..=12`.
    pub fn standard(n: u32, atom: f64) -> Self {
        Self { n, atom, c: n as f64 / 2.0, epsilons: dyadic_epsilons(1, 12) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadSpec("dimension must be at least 1"));
        }
        if !(self.atom.is_finite() && self.atom >= 0.0) {
            return Err(Error::BadSpec("atom mass must be finite and nonnegative"));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::BadSpec("C must be positive"));
        }
        if self.epsilons.len() < SLOPE_FIT_POINTS {
            return Err(Error::BadSpec("epsilon sequence is shorter than the slope fit"));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) || self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::BadSpec("epsilon sequence must decrease strictly inside (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffScan {
    pub epsilons: Vec<f64>,
    /// `i_grad i_pot` at `k = 0`.
    pub products: Vec<f64>,
    pub i_mid: Vec<f64>,
    /// Least-squares slope of `log product` against `log eps` over the last points.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleBundle {
    pub spec: CounterexampleSpec,
    /// Per-`k` reports for `k = 1..=6`.
    pub uniform: Vec<CheckReport>,
    /// All of `uniform` pass.
    pub holds_for_positive_k: CheckReport,
    pub scan: CutoffScan,
    /// Slope within `2n ± 0.1` and `i_mid >= M` along the whole sequence.
    pub cutoff_rate: CheckReport,
    /// CKN at `k = 0` for the smallest cutoff.
    pub fails_at_zero: CheckReport,
    pub volume: Vec<MonotonicityReport>,
    /// The volume ratio is monotone for every sampled `C`.
    pub volume_monotone: CheckReport,
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

fn default_family(spec: &CounterexampleSpec) -> FamilySpec {
    FamilySpec::new(alloc::vec![
        FamilyPart::Gaussians { lambdas: alloc::vec![0.5, 1.0, 2.0] },
        FamilyPart::Truncations { lambda: 1.0, cuts: alloc::vec![1.0, 2.0] },
        FamilyPart::Cutoffs { epsilons: spec.epsilons.clone() },
        FamilyPart::RandomBumps { count: 5, seed: 0 },
    ])
}

/// Run the three claims on `R^n + M delta_0`.
pub fn run_counterexample(spec: &CounterexampleSpec, quad: &QuadratureSpec) -> Result<CounterexampleBundle> {
    spec.validate()?;
    let space = PointedRadialSpace::counterexample(spec.n, spec.atom)?;
    let nf = spec.n as f64;

    let uniform = verify_k_range(&space, spec.c, 2.0, 1, 6, &default_family(spec), quad)?;
    let worst = uniform
        .iter()
        .min_by(|a, b| (a.margin + a.tolerance).total_cmp(&(b.margin + b.tolerance)))
        .expect("six reports");
    let holds_for_positive_k = CheckReport::new("ckn holds for k = 1..6", worst.margin, worst.tolerance)
        .with_value(worst.value)
        .with_witness(worst.witness.clone());

    let mut products = Vec::new();
    let mut i_mid = Vec::new();
    for &e in &spec.epsilons {
        let t = ckn_integrals(&space, &RadialProfile::cutoff(e)?, 0, 2.0, quad)?;
        products.push(t.i_grad * t.i_pot);
        i_mid.push(t.i_mid);
    }
    let tail = spec.epsilons.len() - SLOPE_FIT_POINTS;
    let xs: Vec<f64> = spec.epsilons[tail..].iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = products[tail..].iter().map(|p| p.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let min_mid = i_mid.iter().copied().fold(f64::INFINITY, f64::min);
    let rate_margin = (SLOPE_TOL - (slope - 2.0 * nf).abs()).min(min_mid - spec.atom);
    let cutoff_rate = CheckReport::new(format!("cutoff product slope 2n = {}", 2.0 * nf), rate_margin, 0.0)
        .with_value(slope)
        .with_witness(alloc::vec![slope, min_mid]);

    let smallest = *spec.epsilons.last().expect("validated nonempty");
    let k0 = ckn_check(&space, &RadialProfile::cutoff(smallest)?, 0, 2.0, spec.c, quad)?;
    let fails_at_zero = CheckReport::new("ckn at k = 0", k0.margin, k0.tolerance)
        .with_value(k0.ratio)
        .with_witness(alloc::vec![smallest, k0.ratio]);

    let radii = grid::default_radius_grid();
    let mut volume = Vec::new();
    for j in 1..=4 {
        let c = nf / 2.0 * j as f64 / 4.0;
        volume.push(check_volume_ratio_monotone(&space, c, 2.0, &radii, CLOSED_FORM_TOL)?);
    }
    let worst = volume
        .iter()
        .min_by(|a, b| (a.min_forward_increment + a.tolerance).total_cmp(&(b.min_forward_increment + b.tolerance)))
        .expect("four reports");
    let volume_monotone = CheckReport::new("volume ratio monotone", worst.min_forward_increment, worst.tolerance)
        .with_value(worst.exponent_used)
        .with_witness(alloc::vec![worst.witness.0, worst.witness.1]);

    Ok(CounterexampleBundle {
        spec: spec.clone(),
        uniform,
        holds_for_positive_k,
        scan: CutoffScan { epsilons: spec.epsilons.clone(), products, i_mid, slope },
        cutoff_rate,
        fails_at_zero,
        volume,
        volume_monotone,
    })
}
