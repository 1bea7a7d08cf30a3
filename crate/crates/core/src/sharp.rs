//! Variational upper estimates of the sharp CKN constant.
//!
//! The estimate is the infimum of the ratio over the searched family only.
//! It bounds the true sharp constant from above and says nothing about
//! non-radial or out-of-family competitors.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ckn::ckn_integrals;
use crate::error::{Error, Result};
use crate::grid;
use crate::optimize::{golden_section, nelder_mead, SimplexSettings};
use crate::profiles::{make_family, FamilySpec, RadialProfile, DEFAULT_BASIS_SIZE, DEFAULT_COEFF_BOX};
use crate::quadrature::QuadratureSpec;
use crate::space::{conjugate, PointedRadialSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSpec {
    pub restarts: usize,
    pub simplex: SimplexSettings,
    pub basis_size: usize,
    /// Coefficients are confined to `[-half_width, half_width]^J`.
    pub half_width: f64,
    /// Restart `i` starts at `corner_scale * half_width * s_i` with sign pattern `s_i`.
    pub corner_scale: f64,
    pub lambda_grid: Vec<f64>,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        Self {
            restarts: 8,
            simplex: SimplexSettings::default(),
            basis_size: DEFAULT_BASIS_SIZE,
            half_width: DEFAULT_COEFF_BOX,
            corner_scale: 0.5,
            lambda_grid: grid::default_lambda_grid(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    LambdaLine,
    Simplex { restart: usize },
    Family { member: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub stage: Stage,
    /// `[lambda]` on the line, the coefficient vector in the simplex, empty for family members.
    pub params: Vec<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpEstimate {
    /// Family infimum of the normalized ratio, comparable to `(C + k) / (p - 1)`.
    pub estimate: f64,
    /// `estimate (p - 1) - k`: the largest `C` not yet refuted by the family.
    pub implied_constant: f64,
    pub argmin: RadialProfile,
    pub trace: Vec<TraceEntry>,
    /// Some simplex restart hit its iteration cap before converging.
    pub stalled: bool,
}

fn ratio_of(space: &PointedRadialSpace, u: &RadialProfile, k: u32, p: f64, quad: &QuadratureSpec) -> f64 {
    match ckn_integrals(space, u, k, p, quad).and_then(|t| t.ratio()) {
        Ok(r) if r.is_finite() => r,
        _ => f64::INFINITY,
    }
}

fn line_profile(lambda: f64, p: f64) -> Result<RadialProfile> {
    if p == 2.0 {
        RadialProfile::gaussian(1.0, lambda)
    } else {
        RadialProfile::generalized_gaussian(1.0, lambda, conjugate(p))
    }
}

/// Infimum of the ratio over the Gaussian line, a perturbed-Gaussian simplex
/// search around the best line point, and every member of `family`.
///
/// For `p != 2` the line consists of `e^(-lambda r^p')`.
pub fn estimate_sharp_constant(
    space: &PointedRadialSpace,
    k: u32,
    p: f64,
    family: Option<&FamilySpec>,
    opt: &OptimizerSpec,
    quad: &QuadratureSpec,
) -> Result<SharpEstimate> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::DomainError("p must lie in (1, inf)"));
    }
    grid::validate(&opt.lambda_grid)?;
    if opt.restarts == 0 || opt.basis_size == 0 || !(opt.half_width > 0.0) {
        return Err(Error::BadSpec("optimizer needs restarts, a basis and a positive box"));
    }
    let mut trace = Vec::new();

    let mut best_lambda = opt.lambda_grid[0];
    let mut best = f64::INFINITY;
    for &lam in &opt.lambda_grid {
        let r = ratio_of(space, &line_profile(lam, p)?, k, p, quad);
        trace.push(TraceEntry { stage: Stage::LambdaLine, params: alloc::vec![lam], ratio: r });
        if r < best {
            best = r;
            best_lambda = lam;
        }
    }
    // Refine in log(lambda) between the grid neighbours of the best node.
    let idx = opt.lambda_grid.iter().position(|&l| l == best_lambda).unwrap_or(0);
    let lo = opt.lambda_grid[idx.saturating_sub(1)].ln();
    let hi = opt.lambda_grid[(idx + 1).min(opt.lambda_grid.len() - 1)].ln();
    if hi > lo {
        let mut line_trace = Vec::new();
        let (t, r) = golden_section(
            |t| {
                let r = line_profile(t.exp(), p).map_or(f64::INFINITY, |u| ratio_of(space, &u, k, p, quad));
                line_trace.push(TraceEntry { stage: Stage::LambdaLine, params: alloc::vec![t.exp()], ratio: r });
                r
            },
            lo,
            hi,
            1e-6,
            100,
        );
        trace.extend(line_trace);
        if r < best {
            best = r;
            best_lambda = t.exp();
        }
    }
    let mut argmin = line_profile(best_lambda, p)?;

    let j = opt.basis_size;
    let w = opt.half_width;
    let mut stalled = false;
    for restart in 0..opt.restarts {
        let x0: Vec<f64> = (0..j)
            .map(|i| {
                let bit = (restart >> (i % usize::BITS as usize)) & 1;
                let sign = if bit == 1 { -1.0 } else { 1.0 };
                // Alternate the leading sign so restarts 0 and 1 differ in every coordinate.
                let flip = if restart % 2 == 1 && i > 0 { -1.0 } else { 1.0 };
                sign * flip * opt.corner_scale * w
            })
            .collect();
        let mut local = Vec::new();
        let res = nelder_mead(
            |a| {
                if a.iter().any(|v| v.abs() > w) {
                    return f64::INFINITY;
                }
                let r = RadialProfile::perturbed_gaussian(best_lambda, a.to_vec())
                    .map_or(f64::INFINITY, |u| ratio_of(space, &u, k, p, quad));
                local.push(TraceEntry { stage: Stage::Simplex { restart }, params: a.to_vec(), ratio: r });
                r
            },
            &x0,
            &opt.simplex,
        );
        trace.extend(local);
        stalled |= !res.converged;
        if res.value < best {
            best = res.value;
            argmin = RadialProfile::perturbed_gaussian(best_lambda, res.x)?;
        }
    }

    if let Some(spec) = family {
        for (member, u) in make_family(spec)?.into_iter().enumerate() {
            let r = ratio_of(space, &u, k, p, quad);
            trace.push(TraceEntry { stage: Stage::Family { member }, params: Vec::new(), ratio: r });
            if r < best {
                best = r;
                argmin = u;
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::NonIntegrable("no family member produced a finite ratio"));
    }
    Ok(SharpEstimate {
        estimate: best,
        implied_constant: best * (p - 1.0) - k as f64,
        argmin,
        trace,
        stalled,
    })
}
