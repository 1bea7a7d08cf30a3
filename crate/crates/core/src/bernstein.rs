//! Laplace-transform chain of the radial volume.
//!
//! With `q = p'`, `P(lambda) = int e^(-p lambda d^q) dm` and
//! `S_k = (-1)^k P^(k) = int (p d^q)^k e^(-p lambda d^q) dm`. The chain
//! inequality `lambda S_(k+1) >= (C + k) S_k` for all `k` makes
//! `R = -lambda Q' - (C + 1) Q`, `Q = P / lambda`, completely monotone, and
//! forces `rho -> m(B_rho) / rho^(q C)` to be non-decreasing.
//!
//! Complete monotonicity is only ever certified on a finite `(k, lambda)` grid.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid;
use crate::quadrature::{integrate_halfline, QuadratureSpec};
use crate::report::MonotonicityReport;
use crate::space::{conjugate, PointedRadialSpace};
use crate::special::power_exp_tail;

/// Default largest `k` in chain tables.
pub const DEFAULT_K_MAX: u32 = 6;

/// Quadrature settings for chain tables. The combination formula cancels
/// terms of size `S_(k+1)`, so the integrals are pushed close to round-off.
pub fn chain_quadrature() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-14).with_abs_tol(1e-300)
}

fn check_lambda(lam: f64) -> Result<()> {
    if !(lam.is_finite() && lam > 0.0) {
        return Err(Error::DomainError("lambda must be positive"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::DomainError("p must lie in (1, inf)"));
    }
    Ok(())
}

/// `S_k(lambda)` by quadrature of its integral form; `S_0 = P`.
/// The origin atom contributes only to `S_0`.
pub fn s_k_value(space: &PointedRadialSpace, lam: f64, k: u32, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_lambda(lam)?;
    check_p(p)?;
    let q = conjugate(p);
    let kf = k as f64;
    let f = |r: f64| {
        let rq = r.powf(q);
        let w = if k == 0 { 1.0 } else { (p * rq).powi(k as i32) };
        w * (-p * lam * rq).exp() * space.density(r)
    };
    // On the power tail c r^a the remainder is an incomplete gamma integral.
    let (start, coeff, a) = space.tail_power();
    let tail = |r: f64| {
        if r < start {
            return f64::INFINITY;
        }
        coeff.abs() * p.powf(kf) * power_exp_tail(q * kf + a, p * lam, q, r)
    };
    let res = integrate_halfline(f, &space.breakpoints(), Some(&tail), spec)?;
    let atom = if k == 0 { space.atom_mass() } else { 0.0 };
    let v = res.value + atom;
    if !v.is_finite() {
        return Err(Error::NonIntegrable("S_k is not finite"));
    }
    Ok(v)
}

/// `S_0(lambda), ..., S_(k_max)(lambda)`.
pub fn s_values(space: &PointedRadialSpace, lam: f64, k_max: u32, p: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    (0..=k_max).map(|k| s_k_value(space, lam, k, p, spec)).collect()
}

/// `(-1)^k R^(k)(lambda) = S_(k+1) - C sum_(i<=k) k!/i! S_i / lambda^(k-i+1)`
/// from precomputed `s[0..=k+1]`.
pub fn r_derivative_from(s: &[f64], c: f64, lam: f64, k: u32) -> f64 {
    let k = k as usize;
    let mut sum = 0.0;
    // k!/i! / lambda^(k-i+1), built from i = k downwards.
    let mut coef = 1.0 / lam;
    for i in (0..=k).rev() {
        sum += coef * s[i];
        coef *= i as f64 / lam;
    }
    s[k + 1] - c * sum
}

pub fn r_derivative(space: &PointedRadialSpace, c: f64, lam: f64, k: u32, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    let s = s_values(space, lam, k + 1, p, spec)?;
    Ok(r_derivative_from(&s, c, lam, k))
}

/// `lambda S_(k+1) - (C + k) S_k`, indexed `[lambda][k]` for `k = 0..=k_max`.
pub fn chain_margin(
    space: &PointedRadialSpace,
    c: f64,
    lambda_grid: &[f64],
    k_max: u32,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Vec<f64>>> {
    grid::validate(lambda_grid)?;
    lambda_grid
        .iter()
        .map(|&lam| {
            let s = s_values(space, lam, k_max + 1, p, spec)?;
            Ok((0..=k_max as usize).map(|k| lam * s[k + 1] - (c + k as f64) * s[k]).collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinTable {
    pub space_label: String,
    pub p: f64,
    pub c: f64,
    pub lambda_grid: Vec<f64>,
    pub k_max: u32,
    /// `s_values[i][k] = S_k(lambda_i)` for `k = 0..=k_max + 1`.
    pub s_values: Vec<Vec<f64>>,
    /// `[i][k]`, `k = 0..=k_max`.
    pub r_derivatives: Vec<Vec<f64>>,
    /// `[i][k]`, `k = 0..=k_max`.
    pub chain_margins: Vec<Vec<f64>>,
}

impl BernsteinTable {
    pub fn build(
        space: &PointedRadialSpace,
        c: f64,
        lambda_grid: &[f64],
        k_max: u32,
        p: f64,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        grid::validate(lambda_grid)?;
        let mut s_all = Vec::new();
        let mut r_all = Vec::new();
        let mut m_all = Vec::new();
        for &lam in lambda_grid {
            let s = s_values(space, lam, k_max + 1, p, spec)?;
            let ks = 0..=k_max;
            r_all.push(ks.clone().map(|k| r_derivative_from(&s, c, lam, k)).collect());
            m_all.push(ks.map(|k| lam * s[k as usize + 1] - (c + k as f64) * s[k as usize]).collect());
            s_all.push(s);
        }
        Ok(Self {
            space_label: space.label().into(),
            p,
            c,
            lambda_grid: lambda_grid.to_vec(),
            k_max,
            s_values: s_all,
            r_derivatives: r_all,
            chain_margins: m_all,
        })
    }

    /// Smallest `chain_margin / S_k` over the table.
    pub fn min_relative_chain_margin(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for (m, s) in self.chain_margins.iter().zip(&self.s_values) {
            for k in 0..m.len() {
                worst = worst.min(m[k] / s[k]);
            }
        }
        worst
    }

    /// Smallest `(-1)^k R^(k) lambda^(k+1) / S_0` over the table.
    pub fn min_scaled_r_derivative(&self) -> f64 {
        self.scaled_r_derivatives().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|(-1)^k R^(k)| lambda^(k+1) / S_0` over the table.
    pub fn max_abs_scaled_r_derivative(&self) -> f64 {
        self.scaled_r_derivatives().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn scaled_r_derivatives(&self) -> impl Iterator<Item = f64> + '_ {
        self.r_derivatives.iter().enumerate().flat_map(move |(i, row)| {
            let lam = self.lambda_grid[i];
            let s0 = self.s_values[i][0];
            row.iter().enumerate().map(move |(k, r)| r * lam.powi(k as i32 + 1) / s0)
        })
    }

    /// Chain inequality holds on the whole grid, up to `tol S_k`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.min_relative_chain_margin() >= -tol
    }

    /// Every tabulated `(-1)^k R^(k)` is nonnegative, up to `tol S_0 / lambda^(k+1)`.
    /// This certifies complete monotonicity on the grid only.
    pub fn certified_on_grid(&self, tol: f64) -> bool {
        self.min_scaled_r_derivative() >= -tol
    }
}

/// Largest `C` with `lambda S_(k+1) >= (C + k) S_k` on the grid for all `k <= k_max`.
pub fn chain_constant(
    space: &PointedRadialSpace,
    lambda_grid: &[f64],
    k_max: u32,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    grid::validate(lambda_grid)?;
    let mut c = f64::INFINITY;
    for &lam in lambda_grid {
        let s = s_values(space, lam, k_max + 1, p, spec)?;
        for k in 0..=k_max as usize {
            c = c.min(lam * s[k + 1] / s[k] - k as f64);
        }
    }
    Ok(c)
}

/// Samples of `f(tau) = m(closed ball of radius (tau / p)^(1/p'))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FProfile {
    pub space_label: String,
    pub p: f64,
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn tau_to_radius(tau: f64, p: f64) -> f64 {
    (tau / p).powf(1.0 / conjugate(p))
}

pub fn radius_to_tau(rho: f64, p: f64) -> f64 {
    p * rho.powf(conjugate(p))
}

pub fn f_profile(space: &PointedRadialSpace, tau_grid: &[f64], p: f64) -> Result<FProfile> {
    check_p(p)?;
    grid::validate(tau_grid)?;
    Ok(FProfile {
        space_label: space.label().into(),
        p,
        tau: tau_grid.to_vec(),
        values: tau_grid.iter().map(|&t| space.ball_volume(tau_to_radius(t, p))).collect(),
    })
}

/// Monotonicity of `v -> f(v) / v^C` on `tau_grid`.
pub fn volume_ratio_from_f(
    space: &PointedRadialSpace,
    c: f64,
    tau_grid: &[f64],
    p: f64,
    tol: f64,
) -> Result<MonotonicityReport> {
    let f = f_profile(space, tau_grid, p)?;
    let ratios = f.tau.iter().zip(&f.values).map(|(t, v)| v / t.powf(c)).collect();
    Ok(MonotonicityReport::from_ratios(c, f.tau, ratios, tol))
}

/// Second-order central difference of `P` of order `k` with step `h`.
/// A diagnostic for the integral form of `S_k`; unusable as a production value.
pub fn finite_difference_s_k(
    space: &PointedRadialSpace,
    lam: f64,
    k: u32,
    p: f64,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if k == 0 {
        return s_k_value(space, lam, 0, p, spec);
    }
    if !(h > 0.0 && h < lam) {
        return Err(Error::DomainError("finite-difference step must lie in (0, lambda)"));
    }
    // Central stencil: sum_j (-1)^j C(k, j) P(lam + (k/2 - j) h) / h^k, exact for
    // polynomials of degree k + 1.
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let x = lam + (k as f64 / 2.0 - j as f64) * h;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * s_k_value(space, x, 0, p, spec)?;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let deriv = acc / h.powi(k as i32);
    Ok(if k % 2 == 0 { deriv } else { -deriv })
}

/// Step balancing truncation `h^2` against round-off `eps / h^k` for a
/// `P` known to relative accuracy `eps`. The factor 1/4 accounts for the
/// growth of `S_(k+2) / S_k` in the truncation term.
pub fn finite_difference_step(lam: f64, k: u32, eps: f64) -> f64 {
    0.25 * lam * eps.powf(1.0 / (k as f64 + 2.0))
}
