//! Volume-growth checks on pointed radial spaces: ratio monotonicity,
//! Bishop–Gromov growth, volume cones, 1D MCP densities, doubling and
//! Ahlfors-type regularity at the base point.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid;
use crate::report::{CheckReport, MonotonicityReport};
use crate::space::{conjugate, density_at, DensitySegment, PointedRadialSpace};

/// Relative tolerance for monotonicity claims on closed-form spaces.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Relative tolerance once tabulated densities are involved.
pub const TABULATED_TOL: f64 = 1e-6;

/// Maximum depth of the dyadic radius sequence used for the (AR) liminf.
pub const AR_DEPTH: u32 = 40;
/// Values above this are treated as divergence of the (AR) ratio.
pub const AR_DIVERGENCE: f64 = 1e12;
/// Log-log slope beyond which the (AR) ratio is considered to drift to 0 or infinity.
pub const AR_SLOPE_TOL: f64 = 1e-2;

pub fn default_tolerance(space: &PointedRadialSpace) -> f64 {
    if space.has_tabulated() {
        TABULATED_TOL
    } else {
        CLOSED_FORM_TOL
    }
}

/// Is `rho -> m(B_rho) / rho^(p' C)` non-decreasing on `grid`?
pub fn check_volume_ratio_monotone(
    space: &PointedRadialSpace,
    c: f64,
    p: f64,
    grid: &[f64],
    tol: f64,
) -> Result<MonotonicityReport> {
    grid::validate(grid)?;
    if !(p > 1.0) {
        return Err(Error::DomainError("p must lie in (1, inf)"));
    }
    let exponent = conjugate(p) * c;
    let ratios = grid.iter().map(|&r| space.ball_volume(r) / r.powf(exponent)).collect();
    Ok(MonotonicityReport::from_ratios(exponent, grid.to_vec(), ratios, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `rho -> m(B_rho)/rho^N` non-increasing.
    pub bishop_gromov: CheckReport,
    /// `rho -> m(B_rho)/rho^N` constant.
    pub cone: CheckReport,
    pub ratio_values: Vec<f64>,
}

pub fn check_gbgi_and_cone(space: &PointedRadialSpace, n: f64, grid: &[f64], tol: f64) -> Result<GrowthReport> {
    grid::validate(grid)?;
    let ratios: Vec<f64> = grid.iter().map(|&r| space.ball_volume(r) / r.powf(n)).collect();
    let scale = ratios.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst_rise = f64::NEG_INFINITY;
    let mut rise_at = (grid[0], grid[0]);
    for i in 1..grid.len() {
        let rise = ratios[i] - ratios[i - 1];
        if rise > worst_rise {
            worst_rise = rise;
            rise_at = (grid[i - 1], grid[i]);
        }
    }
    if grid.len() == 1 {
        worst_rise = 0.0;
    }
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, v) in ratios.iter().enumerate() {
        if *v < ratios[lo] {
            lo = i;
        }
        if *v > ratios[hi] {
            hi = i;
        }
    }
    let spread = ratios[hi] - ratios[lo];
    let bishop_gromov = CheckReport::new("bishop_gromov", -worst_rise, tol * scale)
        .with_value(worst_rise)
        .with_witness(alloc::vec![rise_at.0, rise_at.1]);
    let cone = CheckReport::new("volume_cone", -spread, tol * scale)
        .with_value(spread)
        .with_witness(alloc::vec![grid[lo], grid[hi]]);
    Ok(GrowthReport { bishop_gromov, cone, ratio_values: ratios })
}

/// Sample the 1D MCP(0,N) inequality `h(t x1 + (1-t) x0) >= (1-t)^(N-1) h(x0)`
/// over a `sample_count^3` lattice of triples.
///
/// The witness is `[x0, x1, t]` at the largest violation.
pub fn check_mcp_density(density: &[DensitySegment], n: f64, sample_count: usize, tol: f64) -> Result<CheckReport> {
    if density.is_empty() || sample_count < 2 {
        return Err(Error::DomainError("need a density and at least two samples"));
    }
    let lo = density[0].lower;
    let mut hi = density[density.len() - 1].upper;
    if !hi.is_finite() {
        let last_finite = density.iter().map(|s| s.lower).fold(lo, f64::max);
        hi = (2.0 * last_finite).max(10.0);
    }
    let pts: Vec<f64> = (0..sample_count)
        .map(|i| lo + (hi - lo) * i as f64 / (sample_count - 1) as f64)
        .collect();
    let ts: Vec<f64> = (0..sample_count).map(|i| i as f64 / (sample_count - 1) as f64).collect();
    let scale = pts.iter().map(|&x| density_at(density, x)).fold(0.0f64, f64::max);
    let mut worst = f64::INFINITY;
    let mut witness = alloc::vec![lo, lo, 0.0];
    for &x0 in &pts {
        let h0 = density_at(density, x0);
        for &x1 in &pts {
            for &t in &ts {
                let lhs = density_at(density, t * x1 + (1.0 - t) * x0);
                let rhs = mcp_weight(1.0 - t, n - 1.0) * h0;
                let slack = lhs - rhs;
                if slack < worst {
                    worst = slack;
                    witness = alloc::vec![x0, x1, t];
                }
            }
        }
    }
    Ok(CheckReport::new("mcp_density", worst, tol * scale.max(f64::MIN_POSITIVE)).with_witness(witness))
}

// (1-t)^(N-1) with 0^0 = 1.
fn mcp_weight(s: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        s.powf(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    /// Smallest admissible doubling constant `D` on the samples.
    pub doubling: CheckReport,
    /// Estimate of `liminf_{r->0} m(B_r(x0))/r^beta`.
    pub regularity: CheckReport,
    pub c_star: f64,
    pub diverges: bool,
    pub vanishes: bool,
}

/// Empirical (VD) constant at exponent `gamma` for balls centered at distance
/// `center_offset` from the base point, and the (AR) constant at `beta`.
///
/// `doubling.value` is the smallest `D` consistent with the samples, so the
/// doubling check passes whenever that constant is finite. The regularity check
/// passes when the dyadic ratio sequence settles to a positive finite value.
pub fn check_vd_ar(
    space: &PointedRadialSpace,
    gamma: f64,
    beta: f64,
    center_offset: f64,
    samples: usize,
) -> Result<DoublingReport> {
    if samples < 2 {
        return Err(Error::EmptyGrid);
    }
    let radii = grid::geometric(1e-3, 1e3, samples);
    let masses = radii
        .iter()
        .map(|&r| space.ball_volume_at(center_offset, r))
        .collect::<Result<Vec<f64>>>()?;
    let normalized: Vec<f64> = masses.iter().zip(&radii).map(|(m, r)| m / r.powf(gamma)).collect();
    let mut d = 1.0f64;
    let mut witness = alloc::vec![radii[0], radii[0], center_offset];
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            let q = normalized[j] / normalized[i];
            if q > d || q.is_nan() {
                d = q;
                witness = alloc::vec![radii[i], radii[j], center_offset];
            }
        }
    }
    let doubling = CheckReport::new("volume_doubling", if d.is_finite() { 0.0 } else { -1.0 }, 0.0)
        .with_value(d)
        .with_witness(witness);

    // Dyadic sequence r_j = 2^-j at the base point; the tail half estimates the liminf.
    let seq: Vec<(f64, f64)> = (0..=AR_DEPTH)
        .map(|j| {
            let r = libm::ldexp(1.0, -(j as i32));
            (r, space.ball_volume(r) / r.powf(beta))
        })
        .collect();
    let tail = &seq[seq.len() / 2..];
    let (mut c_star, mut at) = (f64::INFINITY, tail[0].0);
    for &(r, v) in tail {
        if v < c_star {
            c_star = v;
            at = r;
        }
    }
    let slope = loglog_slope(tail);
    let diverges = c_star > AR_DIVERGENCE || slope < -AR_SLOPE_TOL;
    let vanishes = !diverges && (c_star <= 0.0 || slope > AR_SLOPE_TOL);
    let ok = !diverges && !vanishes;
    let regularity = CheckReport::new("ahlfors_regularity", if ok { 0.0 } else { -1.0 }, 0.0)
        .with_value(c_star)
        .with_witness(alloc::vec![at, slope]);
    Ok(DoublingReport { doubling, regularity, c_star, diverges, vanishes })
}

/// Least-squares slope of `ln v` against `ln r`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs = points.iter().map(|(r, _)| r.ln());
    let ys = points.iter().map(|(_, v)| v.ln());
    let mx = xs.clone().sum::<f64>() / n;
    let my = ys.clone().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::unit_ball_volume;
    use crate::space::DensitySegment;
    use core::f64::consts::PI;

    fn power_space(coeff: f64, exponent: f64) -> PointedRadialSpace {
        PointedRadialSpace::new("p", alloc::vec![DensitySegment::power(0.0, f64::INFINITY, coeff, exponent)], 0.0, None)
            .unwrap()
    }

    #[test]
    fn cone_ratio_is_constant() {
        let n = 3.0;
        let cone = PointedRadialSpace::cone(1.0, n).unwrap();
        let rep = check_volume_ratio_monotone(&cone, n / 2.0, 2.0, &grid::default_radius_grid(), CLOSED_FORM_TOL)
            .unwrap();
        assert!(rep.pass);
        assert!(rep.min_forward_increment.abs() <= 1e-12 * unit_ball_volume(n));
        let below = check_volume_ratio_monotone(&cone, n / 2.0 - 0.1, 2.0, &grid::default_radius_grid(), 1e-9)
            .unwrap();
        assert!(below.pass && below.min_forward_increment > 0.0);
    }

    #[test]
    fn counterexample_ratio_decreases() {
        let ce = PointedRadialSpace::counterexample(1, 1.0).unwrap();
        let rep = check_volume_ratio_monotone(&ce, 0.5, 2.0, &grid::default_radius_grid(), 1e-9).unwrap();
        assert!(!rep.pass);
        // (2 rho + 1) / rho
        for (r, v) in rep.grid.iter().zip(&rep.ratio_values) {
            assert!((v - (2.0 * r + 1.0) / r).abs() <= 1e-12 * v);
        }
        assert_eq!(check_volume_ratio_monotone(&ce, 0.5, 2.0, &[], 1e-9), Err(Error::EmptyGrid));
    }

    #[test]
    fn growth_examples() {
        let grid = grid::geometric(1e-2, 1e2, 60);
        for &n in &[1.5, 2.0, 3.0] {
            let exact = check_gbgi_and_cone(&power_space(1.0, n - 1.0), n, &grid, 1e-9).unwrap();
            assert!(exact.bishop_gromov.pass && exact.cone.pass);
        }
        // Tabulated h = r (1 + r), N = 2: ratio 1/2 + rho/3, increasing.
        let table = |f: &dyn Fn(f64) -> f64| {
            let radii: Vec<f64> = (0..=6000).map(|i| i as f64 * 0.005).collect();
            let values: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
            PointedRadialSpace::new(
                "tab",
                alloc::vec![
                    DensitySegment::tabulated(radii, values),
                    DensitySegment::power(30.0, f64::INFINITY, 0.0, 0.0)
                ],
                0.0,
                None,
            )
            .unwrap()
        };
        let grid = grid::geometric(0.05, 20.0, 80);
        let poly = table(&|r| r * (1.0 + r));
        let rep = check_gbgi_and_cone(&poly, 2.0, &grid, TABULATED_TOL).unwrap();
        assert!(!rep.bishop_gromov.pass && !rep.cone.pass);
        for (r, v) in grid.iter().zip(&rep.ratio_values) {
            let oracle = 0.5 + r / 3.0;
            // Linear interpolation with step 0.005 and |h''| <= 2 shifts the ratio by at most h^2 / (6 rho).
            let interp = 0.005f64.powi(2) / (6.0 * r) * 1.01;
            assert!((v - oracle).abs() <= interp + 1e-9, "rho={r} v={v} o={oracle}");
        }
        // Tabulated h = r e^{-r}, N = 2: ratio (1 - (1 + rho) e^{-rho}) / rho^2.
        let decay = table(&|r| r * (-r).exp());
        let rep = check_gbgi_and_cone(&decay, 2.0, &grid, TABULATED_TOL).unwrap();
        assert!(rep.bishop_gromov.pass && !rep.cone.pass);
        for (r, v) in grid.iter().zip(&rep.ratio_values) {
            let oracle = (1.0 - (1.0 + r) * (-r).exp()) / (r * r);
            // Linear interpolation with step 0.005 and |h''| <= 2 shifts the ratio by at most h^2 / (6 rho).
            let interp = 0.005f64.powi(2) / (6.0 * r) * 1.01;
            assert!((v - oracle).abs() <= interp + 1e-9, "rho={r} v={v} o={oracle}");
        }
    }

    #[test]
    fn mcp_examples() {
        for &n in &[1.0, 2.0, 3.5] {
            let h = alloc::vec![DensitySegment::power(0.0, f64::INFINITY, 1.0, n - 1.0)];
            let rep = check_mcp_density(&h, n, 21, 1e-12).unwrap();
            assert!(rep.pass, "N={n} margin={}", rep.margin);
        }
        // equality at x1 = 0
        let x0: f64 = 2.0;
        let t = 0.25;
        assert!((((1.0 - t) * x0).powf(2.0) - (1.0f64 - t).powf(2.0) * x0.powf(2.0)).abs() < 1e-14);

        let radii: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let values: Vec<f64> = radii.iter().map(|r| r.exp()).collect();
        let exp = alloc::vec![DensitySegment::tabulated(radii, values)];
        let rep = check_mcp_density(&exp, 1.0, 11, 1e-12).unwrap();
        assert!(!rep.pass);
        let (x0, x1, t) = (rep.witness[0], rep.witness[1], rep.witness[2]);
        assert!(density_at(&exp, t * x1 + (1.0 - t) * x0) < density_at(&exp, x0));
        assert!(density_at(&exp, 0.5) < density_at(&exp, 1.0));

        let flat = alloc::vec![DensitySegment::power(0.0, 5.0, 3.0, 0.0)];
        assert!(check_mcp_density(&flat, 1.0, 11, 1e-12).unwrap().pass);
    }

    #[test]
    fn mcp_power_density_dimension_direction() {
        // x^(N-1) is MCP(0,N') exactly when N' >= N.
        let n = 3.0;
        let h = alloc::vec![DensitySegment::power(0.0, f64::INFINITY, 1.0, n - 1.0)];
        for &np in &[3.0, 3.5, 5.0] {
            assert!(check_mcp_density(&h, np, 21, 1e-12).unwrap().pass);
        }
        for &np in &[1.0, 2.0, 2.5] {
            assert!(!check_mcp_density(&h, np, 21, 1e-12).unwrap().pass);
        }
    }

    #[test]
    fn vd_ar_euclidean() {
        for n in 1..=3u32 {
            let space = PointedRadialSpace::euclidean(n).unwrap();
            let rep = check_vd_ar(&space, n as f64, n as f64, 2.5, 40).unwrap();
            assert!((rep.doubling.value - 1.0).abs() < 1e-9);
            assert!(rep.regularity.pass);
            assert!((rep.c_star - unit_ball_volume(n as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn vd_half_line_and_atom_divergence() {
        let h = PointedRadialSpace::half_line().unwrap();
        let at0 = check_vd_ar(&h, 1.0, 1.0, 0.0, 60).unwrap();
        assert!((at0.doubling.value - 1.0).abs() < 1e-12);
        let off = check_vd_ar(&h, 1.0, 1.0, 3.0, 60).unwrap();
        assert!(off.doubling.value <= 2.0 + 1e-12 && off.doubling.value >= 1.0);
        assert!(off.doubling.pass);

        let ce = PointedRadialSpace::counterexample(1, 1.0).unwrap();
        for &beta in &[0.1, 0.5, 1.0, 2.0] {
            let rep = check_vd_ar(&ce, 1.0, beta, 0.0, 40).unwrap();
            assert!(rep.diverges && !rep.regularity.pass, "beta={beta}");
        }
        let cone = PointedRadialSpace::cone(2.0, 2.5).unwrap();
        assert_eq!(check_vd_ar(&cone, 2.5, 2.5, 1.0, 10), Err(Error::UnsupportedOffCenter));
        let _ = PI;
    }
}
