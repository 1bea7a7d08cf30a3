//! The CKN integral triple, inequality margins and the deficit.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::profiles::{make_family, FamilySpec, RadialProfile};
use crate::quadrature::{integrate_halfline, integrate_interval, QuadratureSpec};
use crate::report::CheckReport;
use crate::space::{conjugate, PointedRadialSpace};
use crate::special::power_exp_tail;

/// `i_grad = int r^(p'k) |u'|^p dm`, `i_pot = int r^(p'(k+1)) |u|^p dm`,
/// `i_mid = int r^(p'k) |u|^p dm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CknIntegrals {
    pub i_grad: f64,
    pub i_pot: f64,
    pub i_mid: f64,
    pub k: u32,
    pub p: f64,
    /// Quadrature error plus truncation bound, per integral.
    pub errors: [f64; 3],
}

impl CknIntegrals {
    /// `(i_grad i_pot^(p-1))^(1/p) / i_mid`; reduces to `sqrt(i_grad i_pot) / i_mid` at `p = 2`.
    pub fn ratio(&self) -> Result<f64> {
        if !(self.i_mid > 0.0) {
            return Err(Error::DegenerateProfile("i_mid vanishes"));
        }
        let p = self.p;
        Ok((self.i_grad * self.i_pot.powf(p - 1.0)).powf(1.0 / p) / self.i_mid)
    }

    /// Relative uncertainty of [`Self::ratio`] propagated from the integral errors.
    pub fn ratio_rel_error(&self) -> f64 {
        let rel = |e: f64, v: f64| if v > 0.0 { e / v } else { 0.0 };
        let p = self.p;
        (rel(self.errors[0], self.i_grad) + (p - 1.0) * rel(self.errors[1], self.i_pot)) / p
            + rel(self.errors[2], self.i_mid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CknReport {
    pub ratio: f64,
    /// `(C + k) / (p - 1)`, i.e. `C + k` at `p = 2`.
    pub target: f64,
    pub margin: f64,
    /// `sqrt(i_grad i_pot) - (N/2 + k) i_mid`; only for `p = 2` with a known dimension.
    pub deficit: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub integrals: CknIntegrals,
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::DomainError("p must lie in (1, inf)"));
    }
    Ok(())
}

/// Compute the CKN triple of the radial function `u0(r)` on `space`.
///
/// A point mass at the base point enters only when `k = 0`: it adds
/// `M |u(0)|^p` to `i_mid` and `M |u'(0+)|^p` to `i_grad` (with `0^0 = 1`).
pub fn ckn_integrals(
    space: &PointedRadialSpace,
    u: &RadialProfile,
    k: u32,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<CknIntegrals> {
    check_exponent(p)?;
    let q = conjugate(p);
    let wk = q * k as f64;
    let wk1 = q * (k as f64 + 1.0);
    let mut cuts = space.breakpoints();
    cuts.extend(u.breakpoints());

    let weight = |r: f64, w: f64| if w == 0.0 { 1.0 } else { r.powf(w) };
    let grad = |r: f64| {
        let (_, d) = u.eval(r);
        weight(r, wk) * d.powf(p) * space.density(r)
    };
    let pot = |r: f64| weight(r, wk1) * u.value(r).abs().powf(p) * space.density(r);
    let mid = |r: f64| weight(r, wk) * u.value(r).abs().powf(p) * space.density(r);

    let mut vals = [0.0; 3];
    let mut errs = [0.0; 3];
    match u.support_end() {
        Some(end) => {
            let a = u.support_start();
            for (i, f) in [&grad as &dyn Fn(f64) -> f64, &pot, &mid].into_iter().enumerate() {
                let res = integrate_interval(f, a, end, &cuts, spec)?;
                vals[i] = res.value;
                errs[i] = res.error_estimate;
            }
        }
        None => {
            let env = u.envelope().ok_or(Error::NonIntegrable("profile has neither bounded support nor a decay envelope"))?;
            let (start, coeff, a) = space.tail_power();
            let tail = |w: f64| {
                move |r: f64| {
                    if r < start.max(1.0) {
                        return f64::INFINITY;
                    }
                    // On r >= 1: (1 + r)^deg <= 2^deg r^deg.
                    let m = p * env.degree + w + a;
                    coeff.abs() * env.amplitude.powf(p) * 2f64.powf(p * env.degree)
                        * power_exp_tail(m, p * env.rate, env.power, r)
                }
            };
            let bounds = [tail(wk), tail(wk1), tail(wk)];
            for (i, f) in [&grad as &dyn Fn(f64) -> f64, &pot, &mid].into_iter().enumerate() {
                let b: &dyn Fn(f64) -> f64 = &bounds[i];
                let res = integrate_halfline(f, &cuts, Some(b), spec)?;
                vals[i] = res.value;
                errs[i] = res.error_estimate + res.truncation_bound.unwrap_or(0.0);
            }
        }
    }
    let atom = space.atom_mass();
    if k == 0 && atom > 0.0 {
        let (v, d) = u.eval(0.0);
        vals[0] += atom * d.powf(p);
        vals[2] += atom * v.abs().powf(p);
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonIntegrable("CKN integral is not finite"));
    }
    Ok(CknIntegrals { i_grad: vals[0], i_pot: vals[1], i_mid: vals[2], k, p, errors: errs })
}

/// Compare the CKN ratio of `u` against `(C + k) / (p - 1)`.
///
/// The tolerance is ten times the propagated quadrature uncertainty of the
/// ratio, floored at ten times the requested relative tolerance.
pub fn ckn_check(
    space: &PointedRadialSpace,
    u: &RadialProfile,
    k: u32,
    p: f64,
    c: f64,
    spec: &QuadratureSpec,
) -> Result<CknReport> {
    let ints = ckn_integrals(space, u, k, p, spec)?;
    let ratio = ints.ratio()?;
    let target = (c + k as f64) / (p - 1.0);
    let margin = ratio - target;
    let tolerance = 10.0 * ints.ratio_rel_error().max(spec.rel_tol) * ratio.max(target.abs());
    let deficit = match space.dim_hint() {
        Some(n) if p == 2.0 => Some((ints.i_grad * ints.i_pot).sqrt() - (n / 2.0 + k as f64) * ints.i_mid),
        _ => None,
    };
    Ok(CknReport { ratio, target, margin, deficit, tolerance, pass: margin >= -tolerance, integrals: ints })
}

/// Smallest margin over a family for each `k = 0..=k_max`, against `C + k`.
///
/// The witness of each report is `[k, member index, ratio]`.
pub fn verify_uniform_sequence(
    space: &PointedRadialSpace,
    c: f64,
    p: f64,
    k_max: u32,
    family: &FamilySpec,
    spec: &QuadratureSpec,
) -> Result<Vec<CheckReport>> {
    verify_k_range(space, c, p, 0, k_max, family, spec)
}

/// [`verify_uniform_sequence`] restricted to `k = k_min..=k_max`.
pub fn verify_k_range(
    space: &PointedRadialSpace,
    c: f64,
    p: f64,
    k_min: u32,
    k_max: u32,
    family: &FamilySpec,
    spec: &QuadratureSpec,
) -> Result<Vec<CheckReport>> {
    let members = make_family(family)?;
    let mut out = Vec::new();
    for k in k_min..=k_max {
        let mut worst: Option<(usize, CknReport)> = None;
        for (i, u) in members.iter().enumerate() {
            let rep = ckn_check(space, u, k, p, c, spec)?;
            let slack = rep.margin + rep.tolerance;
            if worst.as_ref().is_none_or(|(_, w)| slack < w.margin + w.tolerance) {
                worst = Some((i, rep));
            }
        }
        let (i, rep) = worst.expect("family is nonempty");
        out.push(
            CheckReport::new(alloc::format!("ckn k={k}"), rep.margin, rep.tolerance)
                .with_value(rep.ratio)
                .with_witness(alloc::vec![k as f64, i as f64, rep.ratio]),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::FamilyPart;
    use crate::quadrature::gaussian_moment;
    use core::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn plane_gaussian_triple() {
        let r2 = PointedRadialSpace::euclidean(2).unwrap();
        let g = RadialProfile::gaussian(1.0, 1.0).unwrap();
        let t = ckn_integrals(&r2, &g, 0, 2.0, &spec()).unwrap();
        // |u'|^2 = 4 r^2 e^{-2r^2}, area element 2 pi r.
        let m3 = gaussian_moment(3.0, 1.0).unwrap();
        let m1 = gaussian_moment(1.0, 1.0).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y;
        assert!(close(t.i_grad, 8.0 * PI * m3) && close(t.i_pot, 2.0 * PI * m3) && close(t.i_mid, 2.0 * PI * m1));
        assert!(close(t.i_grad, PI) && close(t.i_pot, PI / 4.0) && close(t.i_mid, PI / 2.0));
    }

    #[test]
    fn zero_profile_is_degenerate() {
        let r2 = PointedRadialSpace::euclidean(2).unwrap();
        let z = RadialProfile::gaussian(0.0, 1.0).unwrap();
        let t = ckn_integrals(&r2, &z, 0, 2.0, &spec()).unwrap();
        assert_eq!((t.i_grad, t.i_pot, t.i_mid), (0.0, 0.0, 0.0));
        assert_eq!(ckn_check(&r2, &z, 0, 2.0, 1.0, &spec()).unwrap_err(), Error::DegenerateProfile("i_mid vanishes"));
    }

    #[test]
    fn gaussian_equality_on_cones() {
        for &(a, n) in &[(1.0, 2.0), (0.3, 3.0), (1.0, 1.5), (2.0, 5.0)] {
            let cone = PointedRadialSpace::cone(a, n).unwrap();
            for &lam in &[0.25, 1.0, 4.0] {
                let g = RadialProfile::gaussian(1.7, lam).unwrap();
                for k in 0..=6 {
                    let rep = ckn_check(&cone, &g, k, 2.0, n / 2.0, &spec()).unwrap();
                    assert!(rep.margin.abs() <= 10.0 * 1e-10 * rep.target, "N={n} k={k} lam={lam} m={}", rep.margin);
                    assert!(rep.pass);
                    assert!(rep.deficit.unwrap().abs() < 1e-8 * rep.integrals.i_mid.max(1e-300) * 100.0);
                }
            }
        }
    }

    #[test]
    fn lp_generalized_gaussian_equality() {
        // e^{-lambda r^p'} gives ratio (k + N/p') / (p - 1), i.e. C = N / p'.
        for &p in &[1.5, 3.0] {
            let q = conjugate(p);
            for &n in &[2.0, 3.0] {
                let cone = PointedRadialSpace::cone(1.0, n).unwrap();
                let u = RadialProfile::generalized_gaussian(1.0, 0.8, q).unwrap();
                for k in 0..=3 {
                    let rep = ckn_check(&cone, &u, k, p, n / q, &spec()).unwrap();
                    assert!(rep.margin.abs() < 1e-8, "p={p} N={n} k={k} m={}", rep.margin);
                }
            }
        }
    }

    #[test]
    fn bump_in_plane_satisfies_k0() {
        let r2 = PointedRadialSpace::euclidean(2).unwrap();
        let u = RadialProfile::bump(
            alloc::vec![0.2, 0.7, 1.1, 1.8],
            alloc::vec![0.0, 1.0, -0.4, 0.0],
            alloc::vec![0.0, 0.5, 1.0, 0.0],
        )
        .unwrap();
        let rep = ckn_check(&r2, &u, 0, 2.0, 1.0, &spec()).unwrap();
        assert!(rep.pass && rep.margin > 0.0);
    }

    #[test]
    fn scaling_invariance() {
        let cone = PointedRadialSpace::cone(1.0, 3.0).unwrap();
        let u = RadialProfile::perturbed_gaussian(1.3, alloc::vec![0.3, -0.2, 0.1]).unwrap();
        let base = ckn_check(&cone, &u, 1, 2.0, 1.5, &spec()).unwrap().ratio;
        for &c in &[-2.0, 1e-3, 50.0] {
            let r = ckn_check(&cone, &u.scaled(c), 1, 2.0, 1.5, &spec()).unwrap().ratio;
            assert!((r - base).abs() <= 1e-12 * base, "c={c}");
        }
    }

    #[test]
    fn dilation_covariance() {
        let cone = PointedRadialSpace::cone(1.0, 2.5).unwrap();
        let ratio = |lam: f64| {
            let g = RadialProfile::gaussian(1.0, lam).unwrap();
            ckn_integrals(&cone, &g, 2, 2.0, &spec()).unwrap().ratio().unwrap()
        };
        let base = ratio(1.0);
        for &s in &[0.25, 4.0] {
            assert!((ratio(s) - base).abs() < 1e-10 * base);
        }
    }

    #[test]
    fn truncation_consistency() {
        let r3 = PointedRadialSpace::euclidean(3).unwrap();
        for &lam in &[0.25, 1.0] {
            let g = ckn_integrals(&r3, &RadialProfile::gaussian(1.0, lam).unwrap(), 1, 2.0, &spec())
                .unwrap()
                .ratio()
                .unwrap();
            let gaps: Vec<f64> = (1..=12)
                .map(|l| {
                    let t = RadialProfile::truncated_gaussian(1.0, lam, l as f64).unwrap();
                    ckn_integrals(&r3, &t, 1, 2.0, &spec()).unwrap().ratio().unwrap() - g
                })
                .collect();
            assert!(gaps.last().unwrap().abs() < 1e-6, "lam={lam} gaps={gaps:?}");
        }
    }

    #[test]
    fn lifting_identity() {
        let sp = PointedRadialSpace::new(
            "mixed",
            alloc::vec![
                crate::space::DensitySegment::tabulated(alloc::vec![0.0, 0.5, 1.0, 2.0], alloc::vec![0.0, 0.4, 1.5, 2.0]),
                crate::space::DensitySegment::power(2.0, f64::INFINITY, 1.0, 1.0),
            ],
            0.0,
            None,
        )
        .unwrap();
        let u = RadialProfile::gaussian(1.0, 0.6).unwrap();
        for ell in 1..=3 {
            let lifted = sp.lift(ell, 2.0).unwrap();
            for k in 0..=2 {
                let a = ckn_integrals(&sp, &u, k + ell, 2.0, &spec()).unwrap();
                let b = ckn_integrals(&lifted, &u, k, 2.0, &spec()).unwrap();
                for (x, y) in [(a.i_grad, b.i_grad), (a.i_pot, b.i_pot), (a.i_mid, b.i_mid)] {
                    assert!((x - y).abs() <= 1e-9 * x.abs(), "ell={ell} k={k} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn counterexample_cutoff_collapse() {
        let sp = PointedRadialSpace::counterexample(1, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for j in 2..=10 {
            let e = libm::ldexp(1.0, -j);
            let t = ckn_integrals(&sp, &RadialProfile::cutoff(e).unwrap(), 0, 2.0, &spec()).unwrap();
            assert!(t.i_mid >= 1.0);
            // Line part: grad = 2/eps, pot = 2 * (5/12 + ... ) eps^3 scale, product ~ eps^2.
            let prod = t.i_grad * t.i_pot;
            assert!(prod < prev);
            prev = prod;
        }
        let e = libm::ldexp(1.0, -12);
        let rep = ckn_check(&sp, &RadialProfile::cutoff(e).unwrap(), 0, 2.0, 0.5, &spec()).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn uniform_sequence_on_cone() {
        let fam = FamilySpec::new(alloc::vec![
            FamilyPart::Gaussians { lambdas: alloc::vec![0.5, 1.0, 2.0] },
            FamilyPart::RandomBumps { count: 3, seed: 4 },
        ]);
        let cone = PointedRadialSpace::cone(1.0, 3.0).unwrap();
        let reps = verify_uniform_sequence(&cone, 1.5, 2.0, 6, &fam, &spec()).unwrap();
        assert_eq!(reps.len(), 7);
        assert!(reps.iter().all(|r| r.pass));
        assert!(reps.iter().all(|r| r.margin.abs() < 1e-8));
        let reps = verify_uniform_sequence(&cone, 1.51, 2.0, 6, &fam, &spec()).unwrap();
        assert!(reps.iter().all(|r| !r.pass));
    }
}
