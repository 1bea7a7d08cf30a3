//! Lifting identities on volume cones, the off-center lower volume bound,
//! and the deficit-versus-Gaussian-distance stability bound.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid;
use crate::optimize::golden_section;
use crate::profiles::RadialProfile;
use crate::quadrature::{integrate_halfline, integrate_interval, QuadratureSpec};
use crate::space::PointedRadialSpace;
use crate::special::{power_exp_integral, power_exp_tail, unit_ball_volume};

/// A volume cone `m(B_rho) = A omega_N rho^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    pub a: f64,
    pub n: f64,
    pub omega_n: f64,
}

impl ConeParams {
    pub fn new(a: f64, n: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && n.is_finite() && n >= 1.0) {
            return Err(Error::InvalidSpace("cone needs A > 0 and N >= 1"));
        }
        Ok(Self { a, n, omega_n: unit_ball_volume(n) })
    }

    /// Read `(A, N)` off a space whose density is exactly `c r^(N-1)`.
    pub fn of_space(space: &PointedRadialSpace) -> Option<Self> {
        let (coeff, n) = space.power_cone()?;
        Self::new(coeff / (n * unit_ball_volume(n)), n).ok()
    }

    /// Density coefficient `A N omega_N`.
    pub fn coeff(&self) -> f64 {
        self.a * self.n * self.omega_n
    }

    /// `A N / (N + 2k) omega_N rho^(N + 2k)`.
    pub fn lifted_volume(&self, k: u32, rho: f64) -> f64 {
        let e = self.n + 2.0 * k as f64;
        self.a * self.n / e * self.omega_n * rho.powf(e)
    }

    pub fn base_volume(&self, rho: f64) -> f64 {
        self.a * self.omega_n * rho.powf(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FubiniResult {
    /// `2k int_0^rho [m(B_rho) - m(B_t)] t^(2k-1) dt`.
    pub lifted_volume: f64,
    /// Cone closed form, when the space is an exact cone.
    pub closed_form: Option<f64>,
    /// `2k int_0^rho m^k(B_t) t^(-2k-1) dt + m^k(B_rho) rho^(-2k)`, with `m^k`
    /// the measure `r^(2k) dm`. Atoms at the base point are invisible to `m^k`
    /// and therefore missing from this value.
    pub reconstructed_base_volume: f64,
}

/// The two Fubini identities linking `m` and `m^k = d^(2k) m` at radius `rho`.
pub fn fubini_lift_and_reconstruct(
    space: &PointedRadialSpace,
    k: u32,
    rho: f64,
    spec: &QuadratureSpec,
) -> Result<FubiniResult> {
    if k == 0 {
        return Err(Error::RequiresPositiveK);
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::DomainError("rho must be positive"));
    }
    let kf = k as f64;
    let cuts = space.breakpoints();
    let m_rho = space.ball_volume(rho);
    let lifted = 2.0
        * kf
        * integrate_interval(|t| (m_rho - space.ball_volume(t)) * t.powi(2 * k as i32 - 1), 0.0, rho, &cuts, spec)?
            .value;

    let lifted_space = space.lift(k, 2.0)?;
    let mk = |t: f64| lifted_space.ball_volume(t);
    let inner = integrate_interval(|t| if t > 0.0 { mk(t) * t.powi(-2 * k as i32 - 1) } else { 0.0 }, 0.0, rho, &cuts, spec)?
        .value;
    let reconstructed = 2.0 * kf * inner + mk(rho) * rho.powi(-2 * k as i32);

    let closed_form = ConeParams::of_space(space).map(|c| c.lifted_volume(k, rho));
    Ok(FubiniResult { lifted_volume: lifted, closed_form, reconstructed_base_volume: reconstructed })
}

/// `2C <= beta <= gamma`.
pub fn check_exponent_order(c: f64, beta: f64, gamma: f64) -> Result<()> {
    if 2.0 * c <= beta && beta <= gamma {
        Ok(())
    } else {
        Err(Error::ExponentOrderViolation)
    }
}

/// Right side of the lower bound with `C_* = 1`:
/// `(1 + r + x)^-(beta - 2C) (1 + x / r)^-(gamma - beta)`.
pub fn lower_bound_shape(c: f64, beta: f64, gamma: f64, x: f64, r: f64) -> f64 {
    (1.0 + r + x).powf(-(beta - 2.0 * c)) * (1.0 + x / r).powf(-(gamma - beta))
}

/// Intermediate bound of the proof before fixing `rho`:
/// `(1 + rho - x)^-(beta - 2C) (rho - x)^beta rho^-gamma r^(gamma - beta)`.
fn rho_bound(c: f64, beta: f64, gamma: f64, x: f64, r: f64, rho: f64) -> f64 {
    (1.0 + rho - x).powf(-(beta - 2.0 * c)) * (rho - x).powf(beta) * rho.powf(-gamma) * r.powf(gamma - beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryResult {
    /// Infimum over samples of `m(B_r(x)) r^-beta / lower_bound_shape`.
    pub c_star: f64,
    /// `(x, r)` attaining `c_star`.
    pub witness: (f64, f64),
    /// Largest observed `sup_rho rho_bound / lower_bound_shape`: an empirical
    /// `C_**` for the choice `rho = 2x + r`.
    pub c_double_star: f64,
    pub c_double_star_witness: (f64, f64),
}

/// `32 x 32` geometric `(x, r)` pairs on `[1e-3, 1e3]^2`.
pub fn default_corollary_samples() -> Vec<(f64, f64)> {
    let g = grid::geometric(1e-3, 1e3, 32);
    g.iter().flat_map(|&x| g.iter().map(move |&r| (x, r))).collect()
}

fn sup_rho_bound(c: f64, beta: f64, gamma: f64, x: f64, r: f64) -> f64 {
    let lo = r.max(x);
    // Scan rho = lo (1 + s), then refine the best bracket in log s.
    let ss = grid::geometric(1e-9, 1e9, 181);
    let f = |s: f64| rho_bound(c, beta, gamma, x, r, lo * (1.0 + s));
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &s) in ss.iter().enumerate() {
        let v = f(s);
        if v > best.1 {
            best = (i, v);
        }
    }
    let a = ss[best.0.saturating_sub(1)].ln();
    let b = ss[(best.0 + 1).min(ss.len() - 1)].ln();
    let (_, neg) = golden_section(|t| -f(t.exp()), a, b, 1e-10, 200);
    best.1.max(-neg)
}

/// Largest `C_*` consistent with the lower volume bound on `samples`, plus the
/// `rho`-choice diagnostic.
pub fn corollary_lower_bound_search(
    space: &PointedRadialSpace,
    c: f64,
    beta: f64,
    gamma: f64,
    samples: &[(f64, f64)],
) -> Result<CorollaryResult> {
    check_exponent_order(c, beta, gamma)?;
    if samples.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut out = CorollaryResult {
        c_star: f64::INFINITY,
        witness: samples[0],
        c_double_star: 0.0,
        c_double_star_witness: samples[0],
    };
    for &(x, r) in samples {
        if !(x >= 0.0 && r > 0.0 && x.is_finite() && r.is_finite()) {
            return Err(Error::BadGrid);
        }
        let shape = lower_bound_shape(c, beta, gamma, x, r);
        let lhs = space.ball_volume_at(x, r)? / r.powf(beta);
        let ratio = lhs / shape;
        if ratio < out.c_star {
            out.c_star = ratio;
            out.witness = (x, r);
        }
        let opt = sup_rho_bound(c, beta, gamma, x, r) / shape;
        if opt > out.c_double_star {
            out.c_double_star = opt;
            out.c_double_star_witness = (x, r);
        }
    }
    Ok(out)
}

/// `int_0^inf f(r) dr` where `|f| <= env(u)^a r^m` on the tail of `u`.
fn profile_integral<F: Fn(f64) -> f64>(
    u: &RadialProfile,
    f: F,
    a: f64,
    m: f64,
    cuts: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    match u.support_end() {
        Some(end) => Ok(integrate_interval(f, u.support_start(), end, cuts, spec)?.value),
        None => {
            let env = u.envelope().ok_or(Error::NonIntegrable("profile has no decay envelope"))?;
            let tail = |r: f64| {
                if r < 1.0 {
                    return f64::INFINITY;
                }
                env.amplitude.powf(a) * 2f64.powf(a * env.degree) * power_exp_tail(m + a * env.degree, a * env.rate, env.power, r)
            };
            Ok(integrate_halfline(f, cuts, Some(&tail), spec)?.value)
        }
    }
}

/// `xi = (int u^2 x^(N+2k+1) / int u'^2 x^(N+2k-1))^(1/4)` and
/// `eta = int u x^(N+2k-1) e^(-x^2/(2 xi^2)) / int x^(N+2k-1) e^(-x^2/xi^2)`.
pub fn xi_eta(u: &RadialProfile, n: f64, k: u32, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let e = n + 2.0 * k as f64;
    let cuts = u.breakpoints();
    let num = profile_integral(u, |x| u.value(x).powi(2) * x.powf(e + 1.0), 2.0, e + 1.0, &cuts, spec)?;
    let den = profile_integral(u, |x| u.eval(x).1.powi(2) * x.powf(e - 1.0), 2.0, e - 1.0, &cuts, spec)?;
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::DegenerateProfile("xi needs nonzero u and u'"));
    }
    let xi = (num / den).powf(0.25);
    let s = 1.0 / (2.0 * xi * xi);
    let top = profile_integral(u, |x| u.value(x) * x.powf(e - 1.0) * (-s * x * x).exp(), 1.0, e - 1.0, &cuts, spec)?;
    let bottom = power_exp_integral(e - 1.0, 2.0 * s, 2.0);
    Ok((xi, top / bottom))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRecord {
    pub k: u32,
    pub n: f64,
    pub xi: f64,
    pub eta: f64,
    pub deficit: f64,
    /// `inf_(c, lambda) int |u - c e^(-lambda r^2)|^2 r^(2k) dm`.
    pub gaussian_distance_sq: f64,
    /// Distance at the explicit candidate `(eta, 1 / (2 xi^2))`.
    pub candidate_distance_sq: f64,
    pub lambda_opt: f64,
    pub margin: f64,
    /// The profile is not compactly supported inside `(0, inf)`.
    pub boundary_case: bool,
}

/// Deficit against squared distance to the Gaussian class on an exact cone.
pub fn stability_check(
    space: &PointedRadialSpace,
    u: &RadialProfile,
    k: u32,
    spec: &QuadratureSpec,
) -> Result<StabilityRecord> {
    let cone = ConeParams::of_space(space).ok_or(Error::NotACone)?;
    let n = cone.n;
    let coeff = cone.coeff();
    let kf = k as f64;
    let e = n + 2.0 * kf;
    let cuts = u.breakpoints();

    // One-dimensional integrals against x^(N-1) dx, scaled by the cone coefficient.
    let int = |f: &dyn Fn(f64) -> f64, a: f64, m: f64| -> Result<f64> { Ok(coeff * profile_integral(u, f, a, m, &cuts, spec)?) };
    let i_grad = int(&|x| u.eval(x).1.powi(2) * x.powf(e - 1.0), 2.0, e - 1.0)?;
    let i_pot = int(&|x| u.value(x).powi(2) * x.powf(e + 1.0), 2.0, e + 1.0)?;
    let i_mid = int(&|x| u.value(x).powi(2) * x.powf(e - 1.0), 2.0, e - 1.0)?;
    if !(i_mid > 0.0) {
        return Err(Error::DegenerateProfile("profile vanishes"));
    }
    let deficit = (i_grad * i_pot).sqrt() - (n / 2.0 + kf) * i_mid;
    let (xi, eta) = xi_eta(u, n, k, spec)?;

    // D^2(lambda) with the optimal amplitude for each lambda.
    let dist = |lam: f64| -> f64 {
        let proj = int(&|x| u.value(x) * (-lam * x * x).exp() * x.powf(e - 1.0), 1.0, e - 1.0).unwrap_or(f64::NAN);
        let norm = coeff * power_exp_integral(e - 1.0, 2.0 * lam, 2.0);
        (i_mid - proj * proj / norm).max(0.0)
    };
    let lam0 = 1.0 / (2.0 * xi * xi);
    let candidate = int(
        &|x| (u.value(x) - eta * (-lam0 * x * x).exp()).powi(2) * x.powf(e - 1.0),
        2.0,
        e - 1.0,
    )
    .or_else(|_| {
        // Unbounded profiles: fall back to the expanded form.
        Ok::<f64, Error>(dist(lam0))
    })?;
    let factors = grid::geometric(1e-3, 1e3, 61);
    let mut best = (lam0, dist(lam0));
    for &f in &factors {
        let d = dist(lam0 * f);
        if d < best.1 {
            best = (lam0 * f, d);
        }
    }
    let (t, d) = golden_section(|t| dist(t.exp()), (best.0 / 1.2).ln(), (best.0 * 1.2).ln(), 1e-10, 200);
    if d < best.1 {
        best = (t.exp(), d);
    }
    let boundary_case = u.support_end().is_none() || u.support_start() <= 0.0;
    Ok(StabilityRecord {
        k,
        n,
        xi,
        eta,
        deficit,
        gaussian_distance_sq: best.1,
        candidate_distance_sq: candidate,
        lambda_opt: best.0,
        margin: deficit - best.1,
        boundary_case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::random_bump;
    use crate::space::DensitySegment;
    use core::f64::consts::PI;
    use rand_chacha::rand_core::SeedableRng;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn plane_fubini() {
        let r2 = PointedRadialSpace::euclidean(2).unwrap();
        let f = fubini_lift_and_reconstruct(&r2, 1, 1.0, &q()).unwrap();
        assert!((f.lifted_volume - PI / 2.0).abs() < 1e-10);
        assert!((f.closed_form.unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((f.reconstructed_base_volume - PI).abs() < 1e-10);
        assert_eq!(fubini_lift_and_reconstruct(&r2, 0, 1.0, &q()).unwrap_err(), Error::RequiresPositiveK);
        assert_eq!(r2.lift(0, 2.0).unwrap().ball_volume(1.3), r2.ball_volume(1.3));
    }

    #[test]
    fn cone_closed_form() {
        for &(a, n) in &[(1.0, 2.0), (0.4, 3.0), (2.0, 1.5)] {
            let cone = PointedRadialSpace::cone(a, n).unwrap();
            let cp = ConeParams::of_space(&cone).unwrap();
            assert!((cp.a - a).abs() < 1e-14 && (cp.n - n).abs() < 1e-14);
            for k in 1..=4 {
                for &rho in &[0.1, 1.0, 7.0] {
                    let f = fubini_lift_and_reconstruct(&cone, k, rho, &q()).unwrap();
                    let cf = f.closed_form.unwrap();
                    assert!((f.lifted_volume / cf - 1.0).abs() < 1e-8, "k={k} rho={rho}");
                    assert!((f.reconstructed_base_volume / cp.base_volume(rho) - 1.0).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn non_cone_fubini() {
        // h = r^2 e^-r (N = 3); m^1(B_rho) = int_0^rho t^2 h(t) dt directly.
        let radii: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.005).collect();
        let vals: Vec<f64> = radii.iter().map(|&r| (-r).exp()).collect();
        let seg = DensitySegment {
            lower: 0.0,
            upper: 20.0,
            form: crate::space::DensityForm::Tabulated { radii, values: vals, weight_exponent: 2.0 },
        };
        let sp = PointedRadialSpace::new("decay", alloc::vec![seg, DensitySegment::power(20.0, f64::INFINITY, 0.0, 0.0)], 0.0, None)
            .unwrap();
        for &rho in &[0.5, 2.0, 6.0] {
            let f = fubini_lift_and_reconstruct(&sp, 1, rho, &q()).unwrap();
            assert!(f.closed_form.is_none());
            let direct = sp.lift(1, 2.0).unwrap().ball_volume(rho);
            assert!((f.lifted_volume / direct - 1.0).abs() < 1e-8, "rho={rho}");
            assert!((f.reconstructed_base_volume / sp.ball_volume(rho) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn corollary_euclidean_and_half_line() {
        let samples = default_corollary_samples();
        for n in 1..=3u32 {
            let sp = PointedRadialSpace::euclidean(n).unwrap();
            let nf = n as f64;
            let res = corollary_lower_bound_search(&sp, nf / 2.0, nf, nf, &samples).unwrap();
            assert!((res.c_star - unit_ball_volume(nf)).abs() < 1e-9 * res.c_star, "n={n}");
        }
        let hl = PointedRadialSpace::half_line().unwrap();
        let res = corollary_lower_bound_search(&hl, 0.5, 1.0, 1.0, &samples).unwrap();
        assert!(res.c_star >= 1.0 && res.c_star < 1.01);
        assert!(res.c_double_star.is_finite());
        assert_eq!(
            corollary_lower_bound_search(&hl, 1.0, 1.0, 2.0, &samples).unwrap_err(),
            Error::ExponentOrderViolation
        );
        assert_eq!(
            corollary_lower_bound_search(&hl, 0.25, 1.0, 0.5, &samples).unwrap_err(),
            Error::ExponentOrderViolation
        );
        let radial = PointedRadialSpace::cone(1.0, 2.0).unwrap();
        assert_eq!(corollary_lower_bound_search(&radial, 0.5, 2.0, 2.0, &samples).unwrap_err(), Error::UnsupportedOffCenter);
    }

    #[test]
    fn rho_choice_diagnostic_bounded() {
        // With gamma > beta > 2C the sup over rho stays within a fixed multiple of the final bound.
        let samples = default_corollary_samples();
        let r2 = PointedRadialSpace::euclidean(2).unwrap();
        let res = corollary_lower_bound_search(&r2, 0.6, 1.5, 2.0, &samples).unwrap();
        assert!(res.c_double_star < 10.0, "{}", res.c_double_star);
        assert!(res.c_star > 0.0);
    }

    #[test]
    fn xi_eta_gaussian() {
        for &sigma in &[0.5, 1.0, 2.3] {
            let u = RadialProfile::gaussian(1.0, 1.0 / (2.0 * sigma * sigma)).unwrap();
            for &(n, k) in &[(2.0, 0), (3.0, 2), (1.5, 1)] {
                let (xi, eta) = xi_eta(&u, n, k, &q()).unwrap();
                assert!((xi - sigma).abs() < 1e-9 * sigma && (eta - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn xi_scales_with_dilation() {
        let u = RadialProfile::bump(alloc::vec![1.0, 1.4, 2.0], alloc::vec![0.0, 1.0, 0.0], alloc::vec![0.0, 0.3, 0.0]).unwrap();
        let s = 3.0;
        let us = RadialProfile::bump(alloc::vec![s, 1.4 * s, 2.0 * s], alloc::vec![0.0, 1.0, 0.0], alloc::vec![0.0, 0.3 / s, 0.0])
            .unwrap();
        let (xi, eta) = xi_eta(&u, 2.0, 1, &q()).unwrap();
        let (xis, _) = xi_eta(&us, 2.0, 1, &q()).unwrap();
        assert!((xis - s * xi).abs() < 1e-9 * xis);
        assert!(xi.is_finite() && eta.is_finite());
        // Reference run at a tighter tolerance.
        let (xr, er) = xi_eta(&u, 2.0, 1, &q().with_rel_tol(1e-11)).unwrap();
        assert!((xr - xi).abs() < 1e-9 * xi && (er - eta).abs() < 1e-9 * er.abs());
    }

    #[test]
    fn stability_on_cones() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &n in &[2.0, 3.0] {
            let cone = PointedRadialSpace::cone(1.0, n).unwrap();
            for k in 0..=2 {
                for _ in 0..5 {
                    let u = random_bump(&mut rng);
                    let rec = stability_check(&cone, &u, k, &q()).unwrap();
                    assert!(rec.margin >= -1e-8 * rec.deficit, "{rec:?}");
                    assert!(rec.candidate_distance_sq >= rec.gaussian_distance_sq * (1.0 - 1e-9));
                    assert!(!rec.boundary_case);
                }
            }
        }
    }

    #[test]
    fn stability_near_gaussian() {
        let cone = PointedRadialSpace::cone(1.0, 2.0).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for l in 1..=3 {
            let u = RadialProfile::truncated_gaussian(1.0, 1.0, l as f64).unwrap();
            let rec = stability_check(&cone, &u, 1, &q()).unwrap();
            assert!(rec.boundary_case && rec.margin >= 0.0);
            assert!(rec.deficit < prev.0 && rec.gaussian_distance_sq < prev.1, "l={l} {rec:?}");
            prev = (rec.deficit, rec.gaussian_distance_sq);
        }
        let g = stability_check(&cone, &RadialProfile::gaussian(2.0, 0.7).unwrap(), 0, &q()).unwrap();
        assert!(g.deficit.abs() < 1e-9 && g.gaussian_distance_sq < 1e-9);
    }

    #[test]
    fn stability_errors() {
        let r = PointedRadialSpace::counterexample(2, 1.0).unwrap();
        let u = RadialProfile::gaussian(1.0, 1.0).unwrap();
        assert_eq!(stability_check(&r, &u, 0, &q()).unwrap_err(), Error::NotACone);
        let cone = PointedRadialSpace::cone(1.0, 2.0).unwrap();
        let z = RadialProfile::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(stability_check(&cone, &z, 0, &q()).unwrap_err(), Error::DegenerateProfile(_)));
    }
}
