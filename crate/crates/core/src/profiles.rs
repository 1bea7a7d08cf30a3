//! Radial test functions `u(x) = u0(d(x0, x))` and their derivative magnitudes.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default number of perturbation modes.
pub const DEFAULT_BASIS_SIZE: usize = 6;
/// Default half-width of the perturbation coefficient box.
pub const DEFAULT_COEFF_BOX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `c e^(-lambda r^2)`.
    Gaussian { amplitude: f64, lambda: f64 },
    /// `c e^(-lambda r^2) max(0, min(0, l - r) + 1)`.
    TruncatedGaussian { amplitude: f64, lambda: f64, cut: f64 },
    /// 1 on `[0, eps]`, 0 beyond `2 eps`, affine in between.
    Cutoff { epsilon: f64 },
    /// C^1 cubic Hermite spline through `(knots[i], values[i])` with the given
    /// slopes, zero outside `[knots[0], knots[last]]`.
    Bump { knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64> },
    /// `e^(-lambda r^2) (1 + sum_j a_j (sqrt(lambda) r)^j)`, `j = 1..=J`.
    PerturbedGaussian { lambda: f64, coefficients: Vec<f64> },
    /// `c e^(-lambda r^q)`; `q = p'` gives the extremals of the L^p inequality.
    GeneralizedGaussian { amplitude: f64, lambda: f64, power: f64 },
}

/// A validated radial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    scale: f64,
}

/// Pointwise bound `|u|, |u'| <= amp (1 + r)^degree e^(-rate r^power)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub amplitude: f64,
    pub degree: f64,
    pub rate: f64,
    pub power: f64,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl RadialProfile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match &kind {
            ProfileKind::Gaussian { amplitude, lambda } => {
                if !amplitude.is_finite() || !positive(*lambda) {
                    return Err(Error::BadSpec("gaussian needs finite amplitude and lambda > 0"));
                }
            }
            ProfileKind::TruncatedGaussian { amplitude, lambda, cut } => {
                if !amplitude.is_finite() || !positive(*lambda) || !positive(*cut) {
                    return Err(Error::BadSpec("truncated gaussian needs lambda > 0 and l > 0"));
                }
            }
            ProfileKind::Cutoff { epsilon } => {
                if !(*epsilon > 0.0 && *epsilon < 1.0) {
                    return Err(Error::BadSpec("cutoff needs 0 < eps < 1"));
                }
            }
            ProfileKind::Bump { knots, values, slopes } => {
                let n = knots.len();
                if n < 3 || values.len() != n || slopes.len() != n {
                    return Err(Error::BadSpec("bump needs at least 3 knots with matching values and slopes"));
                }
                if !(knots[0] > 0.0) || knots.windows(2).any(|w| !(w[1] > w[0])) || !knots[n - 1].is_finite() {
                    return Err(Error::BadSpec("bump knots must be positive, finite and increasing"));
                }
                if values.iter().chain(slopes).any(|v| !v.is_finite()) {
                    return Err(Error::BadSpec("bump values and slopes must be finite"));
                }
                if values[0] != 0.0 || slopes[0] != 0.0 || values[n - 1] != 0.0 || slopes[n - 1] != 0.0 {
                    return Err(Error::BadSpec("bump must vanish to first order at both ends"));
                }
            }
            ProfileKind::PerturbedGaussian { lambda, coefficients } => {
                if !positive(*lambda) || coefficients.iter().any(|a| !a.is_finite()) {
                    return Err(Error::BadSpec("perturbed gaussian needs lambda > 0 and finite coefficients"));
                }
            }
            ProfileKind::GeneralizedGaussian { amplitude, lambda, power } => {
                if !amplitude.is_finite() || !positive(*lambda) || !(power.is_finite() && *power > 1.0) {
                    return Err(Error::BadSpec("generalized gaussian needs lambda > 0 and power > 1"));
                }
            }
        }
        Ok(Self { kind, scale: 1.0 })
    }

    pub fn gaussian(amplitude: f64, lambda: f64) -> Result<Self> {
        Self::new(ProfileKind::Gaussian { amplitude, lambda })
    }

    pub fn truncated_gaussian(amplitude: f64, lambda: f64, cut: f64) -> Result<Self> {
        Self::new(ProfileKind::TruncatedGaussian { amplitude, lambda, cut })
    }

    pub fn cutoff(epsilon: f64) -> Result<Self> {
        Self::new(ProfileKind::Cutoff { epsilon })
    }

    pub fn bump(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::new(ProfileKind::Bump { knots, values, slopes })
    }

    pub fn perturbed_gaussian(lambda: f64, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(ProfileKind::PerturbedGaussian { lambda, coefficients })
    }

    pub fn generalized_gaussian(amplitude: f64, lambda: f64, power: f64) -> Result<Self> {
        Self::new(ProfileKind::GeneralizedGaussian { amplitude, lambda, power })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Same profile multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { kind: self.kind.clone(), scale: self.scale * c }
    }

    /// Radii where the profile fails to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::TruncatedGaussian { cut, .. } => alloc::vec![*cut, cut + 1.0],
            ProfileKind::Cutoff { epsilon } => alloc::vec![*epsilon, 2.0 * epsilon],
            ProfileKind::Bump { knots, .. } => knots.clone(),
            _ => Vec::new(),
        }
    }

    /// Right end of the support when it is bounded.
    pub fn support_end(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::TruncatedGaussian { cut, .. } => Some(cut + 1.0),
            ProfileKind::Cutoff { epsilon } => Some(2.0 * epsilon),
            ProfileKind::Bump { knots, .. } => knots.last().copied(),
            _ => None,
        }
    }

    /// Left end of the support (0 unless the profile vanishes near the origin).
    pub fn support_start(&self) -> f64 {
        match &self.kind {
            ProfileKind::Bump { knots, .. } => knots[0],
            _ => 0.0,
        }
    }

    /// Envelope for profiles of unbounded support.
    pub fn envelope(&self) -> Option<DecayEnvelope> {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, lambda } => Some(DecayEnvelope {
                amplitude: (self.scale * amplitude).abs() * (2.0 * lambda).max(1.0),
                degree: 1.0,
                rate: *lambda,
                power: 2.0,
            }),
            ProfileKind::PerturbedGaussian { lambda, coefficients } => {
                let mut sum = 1.0;
                let mut dsum = 0.0;
                for (i, a) in coefficients.iter().enumerate() {
                    let j = (i + 1) as f64;
                    sum += a.abs() * lambda.powf(j / 2.0);
                    dsum += j * a.abs() * lambda.powf(j / 2.0);
                }
                Some(DecayEnvelope {
                    amplitude: self.scale.abs() * sum.max(2.0 * lambda * sum + dsum),
                    degree: coefficients.len() as f64 + 1.0,
                    rate: *lambda,
                    power: 2.0,
                })
            }
            ProfileKind::GeneralizedGaussian { amplitude, lambda, power } => Some(DecayEnvelope {
                amplitude: (self.scale * amplitude).abs() * (lambda * power).max(1.0),
                degree: power - 1.0,
                rate: *lambda,
                power: *power,
            }),
            _ => None,
        }
    }

    /// Value and one-sided derivatives `(u(r), u'(r-), u'(r+))`.
    fn eval_sided(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, lambda } => {
                let g = amplitude * (-lambda * r * r).exp();
                let d = -2.0 * lambda * r * g;
                (g, d, d)
            }
            ProfileKind::TruncatedGaussian { amplitude, lambda, cut } => {
                let g = amplitude * (-lambda * r * r).exp();
                let dg = -2.0 * lambda * r * g;
                let l = *cut;
                let phi = |s: f64| (l + 1.0 - s).clamp(0.0, 1.0);
                let value = g * phi(r);
                let inner = dg * (l + 1.0 - r) - g;
                let left = if r <= l { dg } else if r <= l + 1.0 { inner } else { 0.0 };
                let right = if r < l { dg } else if r < l + 1.0 { inner } else { 0.0 };
                (value, left, right)
            }
            ProfileKind::Cutoff { epsilon } => {
                let e = *epsilon;
                let value = (2.0 - r / e).clamp(0.0, 1.0);
                let left = if r > e && r <= 2.0 * e { -1.0 / e } else { 0.0 };
                let right = if r >= e && r < 2.0 * e { -1.0 / e } else { 0.0 };
                (value, left, right)
            }
            ProfileKind::Bump { knots, values, slopes } => {
                let n = knots.len();
                if r <= knots[0] || r >= knots[n - 1] {
                    return (0.0, 0.0, 0.0);
                }
                let i = knots.partition_point(|&t| t <= r) - 1;
                let (t0, t1) = (knots[i], knots[i + 1]);
                let h = t1 - t0;
                let s = (r - t0) / h;
                let (y0, y1, m0, m1) = (values[i], values[i + 1], slopes[i] * h, slopes[i + 1] * h);
                let s2 = s * s;
                let s3 = s2 * s;
                let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * m1;
                let d = ((6.0 * s2 - 6.0 * s) * y0
                    + (3.0 * s2 - 4.0 * s + 1.0) * m0
                    + (-6.0 * s2 + 6.0 * s) * y1
                    + (3.0 * s2 - 2.0 * s) * m1)
                    / h;
                (value, d, d)
            }
            ProfileKind::PerturbedGaussian { lambda, coefficients } => {
                let sl = lambda.sqrt();
                let x = sl * r;
                let mut poly = 1.0;
                let mut dpoly = 0.0;
                let mut xp = 1.0;
                for (i, a) in coefficients.iter().enumerate() {
                    let j = (i + 1) as f64;
                    dpoly += j * a * xp * sl;
                    xp *= x;
                    poly += a * xp;
                }
                let g = (-lambda * r * r).exp();
                let d = g * (dpoly - 2.0 * lambda * r * poly);
                (g * poly, d, d)
            }
            ProfileKind::GeneralizedGaussian { amplitude, lambda, power } => {
                let g = amplitude * (-lambda * r.powf(*power)).exp();
                let d = -lambda * power * r.powf(power - 1.0) * g;
                (g, d, d)
            }
        }
    }

    /// `(u(r), |u'|(r))`; at kinks the larger one-sided slope is returned,
    /// and at `r = 0` the right derivative.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let (v, l, rt) = self.eval_sided(r);
        let c = self.scale;
        if r <= 0.0 {
            return (c * v, (c * rt).abs());
        }
        (c * v, (c * l).abs().max((c * rt).abs()))
    }

    pub fn value(&self, r: f64) -> f64 {
        self.scale * self.eval_sided(r).0
    }
}

/// One block of a test-function family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyPart {
    /// Unit-amplitude Gaussians, one per `lambda`.
    Gaussians { lambdas: Vec<f64> },
    /// Truncations `u_{lambda, l}` at each cut `l`.
    Truncations { lambda: f64, cuts: Vec<f64> },
    /// Cutoff tents at each `eps`.
    Cutoffs { epsilons: Vec<f64> },
    /// Perturbed Gaussians on an axis stencil of the coefficient box:
    /// the center plus `±half_width * i / steps` on each axis, `i = 1..=steps`.
    Perturbed { lambda: f64, basis_size: usize, half_width: f64, steps: usize },
    /// Pseudo-random bumps drawn from `seed`.
    RandomBumps { count: usize, seed: u64 },
    /// `e^(-lambda r^power)` for each `lambda`.
    GeneralizedGaussians { lambdas: Vec<f64>, power: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FamilySpec {
    pub parts: Vec<FamilyPart>,
}

impl FamilySpec {
    pub fn new(parts: Vec<FamilyPart>) -> Self {
        Self { parts }
    }
}

/// `2^-j` for `j = first..=last`.
pub fn dyadic_epsilons(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|j| libm::ldexp(1.0, -(j as i32))).collect()
}

/// Expand a family spec into profiles, in spec order.
pub fn make_family(spec: &FamilySpec) -> Result<Vec<RadialProfile>> {
    if spec.parts.is_empty() {
        return Err(Error::BadSpec("family has no parts"));
    }
    let mut out = Vec::new();
    for part in &spec.parts {
        match part {
            FamilyPart::Gaussians { lambdas } => {
                for &l in lambdas {
                    out.push(RadialProfile::gaussian(1.0, l)?);
                }
            }
            FamilyPart::Truncations { lambda, cuts } => {
                for &l in cuts {
                    out.push(RadialProfile::truncated_gaussian(1.0, *lambda, l)?);
                }
            }
            FamilyPart::Cutoffs { epsilons } => {
                for &e in epsilons {
                    out.push(RadialProfile::cutoff(e)?);
                }
            }
            FamilyPart::Perturbed { lambda, basis_size, half_width, steps } => {
                if *basis_size == 0 || !(half_width.is_finite() && *half_width >= 0.0) {
                    return Err(Error::BadSpec("perturbed family needs a nonempty basis and a finite box"));
                }
                out.push(RadialProfile::perturbed_gaussian(*lambda, alloc::vec![0.0; *basis_size])?);
                for axis in 0..*basis_size {
                    for i in 1..=*steps {
                        for sign in [-1.0, 1.0] {
                            let mut a = alloc::vec![0.0; *basis_size];
                            a[axis] = sign * half_width * i as f64 / *steps as f64;
                            out.push(RadialProfile::perturbed_gaussian(*lambda, a)?);
                        }
                    }
                }
            }
            FamilyPart::RandomBumps { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..*count {
                    out.push(random_bump(&mut rng));
                }
            }
            FamilyPart::GeneralizedGaussians { lambdas, power } => {
                for &l in lambdas {
                    out.push(RadialProfile::generalized_gaussian(1.0, l, *power)?);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::BadSpec("family is empty"));
    }
    Ok(out)
}

/// A C^1 bump with 3 to 8 interior knots, supported in `[a, a + len]` with
/// `a` in `[0.05, 1]` and `len` in `[0.5, 3]`. The first interior value is 1,
/// so the bump is never identically zero.
pub fn random_bump<R: Rng + ?Sized>(rng: &mut R) -> RadialProfile {
    let interior = rng.gen_range(3..=8usize);
    let a = rng.gen_range(0.05..1.0);
    let len = rng.gen_range(0.5..3.0);
    let mut cuts: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.05..0.95)).collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
    let mut knots = alloc::vec![a];
    knots.extend(cuts.iter().map(|c| a + c * len));
    knots.push(a + len);
    let n = knots.len();
    let mut values = alloc::vec![0.0; n];
    let mut slopes = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        values[i] = if i == 1 { 1.0 } else { rng.gen_range(-1.0..1.0) };
        slopes[i] = rng.gen_range(-2.0..2.0) / len;
    }
    RadialProfile::bump(knots, values, slopes).expect("constructed knots are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gaussian_values() {
        let u = RadialProfile::gaussian(1.0, 0.7).unwrap();
        for &r in &[0.0, 0.3, 1.0, 2.5] {
            let (v, d) = u.eval(r);
            assert!(close(v, (-0.7 * r * r).exp(), 1e-15));
            assert!(close(d, 1.4 * r * (-0.7 * r * r).exp(), 1e-15));
        }
        let (_, d) = RadialProfile::gaussian(-3.0, 2.0).unwrap().eval(0.5);
        assert!(close(d, 3.0 * 4.0 * 0.5 * (-0.5f64).exp(), 1e-15));
    }

    #[test]
    fn truncated_gaussian_values() {
        let (lam, l) = (0.5, 2.0);
        let u = RadialProfile::truncated_gaussian(1.0, lam, l).unwrap();
        let r = l + 0.5;
        let g = (-lam * r * r).exp();
        let (v, d) = u.eval(r);
        assert!(close(v, 0.5 * g, 1e-15));
        assert!(close(d, (-2.0 * lam * r * 0.5 * g - g).abs(), 1e-14));
        // At the inner kink the steeper right derivative wins.
        let g = (-lam * l * l).exp();
        assert!(close(u.eval(l).1, 2.0 * lam * l * g + g, 1e-14));
        // At the outer kink the left derivative is -g(l+1).
        let g = (-lam * (l + 1.0) * (l + 1.0)).exp();
        assert!(close(u.eval(l + 1.0).1, g, 1e-14));
        assert_eq!(u.eval(l + 1.5), (0.0, 0.0));
    }

    #[test]
    fn cutoff_values() {
        let e = 0.1;
        let u = RadialProfile::cutoff(e).unwrap();
        let (v, d) = u.eval(1.5 * e);
        assert!(close(v, 0.5, 1e-14) && close(d, 1.0 / e, 1e-14));
        assert_eq!(u.eval(0.5 * e), (1.0, 0.0));
        assert_eq!(u.eval(e).1, 1.0 / e);
        assert_eq!(u.eval(2.0 * e), (0.0, 1.0 / e));
        assert_eq!(u.eval(3.0 * e), (0.0, 0.0));
        assert!(RadialProfile::cutoff(1.0).is_err());
        assert!(RadialProfile::cutoff(0.0).is_err());
    }

    #[test]
    fn perturbed_gaussian_matches_formula() {
        let a = alloc::vec![0.2, -0.1, 0.05];
        let u = RadialProfile::perturbed_gaussian(2.0, a.clone()).unwrap();
        let r = 0.8;
        let x = 2f64.sqrt() * r;
        let poly = 1.0 + a[0] * x + a[1] * x * x + a[2] * x * x * x;
        assert!(close(u.value(r), (-2.0 * r * r).exp() * poly, 1e-14));
        let zero = RadialProfile::perturbed_gaussian(2.0, alloc::vec![0.0; 6]).unwrap();
        let g = RadialProfile::gaussian(1.0, 2.0).unwrap();
        assert_eq!(zero.eval(1.3), g.eval(1.3));
    }

    #[test]
    fn bump_validation() {
        assert!(RadialProfile::bump(alloc::vec![0.0, 1.0, 2.0], alloc::vec![0.0, 1.0, 0.0], alloc::vec![0.0; 3]).is_err());
        assert!(RadialProfile::bump(alloc::vec![0.5, 1.0, 2.0], alloc::vec![0.1, 1.0, 0.0], alloc::vec![0.0; 3]).is_err());
        assert!(RadialProfile::bump(alloc::vec![0.5, 1.0, 2.0], alloc::vec![0.0, 1.0, 0.0], alloc::vec![0.0, 0.0, 1.0]).is_err());
        assert!(RadialProfile::bump(alloc::vec![0.5, 1.0, 2.0], alloc::vec![0.0, 1.0, 0.0], alloc::vec![0.0; 3]).is_ok());
    }

    #[test]
    fn family_sizes() {
        let spec = FamilySpec::new(alloc::vec![FamilyPart::Gaussians { lambdas: alloc::vec![0.5, 1.0, 2.0] }]);
        assert_eq!(make_family(&spec).unwrap().len(), 3);
        let spec = FamilySpec::new(alloc::vec![FamilyPart::Perturbed {
            lambda: 1.0,
            basis_size: DEFAULT_BASIS_SIZE,
            half_width: DEFAULT_COEFF_BOX,
            steps: 2
        }]);
        assert_eq!(make_family(&spec).unwrap().len(), 1 + 6 * 2 * 2);
        assert_eq!(make_family(&FamilySpec::default()), Err(Error::BadSpec("family has no parts")));
        let bad = FamilySpec::new(alloc::vec![FamilyPart::Cutoffs { epsilons: alloc::vec![2.0] }]);
        assert!(make_family(&bad).is_err());
    }

    #[test]
    fn cutoff_supports_shrink() {
        let spec = FamilySpec::new(alloc::vec![FamilyPart::Cutoffs { epsilons: dyadic_epsilons(1, 12) }]);
        let fam = make_family(&spec).unwrap();
        let ends: Vec<f64> = fam.iter().map(|u| u.support_end().unwrap()).collect();
        assert!(ends.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(ends[0], 1.0);
    }

    #[test]
    fn truncations_converge_pointwise() {
        let spec = FamilySpec::new(alloc::vec![FamilyPart::Truncations {
            lambda: 0.25,
            cuts: (1..=10).map(f64::from).collect()
        }]);
        let fam = make_family(&spec).unwrap();
        let g = RadialProfile::gaussian(1.0, 0.25).unwrap();
        for &r in &[0.5, 3.0, 7.5] {
            let gaps: Vec<f64> = fam.iter().map(|u| g.value(r) - u.value(r)).collect();
            assert!(gaps.iter().all(|&x| x >= 0.0));
            assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*gaps.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn random_bumps_are_deterministic() {
        let spec = FamilySpec::new(alloc::vec![FamilyPart::RandomBumps { count: 5, seed: 9 }]);
        assert_eq!(make_family(&spec).unwrap(), make_family(&spec).unwrap());
    }

    fn arb_profile() -> impl Strategy<Value = RadialProfile> {
        prop_oneof![
            (-3.0..3.0f64, 0.05..4.0f64).prop_map(|(c, l)| RadialProfile::gaussian(c, l).unwrap()),
            (0.05..4.0f64, 0.2..5.0f64).prop_map(|(l, cut)| RadialProfile::truncated_gaussian(1.0, l, cut).unwrap()),
            (0.01..0.99f64).prop_map(|e| RadialProfile::cutoff(e).unwrap()),
            (any::<u64>()).prop_map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                random_bump(&mut rng)
            }),
            (0.1..3.0f64, proptest::collection::vec(-0.5..0.5f64, 6))
                .prop_map(|(l, a)| RadialProfile::perturbed_gaussian(l, a).unwrap()),
            (0.1..3.0f64, 1.2..4.0f64).prop_map(|(l, q)| RadialProfile::generalized_gaussian(1.0, l, q).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_difference(u in arb_profile(), r in 0.01..6.0f64) {
            let h = 1e-6;
            let near_kink = u.breakpoints().iter().any(|b| (b - r).abs() < 10.0 * h);
            prop_assume!(!near_kink);
            let fd = ((u.value(r + h) - u.value(r - h)) / (2.0 * h)).abs();
            let (_, d) = u.eval(r);
            let scale = u.eval(r).1.max(u.value(r).abs()).max(1.0);
            prop_assert!((fd - d).abs() <= 1e-6 * scale, "fd={} d={}", fd, d);
        }

        #[test]
        fn truncation_below_gaussian(lam in 0.05..4.0f64, cut in 0.2..5.0f64, r in 0.0..8.0f64) {
            let g = RadialProfile::gaussian(1.0, lam).unwrap().value(r);
            let t = RadialProfile::truncated_gaussian(1.0, lam, cut).unwrap().value(r);
            prop_assert!(t <= g);
            if r <= cut {
                prop_assert_eq!(t, g);
            }
        }

        #[test]
        fn cutoff_range_and_support(e in 0.01..0.99f64, r in 0.0..2.5f64) {
            let v = RadialProfile::cutoff(e).unwrap().value(r);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v > 0.0, r < 2.0 * e);
        }

        #[test]
        fn bump_vanishes_at_ends(s in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let u = random_bump(&mut rng);
            let a = u.support_start();
            let b = u.support_end().unwrap();
            prop_assert_eq!(u.eval(a), (0.0, 0.0));
            prop_assert_eq!(u.eval(b), (0.0, 0.0));
            let h = 1e-7;
            prop_assert!(u.value(a + h).abs() < 1e-10 && u.value(b - h).abs() < 1e-10);
        }
    }
}
