//! Pointed radial measure spaces: a density on `[0, inf)` in the distance to
//! the base point, plus an optional atom at the base point itself.

use alloc::string::String;
use alloc::vec::Vec;


#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};
use crate::special::unit_ball_volume;

#[derive(Debug, Clone, PartialEq)]
pub enum DensityForm {
    /// `coeff * r^exponent`.
    Power { coeff: f64, exponent: f64 },
    /// Linear interpolation of `(radii, values)`, multiplied by `r^weight_exponent`.
    ///
    /// The weight is zero for user-supplied tables and becomes positive when a
    /// tabulated space is lifted.
    Tabulated { radii: Vec<f64>, values: Vec<f64>, weight_exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySegment {
    pub lower: f64,
    pub upper: f64,
    pub form: DensityForm,
}

impl DensitySegment {
    pub fn power(lower: f64, upper: f64, coeff: f64, exponent: f64) -> Self {
        Self { lower, upper, form: DensityForm::Power { coeff, exponent } }
    }

    /// A table spanning `[radii[0], radii[last]]`.
    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Self {
        let lower = radii.first().copied().unwrap_or(0.0);
        let upper = radii.last().copied().unwrap_or(0.0);
        Self { lower, upper, form: DensityForm::Tabulated { radii, values, weight_exponent: 0.0 } }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower >= 0.0 && self.lower.is_finite()) {
            return Err(Error::InvalidSpace("segment lower bound must be finite and >= 0"));
        }
        if !(self.upper > self.lower) {
            return Err(Error::InvalidSpace("segment upper bound must exceed lower bound"));
        }
        match &self.form {
            DensityForm::Power { coeff, exponent } => {
                if !(*coeff >= 0.0 && coeff.is_finite()) {
                    return Err(Error::InvalidSpace("power coefficient must be finite and >= 0"));
                }
                if !(*exponent > -1.0 && exponent.is_finite()) {
                    return Err(Error::InvalidSpace("power exponent must be > -1"));
                }
            }
            DensityForm::Tabulated { radii, values, weight_exponent } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return Err(Error::InvalidSpace("table needs >= 2 samples and matching lengths"));
                }
                if !self.upper.is_finite() {
                    return Err(Error::InvalidSpace("tabulated segments must be bounded"));
                }
                if radii[0] != self.lower || radii[radii.len() - 1] != self.upper {
                    return Err(Error::InvalidSpace("table radii must span the segment exactly"));
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidSpace("table radii must be strictly increasing"));
                }
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::InvalidSpace("table values must be finite and >= 0"));
                }
                if !(*weight_exponent > -1.0 && weight_exponent.is_finite()) {
                    return Err(Error::InvalidSpace("table weight exponent must be > -1"));
                }
            }
        }
        Ok(())
    }

    /// Density at `r`, assumed to lie in `[lower, upper]`.
    pub fn density(&self, r: f64) -> f64 {
        match &self.form {
            DensityForm::Power { coeff, exponent } => {
                if *coeff == 0.0 {
                    0.0
                } else {
                    coeff * r.powf(*exponent)
                }
            }
            DensityForm::Tabulated { radii, values, weight_exponent } => {
                let i = interval_index(radii, r);
                let (x0, x1) = (radii[i], radii[i + 1]);
                let t = ((r - x0) / (x1 - x0)).clamp(0.0, 1.0);
                let lin = values[i] + t * (values[i + 1] - values[i]);
                if *weight_exponent == 0.0 {
                    lin
                } else {
                    lin * r.powf(*weight_exponent)
                }
            }
        }
    }

    /// Exact integral of the density over `[a, b] ∩ [lower, upper]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lower);
        let b = b.min(self.upper);
        if !(b > a) {
            return 0.0;
        }
        match &self.form {
            DensityForm::Power { coeff, exponent } => {
                if *coeff == 0.0 {
                    return 0.0;
                }
                let e = exponent + 1.0;
                coeff * (pow_or_inf(b, e) - a.powf(e)) / e
            }
            DensityForm::Tabulated { radii, values, weight_exponent } => {
                let w = *weight_exponent;
                let mut total = 0.0;
                for i in interval_index(radii, a)..=interval_index(radii, b) {
                    let (x0, x1) = (radii[i], radii[i + 1]);
                    let lo = a.max(x0);
                    let hi = b.min(x1);
                    if hi <= lo {
                        continue;
                    }
                    let slope = (values[i + 1] - values[i]) / (x1 - x0);
                    let intercept = values[i] - slope * x0;
                    total += intercept * (hi.powf(w + 1.0) - lo.powf(w + 1.0)) / (w + 1.0)
                        + slope * (hi.powf(w + 2.0) - lo.powf(w + 2.0)) / (w + 2.0);
                }
                total
            }
        }
    }

    /// The same segment with its density multiplied by `r^s`.
    pub fn weighted(&self, s: f64) -> Self {
        let form = match &self.form {
            DensityForm::Power { coeff, exponent } => DensityForm::Power { coeff: *coeff, exponent: exponent + s },
            DensityForm::Tabulated { radii, values, weight_exponent } => DensityForm::Tabulated {
                radii: radii.clone(),
                values: values.clone(),
                weight_exponent: weight_exponent + s,
            },
        };
        Self { lower: self.lower, upper: self.upper, form }
    }

    fn push_breakpoints(&self, out: &mut Vec<f64>) {
        out.push(self.lower);
        if self.upper.is_finite() {
            out.push(self.upper);
        }
        if let DensityForm::Tabulated { radii, .. } = &self.form {
            out.extend_from_slice(radii);
        }
    }

    fn is_tabulated(&self) -> bool {
        matches!(self.form, DensityForm::Tabulated { .. })
    }
}

fn pow_or_inf(b: f64, e: f64) -> f64 {
    if b.is_infinite() {
        f64::INFINITY
    } else {
        b.powf(e)
    }
}

fn interval_index(radii: &[f64], r: f64) -> usize {
    let n = radii.len();
    match radii.binary_search_by(|x| x.total_cmp(&r)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

/// Evaluate a density given as segments tiling some interval; zero outside.
pub fn density_at(segments: &[DensitySegment], r: f64) -> f64 {
    for s in segments {
        if r >= s.lower && r <= s.upper {
            return s.density(r);
        }
    }
    0.0
}

/// What the radial data is a model of; decides which off-center balls are computable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Only centered balls are known.
    Radial,
    /// The weighted half-line `[0, inf)` itself.
    HalfLine,
    /// Lebesgue measure on `R^dim` (plus the origin atom), radialized.
    Euclidean { dim: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointedRadialSpace {
    segments: Vec<DensitySegment>,
    atom_mass: f64,
    label: String,
    dim_hint: Option<f64>,
    geometry: Geometry,
}

impl PointedRadialSpace {
    pub fn new(
        label: impl Into<String>,
        segments: Vec<DensitySegment>,
        atom_mass: f64,
        dim_hint: Option<f64>,
    ) -> Result<Self> {
        let space = Self { segments, atom_mass, label: label.into(), dim_hint, geometry: Geometry::Radial };
        space.validate()?;
        Ok(space)
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Result<Self> {
        if let Geometry::Euclidean { dim } = geometry {
            let ok = dim >= 1
                && self.segments.len() == 1
                && matches!(self.segments[0].form,
                    DensityForm::Power { exponent, .. } if exponent + 1.0 == dim as f64);
            if !ok {
                return Err(Error::InvalidSpace("euclidean geometry needs density c r^(dim-1)"));
            }
        }
        self.geometry = geometry;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidSpace("no segments"));
        }
        if self.segments[0].lower != 0.0 {
            return Err(Error::InvalidSpace("segments must start at radius 0"));
        }
        for s in &self.segments {
            s.validate()?;
        }
        for w in self.segments.windows(2) {
            if w[0].upper != w[1].lower {
                return Err(Error::InvalidSpace("segments must tile [0, inf) without gap or overlap"));
            }
        }
        if self.segments[self.segments.len() - 1].upper != f64::INFINITY {
            return Err(Error::InvalidSpace("last segment must extend to infinity"));
        }
        if !(self.atom_mass >= 0.0 && self.atom_mass.is_finite()) {
            return Err(Error::InvalidSpace("atom mass must be finite and >= 0"));
        }
        if let Some(n) = self.dim_hint {
            if !(n >= 1.0 && n.is_finite()) {
                return Err(Error::InvalidSpace("dimension hint must be >= 1"));
            }
        }
        Ok(())
    }

    /// Lebesgue measure of `R^n`, radialized: density `n ω_n r^(n-1)`.
    pub fn euclidean(n: u32) -> Result<Self> {
        let nf = n as f64;
        let seg = DensitySegment::power(0.0, f64::INFINITY, nf * unit_ball_volume(nf), nf - 1.0);
        Self::new(alloc::format!("euclidean({n})"), alloc::vec![seg], 0.0, Some(nf))?
            .with_geometry(Geometry::Euclidean { dim: n })
    }

    /// Exact `N`-volume cone with `m(B_rho) = A ω_N rho^N`.
    pub fn cone(a: f64, n: f64) -> Result<Self> {
        if !(a > 0.0 && n >= 1.0) {
            return Err(Error::InvalidSpace("cone needs A > 0 and N >= 1"));
        }
        let seg = DensitySegment::power(0.0, f64::INFINITY, a * n * unit_ball_volume(n), n - 1.0);
        Self::new(alloc::format!("cone({a},{n})"), alloc::vec![seg], 0.0, Some(n))
    }

    /// `L^n + M δ_0` on `R^n`, radialized around the origin.
    pub fn counterexample(n: u32, atom: f64) -> Result<Self> {
        let nf = n as f64;
        let seg = DensitySegment::power(0.0, f64::INFINITY, nf * unit_ball_volume(nf), nf - 1.0);
        Self::new(alloc::format!("counterexample({n},{atom})"), alloc::vec![seg], atom, Some(nf))?
            .with_geometry(Geometry::Euclidean { dim: n })
    }

    /// The half-line `[0, inf)` with unit density.
    pub fn half_line() -> Result<Self> {
        let seg = DensitySegment::power(0.0, f64::INFINITY, 1.0, 0.0);
        Self::new("half_line", alloc::vec![seg], 0.0, Some(1.0))?.with_geometry(Geometry::HalfLine)
    }

    pub fn segments(&self) -> &[DensitySegment] {
        &self.segments
    }

    pub fn atom_mass(&self) -> f64 {
        self.atom_mass
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim_hint(&self) -> Option<f64> {
        self.dim_hint
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn has_tabulated(&self) -> bool {
        self.segments.iter().any(DensitySegment::is_tabulated)
    }

    pub fn density(&self, r: f64) -> f64 {
        density_at(&self.segments, r)
    }

    /// Mass of the density (atom excluded) on `[a, b]`.
    pub fn continuous_mass(&self, a: f64, b: f64) -> f64 {
        self.segments.iter().map(|s| s.mass(a, b)).sum()
    }

    /// `m(B_rho(x0))`; closed and open balls agree for `rho > 0`, and
    /// `rho = 0` yields the atom.
    pub fn ball_volume(&self, rho: f64) -> f64 {
        if rho < 0.0 {
            return 0.0;
        }
        self.atom_mass + self.continuous_mass(0.0, rho)
    }

    /// Mass of the open ball of radius `r` around a point at distance `x`
    /// from the base point.
    pub fn ball_volume_at(&self, x: f64, r: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(if r > 0.0 { self.ball_volume(r) } else { 0.0 });
        }
        if !(x > 0.0 && r > 0.0) {
            return Err(Error::DomainError("off-center ball needs x >= 0 and r > 0"));
        }
        let atom = if x < r { self.atom_mass } else { 0.0 };
        match self.geometry {
            Geometry::Radial => Err(Error::UnsupportedOffCenter),
            Geometry::HalfLine => Ok(self.continuous_mass((x - r).max(0.0), x + r) + atom),
            Geometry::Euclidean { .. } => Ok(self.continuous_mass(0.0, r) + atom),
        }
    }

    /// Space with `d m^ell = d^(p' ell) d m`; the origin atom is dropped for `ell >= 1`.
    pub fn lift(&self, ell: u32, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::DomainError("p must lie in (1, inf)"));
        }
        if ell == 0 {
            return Ok(self.clone());
        }
        let s = conjugate(p) * ell as f64;
        let geometry = match self.geometry {
            Geometry::HalfLine => Geometry::HalfLine,
            _ => Geometry::Radial,
        };
        Ok(Self {
            segments: self.segments.iter().map(|seg| seg.weighted(s)).collect(),
            atom_mass: 0.0,
            label: self.label.clone(),
            dim_hint: self.dim_hint.map(|n| n + s),
            geometry,
        })
    }

    /// Every radius where the density may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for s in &self.segments {
            s.push_breakpoints(&mut out);
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    /// `(start, coeff, exponent)` of the unbounded power-law tail segment.
    pub fn tail_power(&self) -> (f64, f64, f64) {
        let last = &self.segments[self.segments.len() - 1];
        match last.form {
            DensityForm::Power { coeff, exponent } => (last.lower, coeff, exponent),
            DensityForm::Tabulated { .. } => unreachable!("validated: unbounded segment is a power law"),
        }
    }

    /// `(coeff, N)` when the space is exactly `coeff r^(N-1) dr` with no atom.
    pub fn power_cone(&self) -> Option<(f64, f64)> {
        if self.segments.len() != 1 || self.atom_mass != 0.0 {
            return None;
        }
        match self.segments[0].form {
            DensityForm::Power { coeff, exponent } if coeff > 0.0 => Some((coeff, exponent + 1.0)),
            _ => None,
        }
    }
}

/// Conjugate exponent `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}
