use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Far-field components `(E_theta, E_phi)` at one grid node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample<T> {
    pub e_theta: Complex<T>,
    pub e_phi: Complex<T>,
}

impl<T: Real> FieldSample<T> {
    pub fn new(e_theta: Complex<T>, e_phi: Complex<T>) -> Self {
        FieldSample { e_theta, e_phi }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        FieldSample {
            e_theta: z,
            e_phi: z,
        }
    }

    /// Radiation intensity up to a constant, `|E_theta|^2 + |E_phi|^2`.
    pub fn power(&self) -> T {
        self.e_theta.norm_sqr() + self.e_phi.norm_sqr()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        FieldSample {
            e_theta: self.e_theta * c,
            e_phi: self.e_phi * c,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.e_theta.re.is_finite()
            && self.e_theta.im.is_finite()
            && self.e_phi.re.is_finite()
            && self.e_phi.im.is_finite()
    }
}

/// How the sample amplitudes are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    FieldUnnormalized,
    PeakNormalized,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::FieldUnnormalized => "field-unnormalized",
            Normalization::PeakNormalized => "peak-normalized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "field-unnormalized" => Some(Normalization::FieldUnnormalized),
            "peak-normalized" => Some(Normalization::PeakNormalized),
            _ => None,
        }
    }
}

/// Complex far field on a regular `(theta, phi)` grid.
///
/// Node `(i, j)` sits at `theta = i * theta_step`, `phi = j * phi_step`
/// (degrees); samples are stored theta-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid<T> {
    theta_step: T,
    phi_step: T,
    n_theta: usize,
    n_phi: usize,
    frequency: T,
    normalization: Normalization,
    samples: Vec<FieldSample<T>>,
    metadata: Vec<(String, String)>,
}

/// `a / b` when it is an integer to within `1e-9`.
pub(crate) fn exact_ratio<T: Real>(a: T, b: T) -> Option<usize> {
    let r = a / b;
    let rounded = r.round();
    if (r - rounded).abs() <= lit(1e-9) && rounded >= T::zero() {
        rounded.to_usize()
    } else {
        None
    }
}

impl<T: Real> PatternGrid<T> {
    pub fn new(
        theta_step: T,
        phi_step: T,
        n_theta: usize,
        n_phi: usize,
        frequency: T,
        normalization: Normalization,
        samples: Vec<FieldSample<T>>,
    ) -> Result<Self> {
        if !(theta_step > T::zero()) || !(phi_step > T::zero()) {
            return Err(Error::Grid(format!(
                "grid steps must be positive, got theta {theta_step}, phi {phi_step}"
            )));
        }
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Grid("grid needs at least one node".into()));
        }
        let slack = lit::<T>(1e-9);
        if count::<T>(n_theta - 1) * theta_step > lit::<T>(180.0) + slack {
            return Err(Error::Grid(format!(
                "{n_theta} theta nodes of {theta_step} deg exceed 180 deg"
            )));
        }
        if count::<T>(n_phi) * phi_step > lit::<T>(360.0) + slack
            && !(n_phi == 1 && phi_step >= lit(360.0))
        {
            return Err(Error::Grid(format!(
                "{n_phi} phi nodes of {phi_step} deg exceed one turn"
            )));
        }
        if samples.len() != n_theta * n_phi {
            return Err(Error::Grid(format!(
                "expected {} samples, got {}",
                n_theta * n_phi,
                samples.len()
            )));
        }
        if let Some(k) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Grid(format!(
                "non-finite sample at theta index {}, phi index {}",
                k / n_phi,
                k % n_phi
            )));
        }
        if !(frequency > T::zero()) || !frequency.is_finite() {
            return Err(Error::Grid(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        Ok(PatternGrid {
            theta_step,
            phi_step,
            n_theta,
            n_phi,
            frequency,
            normalization,
            samples,
            metadata: Vec::new(),
        })
    }

    /// Full-sphere grid filled by `f(theta_deg, phi_deg)`.
    pub fn from_fn<F>(theta_step: T, phi_step: T, frequency: T, f: F) -> Result<Self>
    where
        F: Fn(T, T) -> FieldSample<T>,
    {
        let (n_theta, n_phi) = full_sphere_shape(theta_step, phi_step)?;
        let mut samples = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let th = count::<T>(i) * theta_step;
            for j in 0..n_phi {
                samples.push(f(th, count::<T>(j) * phi_step));
            }
        }
        PatternGrid::new(
            theta_step,
            phi_step,
            n_theta,
            n_phi,
            frequency,
            Normalization::FieldUnnormalized,
            samples,
        )
    }

    pub fn theta_step(&self) -> T {
        self.theta_step
    }

    pub fn phi_step(&self) -> T {
        self.phi_step
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn frequency(&self) -> T {
        self.frequency
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn theta_deg(&self, i: usize) -> T {
        count::<T>(i) * self.theta_step
    }

    pub fn phi_deg(&self, j: usize) -> T {
        count::<T>(j) * self.phi_step
    }

    pub fn samples(&self) -> &[FieldSample<T>] {
        &self.samples
    }

    pub fn sample(&self, i: usize, j: usize) -> FieldSample<T> {
        self.samples[i * self.n_phi + j]
    }

    pub fn power(&self, i: usize, j: usize) -> T {
        self.sample(i, j).power()
    }

    /// Index of the node at `(theta, phi)` degrees, if it lies on the grid.
    pub fn node(&self, theta_deg: T, phi_deg: T) -> Option<(usize, usize)> {
        let i = exact_ratio(theta_deg, self.theta_step)?;
        let phi = phi_deg - (phi_deg / lit(360.0)).floor() * lit(360.0);
        let j = exact_ratio(phi, self.phi_step)? % self.full_turn_nodes().unwrap_or(usize::MAX);
        (i < self.n_theta && j < self.n_phi).then_some((i, j))
    }

    /// Number of phi nodes per turn when the grid closes on itself.
    pub(crate) fn full_turn_nodes(&self) -> Option<usize> {
        let n = exact_ratio(lit(360.0), self.phi_step)?;
        (n == self.n_phi).then_some(n)
    }

    /// True when theta spans `[0, 180]` and phi a whole turn.
    pub fn covers_full_sphere(&self) -> bool {
        exact_ratio(lit(180.0), self.theta_step) == Some(self.n_theta - 1)
            && self.full_turn_nodes().is_some()
    }

    /// Extra `key=value` pairs carried in the file header.
    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        let key = key.into();
        let value = value.into();
        if let Some(slot) = self.metadata.iter_mut().find(|(k, _)| *k == key) {
            slot.1 = value;
        } else {
            self.metadata.push((key, value));
        }
        self
    }

    pub(crate) fn set_metadata(&mut self, metadata: Vec<(String, String)>) {
        self.metadata = metadata;
    }

    /// True when both grids have the same nodes and frequency.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.theta_step == other.theta_step
            && self.phi_step == other.phi_step
            && self.n_theta == other.n_theta
            && self.n_phi == other.n_phi
            && self.frequency == other.frequency
    }

    /// Copy scaled so the largest `|E|` equals one.
    pub fn peak_normalized(&self) -> Result<Self> {
        let peak = self
            .samples
            .iter()
            .map(|s| s.power())
            .fold(T::zero(), T::max)
            .sqrt();
        if peak == T::zero() {
            return Err(Error::Grid(
                "cannot peak-normalize an all-zero pattern".into(),
            ));
        }
        let c = Complex::new(T::one() / peak, T::zero());
        let mut out = self.map_samples(|s| s.scale(c));
        out.normalization = Normalization::PeakNormalized;
        Ok(out)
    }

    pub(crate) fn map_samples(&self, f: impl Fn(&FieldSample<T>) -> FieldSample<T>) -> Self {
        PatternGrid {
            samples: self.samples.iter().map(f).collect(),
            metadata: self.metadata.clone(),
            ..*self
        }
    }

    pub(crate) fn with_samples(&self, samples: Vec<FieldSample<T>>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        PatternGrid {
            samples,
            metadata: self.metadata.clone(),
            ..*self
        }
    }
}

pub(crate) fn full_sphere_shape<T: Real>(theta_step: T, phi_step: T) -> Result<(usize, usize)> {
    if !(theta_step > T::zero()) || !(phi_step > T::zero()) {
        return Err(Error::Grid("grid steps must be positive".into()));
    }
    let nt = exact_ratio(lit(180.0), theta_step)
        .ok_or_else(|| Error::Grid(format!("theta step {theta_step} deg does not divide 180")))?;
    let np = exact_ratio(lit(360.0), phi_step)
        .ok_or_else(|| Error::Grid(format!("phi step {phi_step} deg does not divide 360")))?;
    Ok((nt + 1, np))
}

/// Pattern rotated by `quarter_turns * 90` degrees about the z-axis.
///
/// Output node `(theta, phi)` takes the input sample at
/// `(theta, phi - 90 * quarter_turns)`. `E_theta`, `E_phi` are scalars in
/// the local spherical basis and move unchanged.
pub fn rotate_pattern<T: Real>(p: &PatternGrid<T>, quarter_turns: i64) -> Result<PatternGrid<T>> {
    let per_quarter = exact_ratio(lit(90.0), p.phi_step).ok_or_else(|| {
        Error::Grid(format!(
            "phi step {} deg does not divide 90 deg; quarter-turn rotation needs exact re-indexing",
            p.phi_step
        ))
    })?;
    let n_phi = p.full_turn_nodes().ok_or_else(|| {
        Error::Grid(format!(
            "grid with {} phi nodes of {} deg does not close a full turn",
            p.n_phi, p.phi_step
        ))
    })?;
    let shift = (quarter_turns.rem_euclid(4) as usize * per_quarter) % n_phi;
    if shift == 0 {
        return Ok(p.clone());
    }
    let mut samples = Vec::with_capacity(p.samples.len());
    for i in 0..p.n_theta {
        let row = &p.samples[i * n_phi..(i + 1) * n_phi];
        for j in 0..n_phi {
            samples.push(row[(j + n_phi - shift) % n_phi]);
        }
    }
    Ok(p.with_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn spike() -> PatternGrid<f64> {
        PatternGrid::from_fn(5.0, 5.0, 1e9, |th, ph| {
            let v = if ph == 0.0 && th == 45.0 { 1.0 } else { 1e-3 };
            FieldSample::new(c(v, 0.0), c(0.0, ph / 360.0))
        })
        .unwrap()
    }

    #[test]
    fn full_turn_is_identity() {
        let p = spike();
        assert_eq!(rotate_pattern(&p, 4).unwrap(), p);
        assert_eq!(rotate_pattern(&p, -8).unwrap(), p);
    }

    #[test]
    fn quarter_turn_moves_peak() {
        let p = spike();
        let r = rotate_pattern(&p, 1).unwrap();
        let (i, j) = r.node(45.0, 90.0).unwrap();
        assert_eq!(r.sample(i, j), p.sample(i, 0));
        let back = rotate_pattern(&r, -1).unwrap();
        assert_eq!(back, p);
        let three = rotate_pattern(&rotate_pattern(&r, 1).unwrap(), 1).unwrap();
        assert_eq!(three, rotate_pattern(&p, 3).unwrap());
    }

    #[test]
    fn incompatible_step_rejected() {
        let samples = vec![FieldSample::zero(); 3 * 51];
        let p = PatternGrid::new(
            90.0,
            7.0,
            3,
            51,
            1e9,
            Normalization::FieldUnnormalized,
            samples,
        )
        .unwrap();
        assert!(matches!(rotate_pattern(&p, 1), Err(Error::Grid(_))));
    }

    #[test]
    fn rejects_non_finite_samples() {
        let mut samples = vec![FieldSample::zero(); 2 * 4];
        samples[5].e_phi = c(f64::NAN, 0.0);
        let e = PatternGrid::new(
            180.0,
            90.0,
            2,
            4,
            1e9,
            Normalization::FieldUnnormalized,
            samples,
        )
        .unwrap_err();
        assert!(e.to_string().contains("theta index 1"));
    }

    #[test]
    fn node_lookup_wraps_phi() {
        let p = spike();
        assert_eq!(p.node(10.0, 370.0), Some((2, 2)));
        assert_eq!(p.node(10.0, -5.0), Some((2, 71)));
        assert_eq!(p.node(7.0, 0.0), None);
        assert!(p.covers_full_sphere());
    }

    #[test]
    fn peak_normalization() {
        let p = spike().peak_normalized().unwrap();
        let max = p.samples().iter().map(|s| s.power()).fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-15);
        assert_eq!(p.normalization(), Normalization::PeakNormalized);
    }
}
