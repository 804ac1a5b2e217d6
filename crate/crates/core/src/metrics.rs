//! Pattern and antenna metrics.
//!
//! Angles are in degrees throughout. `U = |E_theta|^2 + |E_phi|^2` is the
//! radiation intensity up to a constant, so every metric here is
//! independent of the pattern scale.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radiator::{FieldSample, PatternGrid};
use crate::scalar::{lit, Real, SPEED_OF_LIGHT};

/// Relative tolerance under which two intensities count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// `P - |S|` below this fraction of `P` is reported as linear polarization.
pub const LINEAR_POLE: f64 = 1e-15;

fn metric(metric: &'static str, detail: impl Into<String>) -> Error {
    Error::Metric {
        metric,
        detail: detail.into(),
    }
}

fn db<T: Real>(x: T) -> T {
    lit::<T>(10.0) * x.log10()
}

/// Trapezoid integral of `U sin(theta)` over the sphere.
pub fn radiated_power<T: Real>(p: &PatternGrid<T>) -> Result<T> {
    if !p.covers_full_sphere() {
        return Err(metric(
            "directivity",
            format!(
                "grid ({} x {} nodes of {} x {} deg) does not cover the full sphere",
                p.n_theta(),
                p.n_phi(),
                p.theta_step(),
                p.phi_step()
            ),
        ));
    }
    let dt = p.theta_step().to_radians();
    let dp = p.phi_step().to_radians();
    let last = p.n_theta() - 1;
    let mut total = T::zero();
    for i in 0..p.n_theta() {
        let w = if i == 0 || i == last {
            lit(0.5)
        } else {
            T::one()
        };
        let s = p.theta_deg(i).to_radians().sin();
        let row: T = (0..p.n_phi()).fold(T::zero(), |acc, j| acc + p.power(i, j));
        total = total + w * s * row;
    }
    Ok(total * dt * dp)
}

/// Directivity (dBi) towards a grid node.
pub fn directivity<T: Real>(p: &PatternGrid<T>, direction: (T, T)) -> Result<T> {
    let total = radiated_power(p)?;
    if !(total > T::zero()) {
        return Err(metric("directivity", "pattern radiates no power"));
    }
    let (i, j) = p.node(direction.0, direction.1).ok_or_else(|| {
        metric(
            "directivity",
            format!(
                "direction ({}, {}) is not a grid node",
                direction.0, direction.1
            ),
        )
    })?;
    Ok(db(lit::<T>(4.0) * T::PI() * p.power(i, j) / total))
}

/// Realized gain from directivity and a radiation efficiency in `(0, 1]`.
pub fn realized_gain<T: Real>(directivity_dbi: T, efficiency: T) -> Result<T> {
    if !(efficiency > T::zero() && efficiency <= T::one()) {
        return Err(metric(
            "realized_gain",
            format!("efficiency must lie in (0, 1], got {efficiency}"),
        ));
    }
    Ok(directivity_dbi + db(efficiency))
}

/// Rotation sense of the polarization ellipse (IEEE convention, `exp(j w t)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Right,
    Left,
    Linear,
}

/// Right- and left-hand circular components `(E_R, E_L)`.
///
/// `E_R = (E_theta + j E_phi) / sqrt 2`, `E_L = (E_theta - j E_phi) / sqrt 2`.
pub fn circular_components<T: Real>(
    e_theta: Complex<T>,
    e_phi: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let j = Complex::new(T::zero(), T::one());
    let r = T::FRAC_1_SQRT_2();
    ((e_theta + j * e_phi) * r, (e_theta - j * e_phi) * r)
}

/// Axial ratio in dB, `+inf` for linear polarization.
pub fn axial_ratio<T: Real>(e_theta: Complex<T>, e_phi: Complex<T>) -> Result<T> {
    let p = e_theta.norm_sqr() + e_phi.norm_sqr();
    if !(p > T::zero()) {
        return Err(metric(
            "axial_ratio",
            "zero field has no polarization ellipse",
        ));
    }
    let s = (e_theta * e_theta + e_phi * e_phi).norm();
    let den = p - s;
    if den < lit::<T>(LINEAR_POLE) * p {
        return Ok(T::infinity());
    }
    Ok(lit::<T>(10.0) * ((p + s) / den).log10())
}

/// Polarization sense from the dominant circular component.
pub fn polarization_sense<T: Real>(e_theta: Complex<T>, e_phi: Complex<T>) -> Result<Sense> {
    if axial_ratio(e_theta, e_phi)?.is_infinite() {
        return Ok(Sense::Linear);
    }
    let (r, l) = circular_components(e_theta, e_phi);
    Ok(if r.norm_sqr() > l.norm_sqr() {
        Sense::Right
    } else {
        Sense::Left
    })
}

/// Pattern cut used to restrict a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cut<T> {
    /// Plane through the z-axis: half-planes `phi` and `phi + 180`.
    Phi(T),
    /// Cone of constant theta.
    Theta(T),
}

fn phi_index<T: Real>(p: &PatternGrid<T>, phi: T) -> Result<usize> {
    p.node(T::zero(), phi)
        .map(|(_, j)| j)
        .ok_or_else(|| metric("cut", format!("phi = {phi} deg is not on the grid")))
}

/// Grid nodes of a cut, in signed-angle order.
///
/// A phi-cut runs from `-180` (half-plane `phi + 180`) through the pole to
/// `+180`; a theta-cut runs over phi.
fn cut_nodes<T: Real>(p: &PatternGrid<T>, cut: Cut<T>) -> Result<Vec<(T, usize, usize)>> {
    match cut {
        Cut::Phi(phi) => {
            let j0 = phi_index(p, phi)?;
            let j1 = phi_index(p, phi + lit(180.0))?;
            let mut out = Vec::with_capacity(2 * p.n_theta());
            for i in (1..p.n_theta()).rev() {
                out.push((-p.theta_deg(i), i, j1));
            }
            for i in 0..p.n_theta() {
                out.push((p.theta_deg(i), i, j0));
            }
            Ok(out)
        }
        Cut::Theta(theta) => {
            let (i, _) = p
                .node(theta, T::zero())
                .ok_or_else(|| metric("cut", format!("theta = {theta} deg is not on the grid")))?;
            Ok((0..p.n_phi()).map(|j| (p.phi_deg(j), i, j)).collect())
        }
    }
}

/// Grid index of the intensity maximum.
///
/// Intensities within [`TIE_TOLERANCE`] of the maximum tie; ties go to the
/// smallest theta, then the smallest phi.
pub fn argmax<T: Real>(p: &PatternGrid<T>, cut: Option<Cut<T>>) -> Result<(usize, usize)> {
    let nodes: Vec<(usize, usize)> = match cut {
        None => (0..p.n_theta())
            .flat_map(|i| (0..p.n_phi()).map(move |j| (i, j)))
            .collect(),
        Some(c) => cut_nodes(p, c)?
            .into_iter()
            .map(|(_, i, j)| (i, j))
            .collect(),
    };
    let max = nodes
        .iter()
        .map(|&(i, j)| p.power(i, j))
        .fold(T::zero(), T::max);
    if !(max > T::zero()) {
        return Err(metric("beam_peak", "pattern is zero everywhere"));
    }
    let floor = max * (T::one() - lit(TIE_TOLERANCE));
    nodes
        .into_iter()
        .filter(|&(i, j)| p.power(i, j) >= floor)
        .min_by_key(|&(i, j)| (i, j))
        .ok_or_else(|| metric("beam_peak", "no maximum found"))
}

/// Beam direction in grid angles, with the signed cut angle when a
/// phi-cut was requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPeak {
    pub theta_deg: f64,
    pub phi_deg: f64,
    /// Theta measured within the requested phi-cut, negative on the
    /// `phi + 180` side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed_theta_deg: Option<f64>,
}

pub fn beam_peak<T: Real>(p: &PatternGrid<T>, cut: Option<Cut<T>>) -> Result<BeamPeak> {
    let (i, j) = argmax(p, cut)?;
    let theta = p.theta_deg(i).to_f64().unwrap_or(f64::NAN);
    let phi = p.phi_deg(j).to_f64().unwrap_or(f64::NAN);
    let signed = match cut {
        Some(Cut::Phi(phi0)) => {
            let j0 = phi_index(p, phi0)?;
            Some(if j == j0 || i == 0 { theta } else { -theta })
        }
        _ => None,
    };
    Ok(BeamPeak {
        theta_deg: theta,
        phi_deg: phi,
        signed_theta_deg: signed,
    })
}

/// Half-power beamwidth in a phi-cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beamwidth<T> {
    Width(T),
    /// The pattern never drops 3 dB below the peak on one side.
    NoCrossing,
    /// The crossing falls between the peak node and its neighbour.
    Unresolved,
}

impl<T: Real> Beamwidth<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Beamwidth::Width(w) => Some(*w),
            _ => None,
        }
    }

    pub fn flag(&self) -> Option<&'static str> {
        match self {
            Beamwidth::Width(_) => None,
            Beamwidth::NoCrossing => Some("no-crossing"),
            Beamwidth::Unresolved => Some("unresolved"),
        }
    }
}

pub fn hpbw<T: Real>(p: &PatternGrid<T>, phi_cut: T) -> Result<Beamwidth<T>> {
    let nodes = cut_nodes(p, Cut::Phi(phi_cut))?;
    let u: Vec<T> = nodes.iter().map(|&(_, i, j)| p.power(i, j)).collect();
    let (pi, pj) = argmax(p, Some(Cut::Phi(phi_cut)))?;
    let k = nodes
        .iter()
        .position(|&(_, i, j)| (i, j) == (pi, pj))
        .expect("peak lies on the cut");
    let half = u[k] * lit(0.5);
    let cross = |dir: isize| -> Option<(T, usize)> {
        let mut a = k;
        loop {
            let b = a as isize + dir;
            if b < 0 || b as usize >= u.len() {
                return None;
            }
            let b = b as usize;
            if u[b] < half {
                let t = (u[a] - half) / (u[a] - u[b]);
                let angle = nodes[a].0 + (nodes[b].0 - nodes[a].0) * t;
                return Some((angle, a.abs_diff(k)));
            }
            a = b;
        }
    };
    match (cross(-1), cross(1)) {
        (Some((_, 0)), Some((_, 0))) => Ok(Beamwidth::Unresolved),
        (Some((lo, _)), Some((hi, _))) => Ok(Beamwidth::Width(hi - lo)),
        _ => Ok(Beamwidth::NoCrossing),
    }
}

/// Max minus min of `U` in dB over a constant-theta cut.
///
/// `phi_window` restricts the cut to `[start, end)` degrees.
pub fn ripple<T: Real>(p: &PatternGrid<T>, theta_cut: T, phi_window: Option<(T, T)>) -> Result<T> {
    let nodes = cut_nodes(p, Cut::Theta(theta_cut))?;
    let (lo, hi) = phi_window.unwrap_or((T::zero(), lit(360.0)));
    let (mut min, mut max) = (T::infinity(), T::zero());
    let mut seen = false;
    for (phi, i, j) in nodes {
        if phi >= lo && phi < hi {
            let u = p.power(i, j);
            min = min.min(u);
            max = max.max(u);
            seen = true;
        }
    }
    if !seen {
        return Err(metric("ripple", "phi window holds no grid node"));
    }
    if !(max > T::zero()) {
        return Err(metric("ripple", "cut is zero everywhere"));
    }
    if min == T::zero() {
        return Ok(T::infinity());
    }
    Ok(db(max / min))
}

/// `k a` for frequency `f` (Hz) and enclosing radius `a` (m).
pub fn electrical_size<T: Real>(frequency: T, radius: T) -> Result<T> {
    if !(frequency > T::zero()) || !(radius > T::zero()) {
        return Err(metric(
            "electrical_size",
            format!("frequency and radius must be positive, got {frequency} Hz, {radius} m"),
        ));
    }
    Ok(T::TAU() * frequency / lit(SPEED_OF_LIGHT) * radius)
}

/// Harrington maximum gain `(ka)^2 + 2 ka` in dBi.
pub fn harrington_gmax<T: Real>(ka: T) -> Result<T> {
    if !(ka > T::zero()) || !ka.is_finite() {
        return Err(metric(
            "harrington_gmax",
            format!("ka must be positive, got {ka}"),
        ));
    }
    Ok(db(ka * ka + lit::<T>(2.0) * ka))
}

/// What to evaluate in a [`MetricsReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRequest {
    pub efficiency: f64,
    pub enclosing_radius: f64,
    /// Phi-cuts (deg) for beamwidths.
    pub hpbw_cuts: Vec<f64>,
    /// Theta (deg) of the ripple cut.
    pub ripple_theta: Option<f64>,
    /// `(theta, phi)` directions (deg) for axial ratio.
    pub ar_directions: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakDirection {
    pub theta_deg: f64,
    pub phi_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpbwEntry {
    pub phi_cut_deg: f64,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RippleEntry {
    pub theta_cut_deg: f64,
    /// `None` when the cut has a null.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArEntry {
    pub theta_deg: f64,
    pub phi_deg: f64,
    /// `None` for linear polarization.
    pub value: Option<f64>,
    pub sense: Sense,
}

/// Summary metrics of one pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct MetricsReport {
    pub frequency_hz: f64,
    pub directivity_dBi: f64,
    pub efficiency: f64,
    pub realized_gain_dBi: f64,
    pub peak_direction: PeakDirection,
    pub hpbw_deg: Vec<HpbwEntry>,
    pub ripple_dB: Option<RippleEntry>,
    pub ar_dB: Vec<ArEntry>,
    pub ka: f64,
    pub harrington_gmax_dBi: f64,
    /// Realized gain more than 0.5 dB above the Harrington bound.
    pub exceeds_harrington: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl MetricsReport {
    pub fn evaluate<T: Real>(p: &PatternGrid<T>, req: &MetricsRequest) -> Result<Self> {
        let f64_of = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let (i, j) = argmax(p, None)?;
        let d = f64_of(directivity(p, (p.theta_deg(i), p.phi_deg(j)))?);
        let g = realized_gain(d, req.efficiency)?;
        let ka = electrical_size(f64_of(p.frequency()), req.enclosing_radius)?;
        let gmax = harrington_gmax(ka)?;
        let mut hp = Vec::with_capacity(req.hpbw_cuts.len());
        for &c in &req.hpbw_cuts {
            let w = hpbw(p, lit(c))?;
            hp.push(HpbwEntry {
                phi_cut_deg: c,
                value: w.value().map(f64_of),
                flag: w.flag().map(String::from),
            });
        }
        let ripple_entry = match req.ripple_theta {
            Some(t) => Some(RippleEntry {
                theta_cut_deg: t,
                value: finite(f64_of(ripple(p, lit(t), None)?)),
            }),
            None => None,
        };
        let mut ar = Vec::with_capacity(req.ar_directions.len());
        for &(t, f) in &req.ar_directions {
            let (a, b) = p.node(lit(t), lit(f)).ok_or_else(|| {
                metric(
                    "axial_ratio",
                    format!("direction ({t}, {f}) is not a grid node"),
                )
            })?;
            let s: FieldSample<T> = p.sample(a, b);
            ar.push(ArEntry {
                theta_deg: t,
                phi_deg: f,
                value: finite(f64_of(axial_ratio(s.e_theta, s.e_phi)?)),
                sense: polarization_sense(s.e_theta, s.e_phi)?,
            });
        }
        Ok(MetricsReport {
            frequency_hz: f64_of(p.frequency()),
            directivity_dBi: d,
            efficiency: req.efficiency,
            realized_gain_dBi: g,
            peak_direction: PeakDirection {
                theta_deg: f64_of(p.theta_deg(i)),
                phi_deg: f64_of(p.phi_deg(j)),
            },
            hpbw_deg: hp,
            ripple_dB: ripple_entry,
            ar_dB: ar,
            ka,
            harrington_gmax_dBi: gmax,
            exceeds_harrington: g > gmax + 0.5,
        })
    }
}

/// Unit-amplitude pattern with `U = u(theta, phi)` in `E_theta`.
#[doc(hidden)]
pub fn intensity_pattern<T: Real>(step: T, u: impl Fn(T, T) -> T) -> Result<PatternGrid<T>> {
    PatternGrid::from_fn(step, step, lit(1e9), |t, f| {
        FieldSample::new(
            Complex::new(u(t, f).max(T::zero()).sqrt(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn axial_ratio_cases() {
        assert!(axial_ratio(c(1.0, 0.0), c(0.0, 1.0)).unwrap().abs() < 1e-12);
        assert!(axial_ratio(c(1.0, 0.0), c(0.0, 0.0)).unwrap().is_infinite());
        let r = axial_ratio(c(2.0, 0.0), c(0.0, 1.0)).unwrap();
        assert!((r - 20.0 * 2f64.log10()).abs() < 1e-12);
        assert!(axial_ratio(c(0.0, 0.0), c(0.0, 0.0)).is_err());
        // 45 deg linear
        assert!(axial_ratio(c(1.0, 0.0), c(1.0, 0.0)).unwrap().is_infinite());
    }

    #[test]
    fn handedness_of_circular_states() {
        // theta_hat - j phi_hat rotates x -> y at the pole: right hand
        assert_eq!(
            polarization_sense(c(1.0, 0.0), c(0.0, -1.0)).unwrap(),
            Sense::Right
        );
        assert_eq!(
            polarization_sense(c(1.0, 0.0), c(0.0, 1.0)).unwrap(),
            Sense::Left
        );
        assert_eq!(
            polarization_sense(c(1.0, 0.0), c(-1.0, 0.0)).unwrap(),
            Sense::Linear
        );
    }

    #[test]
    fn harrington_values() {
        assert!((harrington_gmax(1.0).unwrap() - 10.0 * 3f64.log10()).abs() < 1e-12);
        assert!(harrington_gmax(2f64.sqrt() - 1.0).unwrap().abs() < 1e-12);
        assert!(harrington_gmax(0.0).is_err());
        let a: f64 = electrical_size(1e9, 0.1).unwrap();
        assert!((electrical_size(2e9, 0.1).unwrap() - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn beam_peak_of_constructed_pattern() {
        let p = intensity_pattern(
            5.0,
            |t: f64, f: f64| {
                if t == 35.0 && f == 0.0 {
                    2.0
                } else {
                    1.0
                }
            },
        )
        .unwrap();
        let b = beam_peak(&p, None).unwrap();
        assert_eq!((b.theta_deg, b.phi_deg), (35.0, 0.0));
        let b = beam_peak(&p, Some(Cut::Phi(180.0))).unwrap();
        assert_eq!(b.signed_theta_deg, Some(-35.0));
    }

    #[test]
    fn ties_go_to_smallest_theta_then_phi() {
        let p = intensity_pattern(10.0, |t: f64, f: f64| {
            if (t == 40.0 || t == 20.0) && (f == 90.0 || f == 30.0) {
                1.0 + 1e-14 * f
            } else {
                0.5
            }
        })
        .unwrap();
        let b = beam_peak(&p, None).unwrap();
        assert_eq!((b.theta_deg, b.phi_deg), (20.0, 30.0));
    }

    #[test]
    fn single_node_beam_is_unresolved() {
        let p = intensity_pattern(
            1.0,
            |t: f64, f: f64| if t == 30.0 && f == 0.0 { 1.0 } else { 1e-6 },
        )
        .unwrap();
        assert_eq!(hpbw(&p, 0.0).unwrap(), Beamwidth::Unresolved);
        let flat = intensity_pattern(1.0, |_, _| 1.0).unwrap();
        assert_eq!(hpbw(&flat, 0.0).unwrap(), Beamwidth::NoCrossing);
    }

    #[test]
    fn ripple_and_window() {
        let p = intensity_pattern(5.0, |_, f: f64| 2.0 + (4.0 * f.to_radians()).cos()).unwrap();
        let full = ripple(&p, 90.0, None).unwrap();
        let quarter = ripple(&p, 90.0, Some((0.0, 90.0))).unwrap();
        assert_eq!(full, quarter);
        assert!((full - 10.0 * 3f64.log10()).abs() < 1e-12);
        assert!(ripple(&p, 33.0, None).is_err());
    }

    #[test]
    fn partial_grid_rejected() {
        let samples = vec![FieldSample::zero(); 2 * 4];
        let p = PatternGrid::new(
            45.0,
            90.0,
            2,
            4,
            1e9,
            crate::radiator::Normalization::FieldUnnormalized,
            samples,
        )
        .unwrap();
        assert!(directivity(&p, (0.0, 0.0)).is_err());
    }
}
