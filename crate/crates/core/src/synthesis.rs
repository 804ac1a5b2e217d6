//! Multiport superposition `E_tot = sum c_l E_l` and the preset excitations.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::radiator::{rotate_pattern, FieldSample, PatternGrid};
use crate::scalar::{lit, Real};

/// Complex port weights with per-port enable flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSet<T> {
    pub coefficients: Vec<Complex<T>>,
    pub active: Vec<bool>,
    pub preset_name: Option<String>,
}

/// `amplitude * exp(j phase_deg)`, exact at multiples of 90 degrees.
pub fn phasor<T: Real>(amplitude: T, phase_deg: T) -> Complex<T> {
    let quarter = phase_deg / lit(90.0);
    if quarter == quarter.round() {
        let k = quarter.to_i64().unwrap_or(0).rem_euclid(4);
        let (re, im) = match k {
            0 => (T::one(), T::zero()),
            1 => (T::zero(), T::one()),
            2 => (-T::one(), T::zero()),
            _ => (T::zero(), -T::one()),
        };
        return Complex::new(amplitude * re, amplitude * im);
    }
    Complex::from_polar(amplitude, phase_deg.to_radians())
}

/// One port of a preset row: `None` when the port is left off.
type Row = [Option<(f64, f64)>; 4];

const ON0: Option<(f64, f64)> = Some((1.0, 0.0));

/// The ten preset rows, `(amplitude, phase_deg)` on P1..P4.
pub const PRESETS: [(&str, Row); 10] = [
    ("beam-Q1-xz", [ON0, None, None, ON0]),
    ("beam-Q2-xz", [None, ON0, ON0, None]),
    ("beam-Q1-yz", [ON0, ON0, None, None]),
    ("beam-Q2-yz", [None, None, ON0, ON0]),
    ("omni-HP", [ON0, ON0, ON0, ON0]),
    (
        "broadside-LP",
        [ON0, ON0, Some((1.0, 180.0)), Some((1.0, 180.0))],
    ),
    ("DP-minus45", [ON0, None, Some((1.0, 180.0)), None]),
    ("DP-plus45", [None, ON0, None, Some((1.0, 180.0))]),
    (
        "RHCP",
        [
            ON0,
            Some((1.0, 90.0)),
            Some((1.0, 180.0)),
            Some((1.0, 270.0)),
        ],
    ),
    (
        "LHCP",
        [
            Some((1.0, 270.0)),
            Some((1.0, 180.0)),
            Some((1.0, 90.0)),
            ON0,
        ],
    ),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

impl<T: Real> ExcitationSet<T> {
    /// All ports active with the given coefficients.
    pub fn new(coefficients: Vec<Complex<T>>) -> Result<Self> {
        let active = vec![true; coefficients.len()];
        ExcitationSet {
            coefficients,
            active,
            preset_name: None,
        }
        .validated()
    }

    /// From `(amplitude, phase_deg)` pairs.
    pub fn from_polar(ports: &[(T, T)]) -> Result<Self> {
        for (l, &(a, ph)) in ports.iter().enumerate() {
            if !(a >= T::zero()) || !a.is_finite() {
                return Err(Error::Excitation(format!(
                    "port {} amplitude must be finite and >= 0, got {a}",
                    l + 1
                )));
            }
            if !(ph >= T::zero() && ph < lit(360.0)) {
                return Err(Error::Excitation(format!(
                    "port {} phase must lie in [0, 360) deg, got {ph}",
                    l + 1
                )));
            }
        }
        ExcitationSet::new(ports.iter().map(|&(a, ph)| phasor(a, ph)).collect())
    }

    /// A named preset row.
    pub fn preset(name: &str) -> Result<Self> {
        let row = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, r)| r)
            .ok_or_else(|| {
                Error::Excitation(format!(
                    "unknown preset `{name}`; expected one of {}",
                    preset_names().collect::<Vec<_>>().join(", ")
                ))
            })?;
        let mut coefficients = Vec::with_capacity(4);
        let mut active = Vec::with_capacity(4);
        for port in row {
            match port {
                Some((a, ph)) => {
                    coefficients.push(phasor(lit(*a), lit(*ph)));
                    active.push(true);
                }
                None => {
                    coefficients.push(Complex::new(T::zero(), T::zero()));
                    active.push(false);
                }
            }
        }
        Ok(ExcitationSet {
            coefficients,
            active,
            preset_name: Some(name.to_string()),
        })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        ExcitationSet {
            coefficients: self.coefficients.iter().map(|x| x * c).collect(),
            active: self.active.clone(),
            preset_name: None,
        }
    }

    /// Port-wise sum; a port is active if it is active in either set.
    pub fn combined(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Excitation(format!(
                "cannot add excitations of {} and {} ports",
                self.len(),
                other.len()
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let pick = |e: &Self, l: usize| if e.active[l] { e.coefficients[l] } else { zero };
        Ok(ExcitationSet {
            coefficients: (0..self.len())
                .map(|l| pick(self, l) + pick(other, l))
                .collect(),
            active: (0..self.len())
                .map(|l| self.active[l] || other.active[l])
                .collect(),
            preset_name: None,
        })
    }

    fn validated(self) -> Result<Self> {
        if self.coefficients.is_empty() {
            return Err(Error::Excitation("excitation has no ports".into()));
        }
        if self.active.len() != self.coefficients.len() {
            return Err(Error::Excitation(format!(
                "{} active flags for {} coefficients",
                self.active.len(),
                self.coefficients.len()
            )));
        }
        if let Some(l) = self
            .coefficients
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Excitation(format!(
                "port {} coefficient is not finite",
                l + 1
            )));
        }
        Ok(self)
    }
}

/// Port patterns `P_l = rotate_pattern(P_1, l - 1)` for `l = 1..=ports`.
pub fn port_patterns<T: Real>(p1: &PatternGrid<T>, ports: usize) -> Result<Vec<PatternGrid<T>>> {
    (0..ports).map(|l| rotate_pattern(p1, l as i64)).collect()
}

/// Sum pairing term `l` with `l + L/2` at every level, so a cyclic shift
/// of equal-weight terms (a 90 degree turn of four ports) gives a
/// bit-identical result.
fn strided_sum<T: Real>(terms: &mut Vec<FieldSample<T>>) -> FieldSample<T> {
    while terms.len() > 1 {
        if terms.len() % 2 == 1 {
            let last = terms.pop().expect("non-empty");
            terms[0] =
                FieldSample::new(terms[0].e_theta + last.e_theta, terms[0].e_phi + last.e_phi);
            continue;
        }
        let half = terms.len() / 2;
        for k in 0..half {
            let (a, b) = (terms[k], terms[k + half]);
            terms[k] = FieldSample::new(a.e_theta + b.e_theta, a.e_phi + b.e_phi);
        }
        terms.truncate(half);
    }
    terms.first().copied().unwrap_or_else(FieldSample::zero)
}

/// Node-wise `sum c_l E_l` over the active ports.
pub fn superpose<T: Real>(
    patterns: &[PatternGrid<T>],
    exc: &ExcitationSet<T>,
) -> Result<PatternGrid<T>> {
    if patterns.len() != exc.len() || exc.active.len() != exc.len() {
        return Err(Error::Excitation(format!(
            "{} excitation coefficients for {} port patterns",
            exc.len(),
            patterns.len()
        )));
    }
    let first = patterns
        .first()
        .ok_or_else(|| Error::Excitation("no port patterns".into()))?;
    for (l, p) in patterns.iter().enumerate().skip(1) {
        if !p.same_grid(first) {
            return Err(Error::Grid(format!(
                "port {} pattern grid or frequency differs from port 1",
                l + 1
            )));
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let weights: Vec<Complex<T>> = (0..exc.len())
        .map(|l| {
            if exc.active[l] {
                exc.coefficients[l]
            } else {
                zero
            }
        })
        .collect();
    let mut terms = Vec::with_capacity(patterns.len());
    let samples = (0..first.samples().len())
        .map(|k| {
            terms.clear();
            terms.extend((0..patterns.len()).map(|l| {
                if exc.active[l] {
                    patterns[l].samples()[k].scale(weights[l])
                } else {
                    FieldSample::zero()
                }
            }));
            strided_sum(&mut terms)
        })
        .collect();
    Ok(first.with_samples(samples))
}
