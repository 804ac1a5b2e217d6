//! Annular-sector cavity: eigenmodes, eigenfunctions and the driven field.
//!
//! The patch is a cavity bounded by magnetic walls at `rho = r_i`,
//! `rho = r_e`, `phi = 0` and `phi = alpha` (sector-local angle). Modes are
//! `psi = R(rho) cos(v phi)` with `v = n pi / alpha` and a radial factor
//! built from `J_v` and `Y_v` that satisfies the wall condition at `r_i`.
//! The wall condition at `r_e` gives the characteristic equation
//!
//! ```text
//! D(x) = J'_v(x q) Y'_v(x) - J'_v(x) Y'_v(x q) = 0,   q = r_i / r_e,
//! ```
//!
//! solved in the normalized variable `x = k r_e`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real, MU_0, SPEED_OF_LIGHT};
use crate::specfun::{bessel_jy_unchecked, Order};

/// Dimensions and substrate of one annular-sector patch.
///
/// Lengths in metres, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGeometry<T> {
    pub inner_radius: T,
    pub outer_radius: T,
    /// Opening angle of the sector.
    pub sector_angle: T,
    /// Azimuth of the sector bisector about the z-axis.
    pub bisector: T,
    pub thickness: T,
    pub eps_r: T,
    pub loss_tangent: T,
}

fn invalid(field: &'static str, detail: String) -> Error {
    Error::InvalidParameter { field, detail }
}

impl<T: Real> SectorGeometry<T> {
    pub fn new(
        inner_radius: T,
        outer_radius: T,
        sector_angle: T,
        bisector: T,
        thickness: T,
        eps_r: T,
        loss_tangent: T,
    ) -> Result<Self> {
        let g = SectorGeometry {
            inner_radius,
            outer_radius,
            sector_angle,
            bisector,
            thickness,
            eps_r,
            loss_tangent,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("r_i", self.inner_radius),
            ("r_e", self.outer_radius),
            ("alpha", self.sector_angle),
            ("phi_0", self.bisector),
            ("t", self.thickness),
            ("eps_r", self.eps_r),
            ("tan_delta", self.loss_tangent),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.inner_radius > T::zero()) {
            return Err(invalid(
                "r_i",
                format!("inner radius must be positive, got {}", self.inner_radius),
            ));
        }
        if !(self.inner_radius < self.outer_radius) {
            return Err(invalid(
                "r_i",
                format!(
                    "inner radius {} must be smaller than outer radius {}",
                    self.inner_radius, self.outer_radius
                ),
            ));
        }
        if !(self.sector_angle > T::zero() && self.sector_angle <= T::TAU()) {
            return Err(invalid(
                "alpha",
                format!(
                    "sector angle must lie in (0, 2 pi], got {}",
                    self.sector_angle
                ),
            ));
        }
        if !(self.thickness > T::zero()) {
            return Err(invalid(
                "t",
                format!("thickness must be positive, got {}", self.thickness),
            ));
        }
        if !(self.eps_r >= T::one()) {
            return Err(invalid(
                "eps_r",
                format!("relative permittivity must be >= 1, got {}", self.eps_r),
            ));
        }
        if !(self.loss_tangent >= T::zero()) {
            return Err(invalid(
                "tan_delta",
                format!("loss tangent must be >= 0, got {}", self.loss_tangent),
            ));
        }
        Ok(())
    }

    /// `r_i / r_e`.
    pub fn radius_ratio(&self) -> T {
        self.inner_radius / self.outer_radius
    }

    /// Same sector rotated by `delta` radians about the z-axis.
    pub fn rotated(&self, delta: T) -> Self {
        SectorGeometry {
            bisector: self.bisector + delta,
            ..*self
        }
    }

    /// Both radii multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        SectorGeometry {
            inner_radius: self.inner_radius * s,
            outer_radius: self.outer_radius * s,
            ..*self
        }
    }

    /// Global azimuth of a sector-local angle.
    pub fn global_angle(&self, local: T) -> T {
        self.bisector - self.sector_angle / lit(2.0) + local
    }

    /// Warning text when the substrate is not electrically thin at `f`.
    pub fn thickness_warning(&self, frequency: T) -> Option<String> {
        let lambda = lit::<T>(SPEED_OF_LIGHT) / frequency;
        (self.thickness > lit::<T>(0.05) * lambda).then(|| {
            format!(
                "substrate thickness {} m exceeds 0.05 wavelength ({} m) at {} Hz; thin-cavity assumption is weak",
                self.thickness,
                lit::<T>(0.05) * lambda,
                frequency
            )
        })
    }

    pub(crate) fn contains(&self, rho: T, phi: T) -> bool {
        let slack = lit::<T>(1e-12);
        let rtol = slack * self.outer_radius;
        let atol = slack * self.sector_angle.max(T::one());
        rho >= self.inner_radius - rtol
            && rho <= self.outer_radius + rtol
            && phi >= -atol
            && phi <= self.sector_angle + atol
    }
}

/// Feed location in sector-local polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedPoint<T> {
    pub rho: T,
    pub phi: T,
}

impl<T: Real> FeedPoint<T> {
    pub fn new(geom: &SectorGeometry<T>, rho: T, phi: T) -> Result<Self> {
        if !rho.is_finite() || !phi.is_finite() {
            return Err(invalid("feed", "coordinates must be finite".into()));
        }
        if !geom.contains(rho, phi) {
            return Err(invalid(
                "feed",
                format!(
                    "feed ({rho} m, {phi} rad) lies outside the sector [{}, {}] x [0, {}]",
                    geom.inner_radius, geom.outer_radius, geom.sector_angle
                ),
            ));
        }
        Ok(FeedPoint { rho, phi })
    }
}

/// One cavity eigenmode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<T> {
    /// Radial index, starting at 1.
    pub m: usize,
    /// Azimuthal index.
    pub n: usize,
    /// Bessel order `n pi / alpha`.
    pub order: T,
    /// Normalized root `k r_e`.
    pub x: T,
    /// Resonant frequency in Hz.
    pub frequency: T,
}

impl<T: Real> Mode<T> {
    /// Resonant wavenumber inside the dielectric (1/m).
    pub fn wavenumber(&self, radius: T) -> T {
        self.x / radius
    }
}

/// Parameters of the root scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolverConfig<T> {
    /// Largest normalized root searched.
    pub x_ceiling: T,
    /// Sign-change scan step in `x`.
    pub scan_step: T,
    /// Final bracket width relative to the root.
    pub relative_width: T,
    /// Optional multiplier on `r_e` for an effective (fringing) radius.
    pub radius_factor: Option<T>,
}

impl<T: Real> Default for ModeSolverConfig<T> {
    fn default() -> Self {
        ModeSolverConfig {
            x_ceiling: lit(40.0),
            scan_step: lit(1e-3),
            relative_width: lit(1e-12),
            radius_factor: None,
        }
    }
}

impl<T: Real> ModeSolverConfig<T> {
    fn validate(&self) -> Result<()> {
        if !(self.x_ceiling > T::zero()) || !self.x_ceiling.is_finite() {
            return Err(invalid(
                "x_ceiling",
                format!("must be positive, got {}", self.x_ceiling),
            ));
        }
        if !(self.scan_step > T::zero()) || self.scan_step >= self.x_ceiling {
            return Err(invalid(
                "scan_step",
                format!("must lie in (0, x_ceiling), got {}", self.scan_step),
            ));
        }
        if !(self.relative_width > T::zero()) {
            return Err(invalid(
                "relative_width",
                format!("must be positive, got {}", self.relative_width),
            ));
        }
        if let Some(f) = self.radius_factor {
            if !(f > T::zero()) || !f.is_finite() {
                return Err(invalid(
                    "radius_factor",
                    format!("must be positive, got {f}"),
                ));
            }
        }
        Ok(())
    }

    /// Radius entering the wavenumber/frequency map.
    pub fn effective_radius(&self, geom: &SectorGeometry<T>) -> T {
        geom.outer_radius * self.radius_factor.unwrap_or(T::one())
    }
}

/// Resonant frequency `c x / (2 pi r sqrt(eps_r))` of a normalized root.
pub fn resonant_frequency<T: Real>(x: T, radius: T, eps_r: T) -> T {
    lit::<T>(SPEED_OF_LIGHT) * x / (T::TAU() * radius * eps_r.sqrt())
}

/// Characteristic function `D(x)` for order `v` and radius ratio `q`,
/// together with its envelope scale
/// `(|J'_v(xq)| + |Y'_v(xq)|) (|J'_v(x)| + |Y'_v(x)|)`, which does not
/// collapse at the root and is used to judge residuals.
pub fn characteristic<T: Real>(order: T, ratio: T, x: T) -> Result<(T, T)> {
    let inner = bessel_jy_unchecked(order, x * ratio)?;
    let outer = bessel_jy_unchecked(order, x)?;
    let d = inner.jp * outer.yp - outer.jp * inner.yp;
    let scale = (inner.jp.abs() + inner.yp.abs()) * (outer.jp.abs() + outer.yp.abs());
    Ok((d, scale))
}

fn residual_tolerance<T: Real>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(1e3))
}

/// Finds the first `m_max` roots for every azimuthal index `0..=n_max`.
///
/// The result is sorted by resonant frequency (ties by `n`, then `m`).
pub fn solve_modes<T: Real>(
    geom: &SectorGeometry<T>,
    n_max: usize,
    m_max: usize,
    config: &ModeSolverConfig<T>,
) -> Result<Vec<Mode<T>>> {
    geom.validate()?;
    config.validate()?;
    if m_max == 0 {
        return Err(invalid(
            "m_max",
            "at least one radial root is required".into(),
        ));
    }
    let radius = config.effective_radius(geom);
    let per_order: Vec<Result<Vec<Mode<T>>>> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let order = Order::from_azimuthal_index(n, geom.sector_angle)?.value();
            let roots =
                radial_roots(order, geom.radius_ratio(), m_max, config).map_err(|e| match e {
                    Error::MissingRoots {
                        found,
                        wanted,
                        order,
                        ceiling,
                        ..
                    } => Error::MissingRoots {
                        n,
                        order,
                        found,
                        wanted,
                        ceiling,
                    },
                    other => other,
                })?;
            Ok(roots
                .into_iter()
                .enumerate()
                .map(|(i, x)| Mode {
                    m: i + 1,
                    n,
                    order,
                    x,
                    frequency: resonant_frequency(x, radius, geom.eps_r),
                })
                .collect())
        })
        .collect();
    let mut modes = Vec::with_capacity((n_max + 1) * m_max);
    for r in per_order {
        modes.extend(r?);
    }
    modes.sort_by(|a, b| {
        a.frequency
            .partial_cmp(&b.frequency)
            .expect("finite frequencies")
            .then(a.n.cmp(&b.n))
            .then(a.m.cmp(&b.m))
    });
    Ok(modes)
}

/// First `count` positive roots of `D(x)` for one order.
///
/// No root lies below `x = v` (the radial equation has no oscillatory
/// region there), so the scan starts just under `v`.
pub fn radial_roots<T: Real>(
    order: T,
    ratio: T,
    wanted: usize,
    config: &ModeSolverConfig<T>,
) -> Result<Vec<T>> {
    let step = config.scan_step;
    let start = (order - step).max(step);
    let mut roots = Vec::with_capacity(wanted);
    let mut a = start;
    let (mut da, _) = characteristic(order, ratio, a)?;
    let mut i = 1usize;
    while roots.len() < wanted {
        let b = start + count::<T>(i) * step;
        if b > config.x_ceiling {
            break;
        }
        let (db, _) = characteristic(order, ratio, b)?;
        if !db.is_finite() {
            return Err(Error::Convergence {
                method: "mode scan",
                detail: format!("characteristic function not finite at x = {b} (v = {order})"),
            });
        }
        if da == T::zero() {
            roots.push(a);
        } else if da * db < T::zero() {
            roots.push(refine_root(order, ratio, a, b, da, config)?);
        }
        a = b;
        da = db;
        i += 1;
    }
    if roots.len() < wanted {
        return Err(Error::MissingRoots {
            n: 0,
            order: order.to_f64().unwrap_or(f64::NAN),
            found: roots.len(),
            wanted,
            ceiling: config.x_ceiling.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(roots)
}

fn refine_root<T: Real>(
    order: T,
    ratio: T,
    mut lo: T,
    mut hi: T,
    mut dlo: T,
    config: &ModeSolverConfig<T>,
) -> Result<T> {
    let half = lit::<T>(0.5);
    let width_tol = config.relative_width.max(T::epsilon() * lit(4.0));
    let mut dhi = characteristic(order, ratio, hi)?.0;
    for _ in 0..400 {
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let dmid = characteristic(order, ratio, mid)?.0;
        if dmid == T::zero() {
            lo = mid;
            hi = mid;
            dlo = dmid;
            dhi = dmid;
            break;
        }
        if dlo * dmid < T::zero() {
            hi = mid;
            dhi = dmid;
        } else {
            lo = mid;
            dlo = dmid;
        }
    }
    let root = if dlo.abs() <= dhi.abs() { lo } else { hi };
    if hi - lo > width_tol * root {
        return Err(Error::Convergence {
            method: "mode root refinement",
            detail: format!("bracket [{lo}, {hi}] did not shrink below relative width {width_tol}"),
        });
    }
    let (res, scale) = characteristic(order, ratio, root)?;
    if res.abs() > residual_tolerance::<T>() * scale {
        return Err(Error::Convergence {
            method: "mode root refinement",
            detail: format!(
                "residual {res} exceeds tolerance at x = {root} (v = {order}, scale {scale})"
            ),
        });
    }
    Ok(root)
}

/// Radial factor `R(rho)` and `dR/drho` of a mode.
#[derive(Debug, Clone, Copy)]
pub struct RadialFactor<T> {
    order: T,
    k: T,
    inner_jp: T,
    inner_yp: T,
}

impl<T: Real> RadialFactor<T> {
    pub fn new(geom: &SectorGeometry<T>, mode: &Mode<T>) -> Result<Self> {
        let k = mode.x / geom.outer_radius;
        let inner = bessel_jy_unchecked(mode.order, k * geom.inner_radius)?;
        Ok(RadialFactor {
            order: mode.order,
            k,
            inner_jp: inner.jp,
            inner_yp: inner.yp,
        })
    }

    pub fn value(&self, rho: T) -> Result<T> {
        let b = bessel_jy_unchecked(self.order, self.k * rho)?;
        Ok(b.j * self.inner_yp - self.inner_jp * b.y)
    }

    pub fn derivative(&self, rho: T) -> Result<T> {
        let b = bessel_jy_unchecked(self.order, self.k * rho)?;
        Ok(self.k * (b.jp * self.inner_yp - self.inner_jp * b.yp))
    }

    /// Magnitude scale `k (|Y'_v(k r_i)| + |J'_v(k r_i)|)` of the derivative.
    pub fn derivative_scale(&self) -> T {
        self.k * (self.inner_yp.abs() + self.inner_jp.abs())
    }

    /// `int R(rho)^2 rho drho` over `[r_i, r_e]` from the Lommel integral
    /// `[rho^2/2 (R'^2/k^2 + (1 - v^2/(k rho)^2) R^2)]`.
    pub fn radial_norm(&self, geom: &SectorGeometry<T>) -> Result<T> {
        let half = lit::<T>(0.5);
        let k2 = self.k * self.k;
        let v2 = self.order * self.order;
        let at = |rho: T| -> Result<T> {
            let r = self.value(rho)?;
            let d = self.derivative(rho)?;
            Ok(half * (rho * rho * d * d / k2 + (rho * rho - v2 / k2) * r * r))
        };
        Ok(at(geom.outer_radius)? - at(geom.inner_radius)?)
    }

    fn at(&self, rho: T, phi: T) -> Result<T> {
        Ok(self.value(rho)? * (self.order * phi).cos())
    }
}

/// `int int psi^2 rho drho dphi` over the sector.
pub fn mode_norm<T: Real>(geom: &SectorGeometry<T>, mode: &Mode<T>) -> Result<T> {
    let radial = RadialFactor::new(geom, mode)?.radial_norm(geom)?;
    let angular = if mode.n == 0 {
        geom.sector_angle
    } else {
        geom.sector_angle / lit(2.0)
    };
    Ok(radial * angular)
}

/// Unnormalized eigenfunction `psi(rho, phi)` at a sector-local point.
pub fn eigenfunction<T: Real>(
    geom: &SectorGeometry<T>,
    mode: &Mode<T>,
    rho: T,
    phi: T,
) -> Result<T> {
    if !geom.contains(rho, phi) {
        return Err(Error::Domain {
            func: "eigenfunction",
            detail: format!("point ({rho}, {phi}) lies outside the sector"),
        });
    }
    RadialFactor::new(geom, mode)?.at(rho, phi)
}

#[derive(Debug, Clone)]
struct FieldTerm<T> {
    radial: RadialFactor<T>,
    coefficient: Complex<T>,
}

/// Interior field `E_z(rho, phi)` of a sector driven by a unit point
/// current at the feed.
///
/// Each mode contributes `j w mu0 psi(r) psi(r') / (N (k_eff^2 - k_mv^2))`
/// with `k_eff^2 = k0^2 eps_r (1 - j (tan_delta + 1/Q))` and `N` the mode
/// norm, so modes enter with the weights of the cavity Green's function
/// whatever the scale of the unnormalized `psi`.
#[derive(Debug, Clone)]
pub struct DrivenField<T> {
    geometry: SectorGeometry<T>,
    feed: FeedPoint<T>,
    frequency: T,
    terms: Vec<FieldTerm<T>>,
}

impl<T: Real> DrivenField<T> {
    pub fn from_modes(
        geom: &SectorGeometry<T>,
        feed: FeedPoint<T>,
        frequency: T,
        q_factor: T,
        modes: &[Mode<T>],
        effective_radius: T,
    ) -> Result<Self> {
        geom.validate()?;
        if !(frequency > T::zero()) || !frequency.is_finite() {
            return Err(invalid(
                "frequency",
                format!("must be positive, got {frequency}"),
            ));
        }
        if !(q_factor > T::zero()) || !q_factor.is_finite() {
            return Err(invalid(
                "q_factor",
                format!("must be positive, got {q_factor}"),
            ));
        }
        FeedPoint::new(geom, feed.rho, feed.phi)?;
        let omega = T::TAU() * frequency;
        let k0 = omega / lit(SPEED_OF_LIGHT);
        let loss = geom.loss_tangent + T::one() / q_factor;
        let k_eff2 = Complex::new(k0 * k0 * geom.eps_r, -k0 * k0 * geom.eps_r * loss);
        let jwmu = Complex::new(T::zero(), omega * lit(MU_0));
        let mut terms = Vec::with_capacity(modes.len());
        for mode in modes {
            let radial = RadialFactor::new(geom, mode)?;
            let at_feed = radial.at(feed.rho, feed.phi)?;
            let k_mv = mode.x / effective_radius;
            let norm = mode_norm(geom, mode)?;
            let coefficient = jwmu * (at_feed / norm) / (k_eff2 - k_mv * k_mv);
            terms.push(FieldTerm {
                radial,
                coefficient,
            });
        }
        Ok(DrivenField {
            geometry: *geom,
            feed,
            frequency,
            terms,
        })
    }

    pub fn geometry(&self) -> &SectorGeometry<T> {
        &self.geometry
    }

    pub fn feed(&self) -> FeedPoint<T> {
        self.feed
    }

    pub fn frequency(&self) -> T {
        self.frequency
    }

    /// Per-mode complex weights multiplying `psi(rho, phi)`.
    pub fn mode_coefficients(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        self.terms.iter().map(|t| t.coefficient)
    }

    /// `E_z` at a sector-local point.
    pub fn eval(&self, rho: T, phi: T) -> Result<Complex<T>> {
        if !self.geometry.contains(rho, phi) {
            return Err(Error::Domain {
                func: "driven_field",
                detail: format!("point ({rho}, {phi}) lies outside the sector"),
            });
        }
        let mut sum = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            if t.coefficient.re == T::zero() && t.coefficient.im == T::zero() {
                continue;
            }
            sum = sum + t.coefficient * t.radial.at(rho, phi)?;
        }
        Ok(sum)
    }
}

/// Solves the modes inside `(n_max, m_max)` and builds the driven field.
pub fn driven_field<T: Real>(
    geom: &SectorGeometry<T>,
    feed: FeedPoint<T>,
    frequency: T,
    truncation: (usize, usize),
    q_factor: T,
    config: &ModeSolverConfig<T>,
) -> Result<DrivenField<T>> {
    let modes = solve_modes(geom, truncation.0, truncation.1, config)?;
    DrivenField::from_modes(
        geom,
        feed,
        frequency,
        q_factor,
        &modes,
        config.effective_radius(geom),
    )
}
