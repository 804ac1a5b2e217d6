//! Far-field patterns of the sector cavity.
//!
//! The aperture is replaced by magnetic line currents
//! `M = -2 t E_z (n x z)` along the four walls, radiating over an infinite
//! ground plane. With `L = sum M exp(j k r_hat . r')` the far field is
//! `E_theta = -j k L_phi / (4 pi)`, `E_phi = j k L_theta / (4 pi)`
//! (the `exp(-j k r) / r` factor is dropped).

mod io;
mod pattern;

pub use io::{load_pattern, parse_csv, save_pattern, to_csv_string, HEADER};
pub use pattern::{rotate_pattern, FieldSample, Normalization, PatternGrid};

use num_complex::Complex;
use rayon::prelude::*;

use crate::cavity::DrivenField;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{count, lit, Real, SPEED_OF_LIGHT};

pub(crate) use pattern::full_sphere_shape;

/// Smallest node count accepted on any wall.
pub const MIN_SEGMENT_NODES: usize = 8;
pub const DEFAULT_ARC_NODES: usize = 64;
pub const DEFAULT_EDGE_NODES: usize = 32;
/// Peak-direction directivity change (dB) accepted between two refinements.
pub const CONVERGENCE_DB: f64 = 0.05;
/// Refinements tried before giving up.
pub const MAX_DOUBLINGS: usize = 5;

/// Metadata value recorded on synthesized patterns.
pub const GROUND_MODEL: &str = "infinite-ground idealization";

/// One wall of the sector, in contour order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    /// Radial edge at local `phi = 0`, walked from `r_i` to `r_e`.
    StartEdge,
    /// Arc at `r_e`, walked from `0` to `alpha`.
    OuterArc,
    /// Radial edge at local `phi = alpha`, walked from `r_e` to `r_i`.
    EndEdge,
    /// Arc at `r_i`, walked from `alpha` back to `0`.
    InnerArc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub wall: Wall,
    pub nodes: usize,
}

/// Closed contour around the sector with a Gauss-Legendre rule per wall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AperturePerimeter {
    segments: [Segment; 4],
}

impl Default for AperturePerimeter {
    fn default() -> Self {
        AperturePerimeter::new(DEFAULT_ARC_NODES, DEFAULT_EDGE_NODES)
            .expect("default node counts are valid")
    }
}

impl AperturePerimeter {
    pub fn new(arc_nodes: usize, edge_nodes: usize) -> Result<Self> {
        for (name, n) in [("arc", arc_nodes), ("edge", edge_nodes)] {
            if n < MIN_SEGMENT_NODES {
                return Err(Error::InvalidParameter {
                    field: "quadrature",
                    detail: format!("{name} node count {n} is below {MIN_SEGMENT_NODES}"),
                });
            }
        }
        Ok(AperturePerimeter {
            segments: [
                Segment {
                    wall: Wall::StartEdge,
                    nodes: edge_nodes,
                },
                Segment {
                    wall: Wall::OuterArc,
                    nodes: arc_nodes,
                },
                Segment {
                    wall: Wall::EndEdge,
                    nodes: edge_nodes,
                },
                Segment {
                    wall: Wall::InnerArc,
                    nodes: arc_nodes,
                },
            ],
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn arc_nodes(&self) -> usize {
        self.segments[1].nodes
    }

    pub fn edge_nodes(&self) -> usize {
        self.segments[0].nodes
    }

    /// Same contour with every node count doubled.
    pub fn doubled(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.nodes *= 2;
        }
        out
    }
}

/// Weighted magnetic line-current sample at a global point `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSource<T> {
    pub x: T,
    pub y: T,
    pub mx: Complex<T>,
    pub my: Complex<T>,
}

/// Quadrature samples of the equivalent magnetic current on the walls.
pub fn line_sources<T: Real>(
    field: &DrivenField<T>,
    perimeter: &AperturePerimeter,
) -> Result<Vec<LineSource<T>>> {
    let g = field.geometry();
    let (ri, re, alpha) = (g.inner_radius, g.outer_radius, g.sector_angle);
    let two_t = lit::<T>(2.0) * g.thickness;
    let mut out = Vec::new();
    for seg in perimeter.segments() {
        let rule = GaussLegendre::<T>::new(seg.nodes);
        match seg.wall {
            Wall::StartEdge | Wall::EndEdge => {
                let local = if seg.wall == Wall::StartEdge {
                    T::zero()
                } else {
                    alpha
                };
                let ga = g.global_angle(local);
                let (s, c) = ga.sin_cos();
                // outward normal is -phi_hat at the start edge, +phi_hat at the end
                let sign = if seg.wall == Wall::StartEdge {
                    T::one()
                } else {
                    -T::one()
                };
                let (nx, ny) = (sign * s, -sign * c);
                for (rho, w) in rule.on_interval(ri, re) {
                    let ez = field.eval(rho, local)?;
                    let amp = ez * (-two_t * w);
                    out.push(LineSource {
                        x: rho * c,
                        y: rho * s,
                        mx: amp * ny,
                        my: amp * (-nx),
                    });
                }
            }
            Wall::OuterArc | Wall::InnerArc => {
                let (rho, sign) = if seg.wall == Wall::OuterArc {
                    (re, T::one())
                } else {
                    (ri, -T::one())
                };
                for (local, w) in rule.on_interval(T::zero(), alpha) {
                    let (s, c) = g.global_angle(local).sin_cos();
                    let (nx, ny) = (sign * c, sign * s);
                    let ez = field.eval(rho, local)?;
                    let amp = ez * (-two_t * w * rho);
                    out.push(LineSource {
                        x: rho * c,
                        y: rho * s,
                        mx: amp * ny,
                        my: amp * (-nx),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Far field of a set of line sources on a full-sphere grid.
pub fn radiate<T: Real>(
    sources: &[LineSource<T>],
    frequency: T,
    theta_step: T,
    phi_step: T,
) -> Result<PatternGrid<T>> {
    let (n_theta, n_phi) = full_sphere_shape(theta_step, phi_step)?;
    let k = T::TAU() * frequency / lit(SPEED_OF_LIGHT);
    let pre = Complex::new(T::zero(), k / (lit::<T>(4.0) * T::PI()));
    let phis: Vec<(T, T)> = (0..n_phi)
        .map(|j| (count::<T>(j) * phi_step).to_radians().sin_cos())
        .collect();
    let rows: Vec<Vec<FieldSample<T>>> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let (st, ct) = (count::<T>(i) * theta_step).to_radians().sin_cos();
            phis.iter()
                .map(|&(sp, cp)| {
                    let zero = Complex::new(T::zero(), T::zero());
                    let (mut lx, mut ly) = (zero, zero);
                    for s in sources {
                        let ph = k * st * (s.x * cp + s.y * sp);
                        let e = Complex::new(ph.cos(), ph.sin());
                        lx = lx + s.mx * e;
                        ly = ly + s.my * e;
                    }
                    let l_theta = (lx * cp + ly * sp) * ct;
                    let l_phi = ly * cp - lx * sp;
                    FieldSample::new(-pre * l_phi, pre * l_theta)
                })
                .collect()
        })
        .collect();
    let samples = rows.into_iter().flatten().collect();
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

/// Embedded pattern of one driven sector, refined until the peak
/// directivity settles to within [`CONVERGENCE_DB`].
pub fn embedded_pattern<T: Real>(
    field: &DrivenField<T>,
    grid: (T, T),
    perimeter: &AperturePerimeter,
) -> Result<PatternGrid<T>> {
    let (theta_step, phi_step) = grid;
    full_sphere_shape(theta_step, phi_step)?;
    let f = field.frequency();
    let mut quad = perimeter.clone();
    let mut current = radiate(&line_sources(field, &quad)?, f, theta_step, phi_step)?;
    let mut last = peak_directivity_db(&current)?;
    let mut change = T::infinity();
    for _ in 0..MAX_DOUBLINGS {
        let next_quad = quad.doubled();
        let next = radiate(&line_sources(field, &next_quad)?, f, theta_step, phi_step)?;
        let d = peak_directivity_db(&next)?;
        change = (d - last).abs();
        quad = next_quad;
        current = next;
        last = d;
        if change <= lit(CONVERGENCE_DB) {
            return Ok(current
                .with_metadata("ground_model", GROUND_MODEL)
                .with_metadata("quadrature_arc_nodes", quad.arc_nodes().to_string())
                .with_metadata("quadrature_edge_nodes", quad.edge_nodes().to_string()));
        }
    }
    Err(Error::Convergence {
        method: "quadrature doubling",
        detail: format!(
            "peak directivity still moved {change} dB after {MAX_DOUBLINGS} doublings \
             ({} arc / {} edge nodes)",
            quad.arc_nodes(),
            quad.edge_nodes()
        ),
    })
}

fn peak_directivity_db<T: Real>(p: &PatternGrid<T>) -> Result<T> {
    let (i, j) = crate::metrics::argmax(p, None)?;
    crate::metrics::directivity(p, (p.theta_deg(i), p.phi_deg(j)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perimeter_validation_and_doubling() {
        assert!(AperturePerimeter::new(7, 32).is_err());
        let p = AperturePerimeter::new(8, 8).unwrap().doubled();
        assert_eq!((p.arc_nodes(), p.edge_nodes()), (16, 16));
        let walls: Vec<Wall> = p.segments().iter().map(|s| s.wall).collect();
        assert_eq!(
            walls,
            [
                Wall::StartEdge,
                Wall::OuterArc,
                Wall::EndEdge,
                Wall::InnerArc
            ]
        );
    }

    #[test]
    fn single_source_is_a_magnetic_dipole() {
        // x-directed magnetic dipole at the origin: E_theta ~ sin(phi), E_phi ~ cos(theta) cos(phi)
        let src = [LineSource {
            x: 0.0,
            y: 0.0,
            mx: Complex::new(1.0, 0.0),
            my: Complex::new(0.0, 0.0),
        }];
        let p: PatternGrid<f64> = radiate(&src, 1e9, 30.0, 30.0).unwrap();
        let k = std::f64::consts::TAU * 1e9 / SPEED_OF_LIGHT;
        let c = k / (4.0 * std::f64::consts::PI);
        for i in 0..p.n_theta() {
            for j in 0..p.n_phi() {
                let (t, f) = (p.theta_deg(i).to_radians(), p.phi_deg(j).to_radians());
                let s = p.sample(i, j);
                assert!((s.e_theta - Complex::new(0.0, c * f.sin())).norm() < 1e-15);
                assert!((s.e_phi - Complex::new(0.0, c * t.cos() * f.cos())).norm() < 1e-15);
            }
        }
    }
}
