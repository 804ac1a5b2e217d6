//! Gauss-Legendre rules used for the aperture line integrals.

use crate::scalar::{count, lit, Real};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are returned in ascending order and are exactly antisymmetric
/// (`x[i] == -x[n-1-i]`), which keeps mirror-symmetric integrands
/// symmetric after quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = count::<T>(n);
        let half = lit::<T>(0.5);
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let k = count::<T>(i) + lit(0.75);
            let mut z = (T::PI() * k / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z = z - dz;
                if dz.abs() <= T::epsilon() * lit(2.0) {
                    let (_, d) = legendre(n, z);
                    dp = d;
                    break;
                }
            }
            let w = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on_interval(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = lit::<T>(0.5);
        let mid = half * (a + b);
        let rad = half * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + rad * x, rad * w))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `P_n(z)` and `P'_n(z)` by the three-term recurrence.
fn legendre<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = z;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for j in 2..=n {
        let jf = count::<T>(j);
        let p2 = ((lit::<T>(2.0) * jf - T::one()) * z * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = count::<T>(n);
    let d = nf * (z * p1 - p0) / (z * z - T::one());
    (p1, d)
}
