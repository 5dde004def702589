//! Gauss quadrature rules and graded composite rules.

use crate::specfun::gamma_pos;
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// A quadrature rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// n-point Gauss–Legendre rule, nodes in increasing order.
    pub fn legendre(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// n-point Gauss–Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Self {
        assert!(n > 0 && alpha > -1.0 && beta > -1.0);
        let ab = alpha + beta;
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let kf = k as f64;
            let diag = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            };
            jm[(k, k)] = diag;
            if k + 1 < n {
                let j = kf + 1.0;
                let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
                let s = 2.0 * j + ab;
                let den = s * s * (s + 1.0) * (s - 1.0);
                let off = (num / den).sqrt();
                jm[(k, k + 1)] = off;
                jm[(k + 1, k)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma_pos(alpha + 1.0) * gamma_pos(beta + 1.0)
            / gamma_pos(ab + 2.0);
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_a^b f for the Legendre weight (or the mapped weight for Jacobi rules).
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panels of [0, 1] refined geometrically towards 0: [0, r^K], [r^K, r^{K-1}], ..., [r, 1].
pub fn geometric_panels(levels: usize, ratio: f64) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = (0..=levels)
        .map(|k| ratio.powi((levels - k) as i32))
        .collect();
    edges.insert(0, 0.0);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Composite rule over panels; returns Σ_panels ∫ f.
pub fn integrate_panels(
    rule: &GaussRule,
    panels: &[(f64, f64)],
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    panels
        .iter()
        .map(|&(a, b)| rule.integrate(a, b, &mut f))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in 1..40 {
            let r = GaussRule::legendre(n);
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let got = r.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn jacobi_rule_integrates_weighted_monomials() {
        // ∫_{-1}^{1} (1+x)^c x^k dx against Legendre quadrature of a substituted integral
        let c = -0.6;
        let r = GaussRule::jacobi(12, 0.0, c);
        for k in 0..20 {
            let got: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * x.powi(k))
                .sum();
            // substitute 1 + x = 2 u^{1/(c+1)}
            let p = 1.0 / (c + 1.0);
            let gl = GaussRule::legendre(20);
            let exact = integrate_panels(&gl, &geometric_panels(30, 0.5), |u| {
                let x = 2.0 * u.powf(p) - 1.0;
                x.powi(k) * 2f64.powf(c + 1.0) * p
            });
            assert!((got - exact).abs() < 1e-12, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn geometric_panels_cover_unit_interval() {
        let p = geometric_panels(5, 0.5);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0].0, 0.0);
        assert_eq!(p[5].1, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }

    #[test]
    fn graded_panels_handle_endpoint_singularity() {
        let rule = GaussRule::legendre(10);
        let got = integrate_panels(&rule, &geometric_panels(90, 0.5), |x| x.powf(-0.5));
        assert!((got - 2.0).abs() < 1e-12);
    }
}
