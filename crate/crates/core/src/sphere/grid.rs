use super::point::SpherePoint;
use crate::quadrature::GaussRule;
use std::f64::consts::TAU;

/// Product quadrature on the sphere: Gauss–Legendre in cos θ times the uniform rule in φ.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
    n_theta: usize,
    n_phi: usize,
    ring_weights: Vec<f64>,
}

/// Grid with L+1 latitude rings and 2L+2 longitudes, exact to degree 2L+1.
pub fn make_grid(l: usize) -> SphereGrid {
    let l = l.max(1);
    let n_theta = l + 1;
    let n_phi = 2 * l + 2;
    let gl = GaussRule::legendre(n_theta);
    let dphi = TAU / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    let mut ring_weights = Vec::with_capacity(n_theta);
    // rings ordered from north to south
    for j in (0..n_theta).rev() {
        let theta = gl.nodes[j].clamp(-1.0, 1.0).acos();
        let w = gl.weights[j] * dphi;
        ring_weights.push(w);
        for k in 0..n_phi {
            nodes.push(SpherePoint::from_angles(theta, k as f64 * dphi).expect("interior node"));
            weights.push(w);
        }
    }
    SphereGrid {
        nodes,
        weights,
        degree: 2 * l + 1,
        n_theta,
        n_phi,
        ring_weights,
    }
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub(crate) fn ring_weight(&self, j: usize) -> f64 {
        self.ring_weights[j]
    }

    /// Largest vector-harmonic degree whose products the grid integrates exactly.
    pub fn max_resolved_degree(&self) -> usize {
        (self.degree.saturating_sub(2)) / 2
    }

    /// Σ_i w_i f_i.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
