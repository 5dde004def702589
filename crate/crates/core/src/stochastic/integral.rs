use super::fbm::{fbm_covariance, FbmPath};
use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Values an fBm path can take.
pub trait PathValue:
    Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
}

impl PathValue for f64 {}
impl PathValue for Complex64 {}

/// Riemann–Stieltjes weights of a kernel on a fixed mesh, stored in summation-by-parts form:
/// Σ_k g_k (B_{k+1} - B_k) = Σ_{k≥1} c_k B_k (B_0 = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct RsWeights {
    coeffs: Vec<f64>,
}

impl RsWeights {
    /// Left-point node values g_0, ..., g_{n-1}.
    pub fn from_node_values(g: &[f64]) -> Self {
        let n = g.len();
        let mut coeffs = vec![0.0; n + 1];
        for k in 1..n {
            coeffs[k] = g[k - 1] - g[k];
        }
        coeffs[n] = g[n - 1];
        RsWeights { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The sum against a path on the same mesh. Requires values[0] = 0.
    pub fn apply<T: PathValue>(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.coeffs.len());
        let mut acc = T::default();
        for (c, v) in self.coeffs.iter().zip(values).skip(1) {
            if *c != 0.0 {
                acc = acc + *v * *c;
            }
        }
        acc
    }

    /// Exact variance of the discrete sum against unit-variance fBm on `times`:
    /// Σ_jk c_j c_k R(t_j, t_k).
    pub fn variance(&self, times: &[f64], hurst: f64) -> f64 {
        debug_assert_eq!(times.len(), self.coeffs.len());
        let idx: Vec<usize> = (1..self.coeffs.len())
            .filter(|&k| self.coeffs[k] != 0.0)
            .collect();
        let mut acc = 0.0;
        for (a, &j) in idx.iter().enumerate() {
            let mut row = 0.5 * self.coeffs[j] * fbm_covariance(hurst, 1.0, times[j], times[j]);
            for &k in &idx[a + 1..] {
                row += self.coeffs[k] * fbm_covariance(hurst, 1.0, times[j], times[k]);
            }
            acc += 2.0 * self.coeffs[j] * row;
        }
        acc
    }
}

/// Where each cell's kernel value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RsRule {
    /// g at the left end of the cell.
    #[default]
    LeftPoint,
    /// The mean of g over the cell (8-point Gauss–Legendre); second-order accurate in the
    /// cell width, which matters for fast-decaying kernels.
    CellAverage,
}

/// Left-point weights of g on `times`. Where g is infinite at a mesh start of 0 (the
/// s^{κ-1} singularity), the first cell uses the cell average of g instead.
pub fn rs_weights<K: Kernel + ?Sized>(g: &K, times: &[f64]) -> Result<RsWeights> {
    rs_weights_with(g, times, RsRule::LeftPoint)
}

pub fn rs_weights_with<K: Kernel + ?Sized>(
    g: &K,
    times: &[f64],
    rule: RsRule,
) -> Result<RsWeights> {
    if times.len() < 2 {
        return Err(Error::Domain("mesh needs at least two points".into()));
    }
    let n = times.len() - 1;
    let gl = GaussRule::legendre(8);
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let s = times[k];
        let v = g.eval(s);
        if k == 0 && s == 0.0 && v.is_infinite() {
            vals.push(first_cell_mean(g, times[1])?);
            continue;
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteKernel { s });
        }
        match rule {
            RsRule::LeftPoint => vals.push(v),
            RsRule::CellAverage => {
                let (a, b) = (s, times[k + 1]);
                let mut acc = 0.0;
                for (x, w) in gl.mapped(a, b) {
                    let gx = g.eval(x);
                    if !gx.is_finite() {
                        return Err(Error::NonFiniteKernel { s: x });
                    }
                    acc += w * gx;
                }
                vals.push(acc / (b - a));
            }
        }
    }
    Ok(RsWeights::from_node_values(&vals))
}

/// (1/h) ∫_0^h g, integrating h(w) after w = s^κ.
fn first_cell_mean<K: Kernel + ?Sized>(g: &K, h: f64) -> Result<f64> {
    let kappa = g.grading();
    let top = h.powf(kappa);
    let rule = GaussRule::legendre(16);
    let mut acc = 0.0;
    for (w, wt) in rule.mapped(0.0, top) {
        let s = w.powf(1.0 / kappa);
        let r = g.regular_part(s);
        if !r.is_finite() {
            return Err(Error::NonFiniteKernel { s });
        }
        acc += wt * r;
    }
    Ok(acc / (kappa * h))
}

/// Riemann–Stieltjes integral ∫ g dB over the path's mesh; g ≡ 1 yields the endpoint exactly.
pub fn rs_integral<K: Kernel + ?Sized, T: PathValue>(g: &K, path: &FbmPath<T>) -> Result<T> {
    Ok(rs_weights(g, &path.times)?.apply(&path.values))
}

/// Result of a self-converged variance quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub value: f64,
    /// Value at the previous (halved) order.
    pub previous: f64,
    pub rel_change: f64,
    /// Gauss points per panel of the accepted result.
    pub order: usize,
}

const SELF_CONV_TOL: f64 = 1e-9;
const MAX_LEVELS: usize = 1200;

/// E|∫_{t1}^{t2} g dB^H|² for unit-variance fBm: H(2H-1)∬ g(u)g(v)|u-v|^{2H-2}, or ∫ g² at H = 1/2.
pub fn integral_variance<K: Kernel + ?Sized>(g: &K, t1: f64, t2: f64, hurst: f64) -> Result<f64> {
    integral_variance_detailed(g, t1, t2, hurst).map(|e| e.value)
}

/// As [`integral_variance`], also reporting the self-convergence evidence.
pub fn integral_variance_detailed<K: Kernel + ?Sized>(
    g: &K,
    t1: f64,
    t2: f64,
    hurst: f64,
) -> Result<VarianceEstimate> {
    if !(0.5..1.0).contains(&hurst) {
        return Err(Error::invalid("0.5 <= hurst < 1"));
    }
    if !(t1 >= 0.0) || !(t2 >= t1) || !t2.is_finite() {
        return Err(Error::Domain(format!(
            "need 0 <= t1 <= t2, got [{t1}, {t2}]"
        )));
    }
    if t1 == t2 {
        return Ok(VarianceEstimate {
            value: 0.0,
            previous: 0.0,
            rel_change: 0.0,
            order: 0,
        });
    }
    let kappa = g.grading();
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::invalid("kernel grading in (0, 1]"));
    }
    if t1 == 0.0 && kappa - 1.0 + hurst <= 0.0 {
        return Err(Error::Divergent(format!(
            "kernel singularity s^{} is not square integrable against fBm with H = {hurst}",
            kappa - 1.0
        )));
    }
    let mut previous = f64::NAN;
    let mut order = 8;
    while order <= 64 {
        let value = if hurst == 0.5 {
            brownian_variance(g, t1, t2, order)?
        } else {
            fractional_variance(g, t1, t2, hurst, order)?
        };
        let rel_change = (value - previous).abs() / value.abs().max(f64::MIN_POSITIVE);
        if rel_change < SELF_CONV_TOL || (value == 0.0 && previous == 0.0) {
            return Ok(VarianceEstimate {
                value,
                previous,
                rel_change,
                order,
            });
        }
        previous = value;
        order *= 2;
    }
    Err(Error::Quadrature(format!(
        "variance integral on [{t1}, {t2}] with H = {hurst} did not self-converge"
    )))
}

/// Panel edges on [0, len] refined geometrically (ratio 1/2) towards 0.
fn graded_edges(len: f64, levels: usize) -> Vec<f64> {
    let mut edges = Vec::with_capacity(levels + 2);
    edges.push(0.0);
    for k in (0..=levels).rev() {
        edges.push(len * 0.5f64.powi(k as i32));
    }
    edges[levels + 1] = len;
    edges
}

/// Levels needed on [a, a + len] so the panel touching `a` carries relative weight below
/// ~1e-15, for an integrand behaving like (x - a)^{p-1} near a (`Some(p)`, p > 0), or smooth
/// there (`None`). A kernel singular at 0 is only smooth at scale a, which costs
/// log2(len/a) more levels.
fn levels_for(a: f64, len: f64, p: Option<f64>) -> usize {
    let mut base = p.map_or(4.0, |p| 50.0 / p);
    if a > 0.0 {
        base += (len / a).log2().max(0.0);
    }
    (base.ceil() as usize).clamp(4, MAX_LEVELS)
}

fn checked<K: Kernel + ?Sized>(g: &K, s: f64) -> Result<f64> {
    let v = g.eval(s);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteKernel { s })
    }
}

fn panel_sum(
    rule: &GaussRule,
    edges: &[f64],
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let mut acc = 0.0;
    for e in edges.windows(2) {
        for (x, w) in rule.mapped(e[0], e[1]) {
            acc += w * f(x)?;
        }
    }
    Ok(acc)
}

fn brownian_variance<K: Kernel + ?Sized>(g: &K, t1: f64, t2: f64, order: usize) -> Result<f64> {
    let rule = GaussRule::legendre(order);
    let len = t2 - t1;
    let p = (t1 == 0.0).then_some(2.0 * g.grading() - 1.0);
    panel_sum(&rule, &graded_edges(len, levels_for(t1, len, p)), |r| {
        let v = checked(g, t1 + r)?;
        Ok(v * v)
    })
}

// Works in offsets r = u - t1, q = v - t1 so that u - v stays exact on panels far below
// the scale of t1.
fn fractional_variance<K: Kernel + ?Sized>(
    g: &K,
    t1: f64,
    t2: f64,
    hurst: f64,
    order: usize,
) -> Result<f64> {
    let kappa = g.grading();
    let e = 2.0 * hurst - 2.0;
    let gl = GaussRule::legendre(order);
    let gj = GaussRule::jacobi(order, e, 0.0);
    let len = t2 - t1;
    let outer_p = if t1 == 0.0 {
        2.0 * kappa + 2.0 * hurst - 2.0
    } else {
        2.0 * hurst
    };
    let outer = graded_edges(len, levels_for(t1, len, Some(outer_p)));
    let inner_p = (t1 == 0.0).then_some(kappa);
    let total = panel_sum(&gl, &outer, |r| {
        let gu = checked(g, t1 + r)?;
        // on [r/2, r], q = 3r/4 + (r/4) x gives (r - q)^{2H-2} = (r/4)^{2H-2} (1 - x)^{2H-2}
        let half = 0.25 * r;
        let centre = 0.75 * r;
        let mut right = 0.0;
        for (x, w) in gj.nodes.iter().zip(&gj.weights) {
            right += w * checked(g, t1 + centre + half * x)?;
        }
        right *= half.powf(e + 1.0);
        let mid = 0.5 * r;
        let left_edges = graded_edges(mid, levels_for(t1, mid, inner_p));
        let left = panel_sum(&gl, &left_edges, |q| {
            Ok(checked(g, t1 + q)? * (r - q).powf(e))
        })?;
        Ok(gu * (left + right))
    })?;
    Ok(2.0 * hurst * (2.0 * hurst - 1.0) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::fbm::{graded_mesh, uniform_mesh, FbmGenerator};
    use crate::stochastic::kernel::MlKernel;
    use crate::stochastic::rng::RngStream;

    #[test]
    fn constant_kernel_returns_endpoint_exactly() {
        let gen = FbmGenerator::new(0.7, &graded_mesh(1.5, 64, 0.6)).unwrap();
        let mut rng = RngStream::new(5, 1).rng();
        for _ in 0..20 {
            let p = gen.sample_complex(2.0, &mut rng);
            let v = rs_integral(&|_s: f64| 1.0, &p).unwrap();
            assert_eq!(v, *p.values.last().unwrap());
        }
    }

    #[test]
    fn weights_match_left_point_sum() {
        let times = uniform_mesh(1.0, 10);
        let g = |s: f64| (-s).exp();
        let w = rs_weights(&g, &times).unwrap();
        let vals: Vec<f64> = times.iter().map(|t| t * t).collect();
        let direct: f64 = (0..10).map(|k| g(times[k]) * (vals[k + 1] - vals[k])).sum();
        assert!((w.apply(&vals) - direct).abs() < 1e-14);
    }

    #[test]
    fn singular_first_cell_uses_cell_mean() {
        let k = MlKernel::new(0.5, 0.0);
        let times = graded_mesh(1.0, 4, 0.5);
        let w = rs_weights(&k, &times).unwrap();
        // g = s^{-1/2}/Γ(1/2): mean over [0, h] is 2 h^{-1/2}/√π
        let h = times[1];
        let mean = 2.0 / (h.sqrt() * std::f64::consts::PI.sqrt());
        let g1 = k.eval(h);
        assert!((w.coeffs[1] - (mean - g1)).abs() < 1e-12 * mean);
    }

    #[test]
    fn discrete_variance_matches_constant_kernel() {
        let times = graded_mesh(2.0, 20, 0.7);
        let w = rs_weights(&|_s: f64| 1.0, &times).unwrap();
        assert!((w.variance(&times, 0.8) - 2f64.powf(1.6)).abs() < 1e-12);
        let g = |s: f64| (-s).exp();
        let times = uniform_mesh(1.0, 8);
        let w = rs_weights(&g, &times).unwrap();
        let brute: f64 = (0..8)
            .map(|k| g(times[k]).powi(2) * (times[k + 1] - times[k]))
            .sum();
        assert!((w.variance(&times, 0.5) - brute).abs() < 1e-13);
    }

    #[test]
    fn non_finite_interior_value_is_an_error() {
        let g = |s: f64| if s > 0.4 && s < 0.6 { f64::NAN } else { 1.0 };
        assert!(matches!(
            rs_weights(&g, &uniform_mesh(1.0, 10)),
            Err(Error::NonFiniteKernel { .. })
        ));
    }

    #[test]
    fn variance_of_constant_kernel() {
        for &h in &[0.5, 0.6, 0.75, 0.9] {
            let v = integral_variance(&|_s: f64| 1.0, 0.0, 2.0, h).unwrap();
            let want = 2f64.powf(2.0 * h);
            assert!((v - want).abs() < 1e-10 * want, "H={h}: {v} vs {want}");
            // increments: Var(B(t2) - B(t1)) = (t2 - t1)^{2H}
            let v = integral_variance(&|_s: f64| 1.0, 0.7, 1.2, h).unwrap();
            assert!((v - 0.5f64.powf(2.0 * h)).abs() < 1e-10);
        }
    }

    #[test]
    fn ito_isometry_closed_form() {
        let v = integral_variance(&|s: f64| (-s).exp(), 0.0, 1.0, 0.5).unwrap();
        let want = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((v - want).abs() < 1e-13);
    }

    #[test]
    fn fractional_variance_polynomial_kernel() {
        // ∫ u dB = B(1) - ∫ B(u) du, so the variance is 1 - 2·(1/2) + 1/(2H+2)
        let h = 0.75_f64;
        let v = integral_variance(&|s: f64| s, 0.0, 1.0, h).unwrap();
        let want = 1.0 / (2.0 * h + 2.0);
        assert!((v - want).abs() < 1e-10, "{v} vs {want}");
    }

    #[test]
    fn divergent_and_invalid_inputs() {
        let k = MlKernel::new(0.3, 1.0);
        assert!(matches!(
            integral_variance(&k, 0.0, 1.0, 0.6),
            Err(Error::Divergent(_))
        ));
        assert!(integral_variance(&k, 0.5, 1.0, 0.6).is_ok());
        assert!(integral_variance(&k, 1.0, 0.5, 0.6).is_err());
        assert!(integral_variance(&k, 0.0, 1.0, 1.0).is_err());
        assert_eq!(integral_variance(&k, 0.5, 0.5, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn singular_kernels_self_converge() {
        for &(beta, h) in &[(0.8, 0.7), (0.6, 0.9), (0.6, 0.5)] {
            let k = MlKernel::new(beta, 3.0);
            let est = integral_variance_detailed(&k, 0.0, 1.0, h).unwrap();
            assert!(
                est.value > 0.0 && est.rel_change < 1e-9,
                "{beta} {h}: {est:?}"
            );
        }
    }
}
