use super::grid::SphereGrid;
use super::harmonics::AlfTable;
use super::point::SpherePoint;
use super::vsh::{local_vsh, to_ambient, vsh, CVec3, POLE_EPS};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Vector-harmonic family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Coefficients of y_ℓm.
    DivFree,
    /// Coefficients of z_ℓm.
    CurlFree,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::DivFree, Family::CurlFree];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::DivFree => "div_free",
            Family::CurlFree => "curl_free",
        }
    }
}

/// Expansion coefficients f̂_ℓm (div-free) and f̃_ℓm (curl-free) for 1 ≤ ℓ ≤ L, |m| ≤ ℓ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    l_max: usize,
    div_free: Vec<Complex64>,
    curl_free: Vec<Complex64>,
}

#[inline]
fn slot(ell: usize, m: i64) -> usize {
    (ell * ell - 1) + (m + ell as i64) as usize
}

impl SpectralCoefficients {
    pub fn zeros(l_max: usize) -> Result<Self> {
        if l_max == 0 {
            return Err(Error::Range("truncation degree must be at least 1".into()));
        }
        let n = (l_max + 1) * (l_max + 1) - 1;
        Ok(SpectralCoefficients {
            l_max,
            div_free: vec![Complex64::new(0.0, 0.0); n],
            curl_free: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Number of (ℓ, m) pairs per family.
    pub fn len(&self) -> usize {
        self.div_free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.div_free.is_empty()
    }

    fn check(&self, ell: usize, m: i64) -> Result<usize> {
        if ell == 0 || ell > self.l_max || m.unsigned_abs() as usize > ell {
            return Err(Error::Index { ell: ell as i64, m });
        }
        Ok(slot(ell, m))
    }

    pub fn get(&self, family: Family, ell: usize, m: i64) -> Result<Complex64> {
        let k = self.check(ell, m)?;
        Ok(self.family(family)[k])
    }

    pub fn set(&mut self, family: Family, ell: usize, m: i64, value: Complex64) -> Result<()> {
        let k = self.check(ell, m)?;
        self.family_mut(family)[k] = value;
        Ok(())
    }

    pub fn family(&self, family: Family) -> &[Complex64] {
        match family {
            Family::DivFree => &self.div_free,
            Family::CurlFree => &self.curl_free,
        }
    }

    pub fn family_mut(&mut self, family: Family) -> &mut [Complex64] {
        match family {
            Family::DivFree => &mut self.div_free,
            Family::CurlFree => &mut self.curl_free,
        }
    }

    /// (ℓ, m) pairs in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, i64)> {
        let l_max = self.l_max;
        (1..=l_max).flat_map(|ell| (-(ell as i64)..=ell as i64).map(move |m| (ell, m)))
    }

    /// Σ (|f̂_ℓm|² + |f̃_ℓm|²), the squared L² norm of the field.
    pub fn norm_sq(&self) -> f64 {
        self.div_free
            .iter()
            .chain(&self.curl_free)
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Applies `f(ℓ)` as a per-degree multiplier to both families.
    pub fn scale_by_degree(&mut self, mut f: impl FnMut(usize) -> f64) {
        for ell in 1..=self.l_max {
            let s = f(ell);
            let range = slot(ell, -(ell as i64))..=slot(ell, ell as i64);
            for c in &mut self.div_free[range.clone()] {
                *c *= s;
            }
            for c in &mut self.curl_free[range] {
                *c *= s;
            }
        }
    }

    /// Zeroes all degrees above `l_prime`.
    pub fn truncate(&self, l_prime: usize) -> Result<Self> {
        if l_prime == 0 || l_prime > self.l_max {
            return Err(Error::Range(format!(
                "truncation degree {l_prime} outside 1..={}",
                self.l_max
            )));
        }
        let mut out = self.clone();
        let cut = (l_prime + 1) * (l_prime + 1) - 1;
        for c in out.div_free[cut..]
            .iter_mut()
            .chain(out.curl_free[cut..].iter_mut())
        {
            *c = Complex64::new(0.0, 0.0);
        }
        Ok(out)
    }
}

/// Tangent vector field sampled at a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFieldSample {
    pub points: Vec<SpherePoint>,
    pub values: Vec<CVec3>,
    pub time: f64,
}

impl TangentFieldSample {
    /// Largest |x · f(x)| over the sample.
    pub fn max_normal_component(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, v)| {
                let x = p.vector();
                (v[0] * x[0] + v[1] * x[1] + v[2] * x[2]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Quadrature of |f|² when the points are the grid nodes.
    pub fn norm_sq_on(&self, grid: &SphereGrid) -> Result<f64> {
        check_on_grid(grid, self)?;
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_squared()).collect();
        Ok(grid.integrate(&sq))
    }
}

fn check_on_grid(grid: &SphereGrid, field: &TangentFieldSample) -> Result<()> {
    if field.points.len() != grid.len() || field.values.len() != grid.len() {
        return Err(Error::Domain(format!(
            "field has {} values but the grid has {} nodes",
            field.values.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Field value of the expansion at one point.
pub fn evaluate(coeffs: &SpectralCoefficients, point: &SpherePoint) -> Result<CVec3> {
    let l_max = coeffs.l_max();
    let sin_t = point.theta.sin();
    if sin_t < POLE_EPS {
        let mut acc = CVec3::zeros();
        for (ell, m) in coeffs.modes() {
            let a = coeffs.get(Family::DivFree, ell, m)?;
            let b = coeffs.get(Family::CurlFree, ell, m)?;
            if a == Complex64::new(0.0, 0.0) && b == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (y, z) = vsh(ell, m, point)?;
            acc += y * a + z * b;
        }
        return Ok(acc);
    }
    let table = AlfTable::for_point(l_max, point);
    let (et, ep) = point.frame();
    let (mut c_theta, mut c_phi) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let (div, curl) = (
        coeffs.family(Family::DivFree),
        coeffs.family(Family::CurlFree),
    );
    for m in -(l_max as i64)..=(l_max as i64) {
        let (mut t, mut p) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for ell in (m.unsigned_abs() as usize).max(1)..=l_max {
            let k = slot(ell, m);
            let v = local_vsh(&table, ell, m, sin_t);
            t += div[k] * v.y_theta + curl[k] * v.z_theta;
            p += div[k] * v.y_phi + curl[k] * v.z_phi;
        }
        let phase = Complex64::from_polar(1.0, m as f64 * point.phi);
        c_theta += t * phase;
        c_phi += p * phase;
    }
    Ok(to_ambient(&et, &ep, c_theta, c_phi))
}

/// Evaluates the expansion at the given points.
pub fn synthesize(
    coeffs: &SpectralCoefficients,
    points: &[SpherePoint],
    time: f64,
) -> Result<TangentFieldSample> {
    let values = points
        .par_iter()
        .map(|p| evaluate(coeffs, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(TangentFieldSample {
        points: points.to_vec(),
        values,
        time,
    })
}

/// Projects a field sampled on the grid nodes onto the harmonics up to degree `l_max`:
/// f̂_ℓm = Σ_i w_i f(x_i) · conj(y_ℓm(x_i)), and likewise with z_ℓm.
pub fn analyze(
    grid: &SphereGrid,
    field: &TangentFieldSample,
    l_max: usize,
) -> Result<SpectralCoefficients> {
    check_on_grid(grid, field)?;
    if grid.max_resolved_degree() < l_max {
        return Err(Error::DegreeMismatch {
            grid_degree: grid.degree,
            ell_max: l_max,
        });
    }
    let mut out = SpectralCoefficients::zeros(l_max)?;
    let n_phi = grid.n_phi();
    let lm = l_max as i64;
    let width = 2 * l_max + 1;
    let phases: Vec<Complex64> = (0..n_phi)
        .flat_map(|k| {
            let phi = grid.nodes[k].phi;
            (-lm..=lm).map(move |m| Complex64::from_polar(1.0, -(m as f64) * phi))
        })
        .collect();

    let rings: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..grid.n_theta())
        .into_par_iter()
        .map(|j| {
            let first = &grid.nodes[j * n_phi];
            let sin_t = first.theta.sin();
            let table = AlfTable::for_point(l_max, first);
            // azimuthal transforms of the local frame components
            let mut ft = vec![Complex64::new(0.0, 0.0); width];
            let mut fp = vec![Complex64::new(0.0, 0.0); width];
            for k in 0..n_phi {
                let p = &grid.nodes[j * n_phi + k];
                let (et, ep) = p.frame();
                let v = &field.values[j * n_phi + k];
                let vt = v[0] * et.x + v[1] * et.y + v[2] * et.z;
                let vp = v[0] * ep.x + v[1] * ep.y + v[2] * ep.z;
                for (mi, ph) in phases[k * width..(k + 1) * width].iter().enumerate() {
                    ft[mi] += vt * ph;
                    fp[mi] += vp * ph;
                }
            }
            let w = grid.ring_weight(j);
            let n = (l_max + 1) * (l_max + 1) - 1;
            let mut div = vec![Complex64::new(0.0, 0.0); n];
            let mut curl = vec![Complex64::new(0.0, 0.0); n];
            for ell in 1..=l_max {
                for m in -(ell as i64)..=(ell as i64) {
                    let v = local_vsh(&table, ell, m, sin_t);
                    let mi = (m + lm) as usize;
                    let k = slot(ell, m);
                    div[k] = (ft[mi] * v.y_theta.conj() + fp[mi] * v.y_phi.conj()) * w;
                    curl[k] = (ft[mi] * v.z_theta.conj() + fp[mi] * v.z_phi.conj()) * w;
                }
            }
            (div, curl)
        })
        .collect();
    for (div, curl) in rings {
        for (o, d) in out.div_free.iter_mut().zip(div) {
            *o += d;
        }
        for (o, c) in out.curl_free.iter_mut().zip(curl) {
            *o += c;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::make_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(l: usize, seed: u64) -> SpectralCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = SpectralCoefficients::zeros(l).unwrap();
        for f in Family::BOTH {
            for v in c.family_mut(f) {
                *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        c
    }

    #[test]
    fn delta_roundtrip() {
        let grid = make_grid(3);
        let mut c = SpectralCoefficients::zeros(2).unwrap();
        c.set(Family::DivFree, 2, 1, Complex64::new(1.0, 0.0))
            .unwrap();
        let f = synthesize(&c, &grid.nodes, 0.0).unwrap();
        let back = analyze(&grid, &f, 2).unwrap();
        for fam in Family::BOTH {
            for (ell, m) in back.modes() {
                let v = back.get(fam, ell, m).unwrap();
                let expected = if fam == Family::DivFree && (ell, m) == (2, 1) {
                    1.0
                } else {
                    0.0
                };
                assert!((v - expected).norm() < 1e-12, "{fam:?} {ell} {m}");
            }
        }
    }

    #[test]
    fn parseval_example() {
        let grid = make_grid(3);
        let mut c = SpectralCoefficients::zeros(2).unwrap();
        c.set(Family::DivFree, 1, 0, Complex64::new(1.0, 0.0))
            .unwrap();
        c.set(Family::CurlFree, 2, -1, Complex64::new(0.0, 2.0))
            .unwrap();
        let f = synthesize(&c, &grid.nodes, 0.0).unwrap();
        assert!((f.norm_sq_on(&grid).unwrap() - 5.0).abs() < 1e-12);
        assert!((c.norm_sq() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn random_roundtrip_and_tangency() {
        for l in [1, 4, 9] {
            let grid = make_grid(l + 1);
            let c = random_coeffs(l, 11 + l as u64);
            let f = synthesize(&c, &grid.nodes, 0.0).unwrap();
            assert!(f.max_normal_component() < 1e-12);
            let back = analyze(&grid, &f, l).unwrap();
            for fam in Family::BOTH {
                for (a, b) in c.family(fam).iter().zip(back.family(fam)) {
                    assert!((a - b).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn degree_mismatch() {
        let grid = make_grid(4);
        let c = random_coeffs(4, 3);
        let f = synthesize(&c, &grid.nodes, 0.0).unwrap();
        assert!(matches!(
            analyze(&grid, &f, 4),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(analyze(&grid, &f, 3).is_ok());
    }

    #[test]
    fn truncation() {
        let c = random_coeffs(5, 8);
        assert_eq!(c.truncate(5).unwrap(), c);
        let t = c.truncate(1).unwrap();
        assert!(t.modes().all(|(ell, m)| ell == 1
            || t.get(Family::DivFree, ell, m).unwrap() == Complex64::new(0.0, 0.0)));
        assert!(t.norm_sq() <= c.norm_sq());
        assert!(c.truncate(0).is_err() && c.truncate(6).is_err());
    }

    #[test]
    fn pole_evaluation() {
        let mut c = SpectralCoefficients::zeros(3).unwrap();
        c.set(Family::CurlFree, 1, 1, Complex64::new(1.0, 0.0))
            .unwrap();
        assert!(evaluate(&c, &SpherePoint::north_pole()).is_ok());
        c.set(Family::CurlFree, 3, 0, Complex64::new(1.0, 0.0))
            .unwrap();
        assert!(matches!(
            evaluate(&c, &SpherePoint::north_pole()),
            Err(Error::Pole { .. })
        ));
    }
}
