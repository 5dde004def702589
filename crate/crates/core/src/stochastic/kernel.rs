use crate::specfun::{mittag_leffler, ml_kernel};

/// A real deterministic integrand g on [0, ∞).
///
/// `grading` is an exponent κ ∈ (0, 1] such that g(s) = s^{κ-1} h(s^κ) with h smooth;
/// integrators use it to build meshes that are fine near s = 0. Evaluation failures are
/// reported as non-finite values.
pub trait Kernel: Sync {
    fn eval(&self, s: f64) -> f64;

    fn grading(&self) -> f64 {
        1.0
    }

    /// h(s^κ) = g(s) s^{1-κ}, finite at s = 0.
    fn regular_part(&self, s: f64) -> f64 {
        let k = self.grading();
        if k == 1.0 {
            self.eval(s)
        } else {
            self.eval(s) * s.powf(1.0 - k)
        }
    }
}

impl<F: Fn(f64) -> f64 + Sync> Kernel for F {
    fn eval(&self, s: f64) -> f64 {
        self(s)
    }
}

/// The relaxation kernel s^{β-1} E_{β,β}(-λ s^β) of a single spectral mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlKernel {
    pub beta: f64,
    pub lambda: f64,
}

impl MlKernel {
    pub fn new(beta: f64, lambda: f64) -> Self {
        MlKernel { beta, lambda }
    }
}

impl Kernel for MlKernel {
    fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return if self.beta == 1.0 { 1.0 } else { f64::INFINITY };
        }
        ml_kernel(self.beta, self.lambda, s).unwrap_or(f64::NAN)
    }

    fn grading(&self) -> f64 {
        self.beta
    }

    fn regular_part(&self, s: f64) -> f64 {
        if self.beta == 1.0 {
            return (-self.lambda * s).exp();
        }
        mittag_leffler(
            self.beta,
            self.beta,
            -self.lambda * s.max(0.0).powf(self.beta),
        )
        .unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_part_is_consistent() {
        let k = MlKernel::new(0.6, 2.5);
        for &s in &[1e-6, 0.01, 0.3, 2.0] {
            let a = k.regular_part(s);
            let b = k.eval(s) * s.powf(0.4);
            assert!((a - b).abs() < 1e-13 * a.abs());
        }
        assert!(k.eval(0.0).is_infinite());
        assert!((k.regular_part(0.0) - crate::specfun::rgamma(0.6)).abs() < 1e-15);
    }

    #[test]
    fn closures_are_kernels() {
        let g = |s: f64| (-s).exp();
        assert_eq!(g.grading(), 1.0);
        assert_eq!(Kernel::eval(&g, 0.0), 1.0);
    }
}
