use num_complex::Complex64;

use crate::error::{Error, Result};

/// Convergence contract shared by every adaptive integral in the crate:
/// trapezoid sums with the step halved each level, Richardson-extrapolated
/// (Romberg), stopping once two successive extrapolations differ by less
/// than `rel_tol` of the larger of the estimate and `abs_floor`.
#[derive(Debug, Clone, Copy)]
pub struct Romberg {
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Subintervals of the coarsest trapezoid sum. Oscillatory integrands
    /// need this large enough that the first levels are not aliased.
    pub initial_intervals: usize,
    pub min_levels: u32,
    pub max_levels: u32,
}

impl Default for Romberg {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_floor: 0.0,
            initial_intervals: 4,
            min_levels: 3,
            max_levels: 22,
        }
    }
}

impl Romberg {
    pub fn integrate(
        &self,
        a: f64,
        b: f64,
        mut f: impl FnMut(f64) -> Complex64,
    ) -> Result<Complex64> {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let n0 = self.initial_intervals.max(1);
        let mut h = (b - a) / n0 as f64;
        let mut trap = (f(a) + f(b)) * 0.5;
        for i in 1..n0 {
            trap += f(a + i as f64 * h);
        }
        trap *= h;

        let mut prev_row = vec![trap];
        let mut intervals = n0;
        let mut residual = f64::INFINITY;
        for level in 1..=self.max_levels {
            h *= 0.5;
            let mut mid = Complex64::new(0.0, 0.0);
            for i in 0..intervals {
                mid += f(a + (2 * i + 1) as f64 * h);
            }
            intervals *= 2;

            let mut row = Vec::with_capacity(prev_row.len() + 1);
            row.push(prev_row[0] * 0.5 + mid * h);
            let mut factor = 1.0;
            for m in 1..=prev_row.len() {
                factor *= 4.0;
                let r = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / (factor - 1.0);
                row.push(r);
            }

            let best = *row.last().expect("row is non-empty");
            let prev_best = *prev_row.last().expect("row is non-empty");
            residual = (best - prev_best).norm();
            let scale = best.norm().max(self.abs_floor);
            if level >= self.min_levels && residual <= self.rel_tol * scale {
                return Ok(best);
            }
            prev_row = row;
        }
        Err(Error::QuadratureNonConvergence {
            levels: self.max_levels,
            residual,
        })
    }

    pub fn integrate_real(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        self.integrate(a, b, |x| Complex64::new(f(x), 0.0))
            .map(|z| z.re)
    }
}

/// Nodes and weights of composite Simpson's rule on `[a, b]` with `intervals`
/// (even) subintervals. Weights sum to `b - a`.
pub fn simpson_rule(a: f64, b: f64, intervals: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(
        intervals >= 2 && intervals.is_multiple_of(2),
        "simpson needs an even interval count"
    );
    let h = (b - a) / intervals as f64;
    let nodes = (0..=intervals).map(|i| a + i as f64 * h).collect();
    let weights = (0..=intervals)
        .map(|i| {
            let w = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = Romberg::default()
            .integrate_real(0.0, 2.0, |x| 3.0 * x * x + 1.0)
            .unwrap();
        assert!((r - 10.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integral() {
        // ∫_0^1 e^{i 40 x} dx = (e^{40i} - 1) / (40 i)
        let k = 40.0;
        let exact = (Complex64::new(0.0, k).exp() - 1.0) / Complex64::new(0.0, k);
        let q = Romberg {
            initial_intervals: 64,
            ..Romberg::default()
        };
        let r = q
            .integrate(0.0, 1.0, |x| Complex64::new(0.0, k * x).exp())
            .unwrap();
        assert!((r - exact).norm() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let q = Romberg {
            max_levels: 3,
            ..Romberg::default()
        };
        let err = q
            .integrate_real(0.0, 1.0, |x| (1.0 / (x + 1e-9)).sin())
            .unwrap_err();
        assert!(matches!(
            err,
            Error::QuadratureNonConvergence { levels: 3, .. }
        ));
    }

    #[test]
    fn simpson_weights() {
        let (x, w) = simpson_rule(-1.0, 1.0, 8);
        assert_eq!(x.len(), 9);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
        let cubic: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
        assert!(cubic.abs() < 1e-15);
    }
}
