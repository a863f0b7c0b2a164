//! Normalised Fresnel integrals `C(x) = ∫₀ˣ cos(πt²/2) dt` and
//! `S(x) = ∫₀ˣ sin(πt²/2) dt`.
//!
//! Power series below |x| = 1.5, a continued fraction for the complementary
//! error function above (modified Lentz evaluation).

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

const SERIES_LIMIT: f64 = 1.5;
const EPS: f64 = f64::EPSILON;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 200;

/// Returns `(C(x), S(x))`.
pub fn fresnel_cs(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (c, s) = if ax < 1e-150 {
        (ax, 0.0)
    } else if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

/// `C(x) + i S(x)`.
pub fn fresnel_complex(x: f64) -> Complex64 {
    let (c, s) = fresnel_cs(x);
    Complex64::new(c, s)
}

// C + iS = Σ_k (iπ/2)^k x^(2k+1) / (k! (2k+1))
fn series(x: f64) -> (f64, f64) {
    let t = FRAC_PI_2 * x * x;
    let mut power = Complex64::new(x, 0.0);
    let mut sum = power;
    for k in 1..MAX_TERMS {
        power *= Complex64::new(0.0, t / k as f64);
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term.norm() < EPS * sum.norm() {
            break;
        }
    }
    (sum.re, sum.im)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_TERMS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::new((0.5 * pix2).cos(), (0.5 * pix2).sin());
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    (cs.re, cs.im)
}
