use super::fresnel_integrals::fresnel_cs;
use super::quadrature::Romberg;
use crate::error::{Error, Result};

/// Relative change in power through a slit when the blocking-mask opening
/// in front of it is laterally displaced by `shift`.
///
/// A unit plane wave leaves the opening (width `opening_width`, centred at
/// `shift`), propagates `gap` in the Fresnel approximation, and the power
/// landing on the slit (width `slit_width`, centred at 0) is integrated.
/// Returns `T(shift) / T(0)`.
pub fn effective_transmission(
    opening_width: f64,
    slit_width: f64,
    gap: f64,
    shift: f64,
    wavelength: f64,
) -> Result<f64> {
    for (name, v) in [
        ("opening_width", opening_width),
        ("slit_width", slit_width),
        ("gap", gap),
        ("shift", shift),
        ("wavelength", wavelength),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("{name} = {v}")));
        }
    }
    if slit_width <= 0.0 || opening_width <= slit_width {
        return Err(Error::OutOfModel(format!(
            "opening ({opening_width:e} m) must be wider than the slit ({slit_width:e} m)"
        )));
    }
    if gap < 0.0 || wavelength <= 0.0 {
        return Err(Error::OutOfModel(
            "gap must be >= 0 and wavelength > 0".into(),
        ));
    }
    let margin = 0.5 * (opening_width - slit_width);
    if shift.abs() > margin {
        return Err(Error::OutOfModel(format!(
            "shift {shift:e} m uncovers the slit (margin {margin:e} m)"
        )));
    }
    // At zero gap the slit sees the geometric opening, which still covers it.
    if shift == 0.0 || gap == 0.0 {
        return Ok(1.0);
    }
    let t0 = transmitted_power(opening_width, slit_width, gap, 0.0, wavelength)?;
    let ts = transmitted_power(opening_width, slit_width, gap, shift, wavelength)?;
    Ok(ts / t0)
}

fn transmitted_power(
    opening_width: f64,
    slit_width: f64,
    gap: f64,
    shift: f64,
    wavelength: f64,
) -> Result<f64> {
    let k = (2.0 / (wavelength * gap)).sqrt();
    let (lo, hi) = (shift - 0.5 * opening_width, shift + 0.5 * opening_width);
    // |U|² = ½ [(ΔC)² + (ΔS)²] for a unit plane wave through [lo, hi]
    let intensity = |x: f64| {
        let (c1, s1) = fresnel_cs((lo - x) * k);
        let (c2, s2) = fresnel_cs((hi - x) * k);
        0.5 * ((c2 - c1).powi(2) + (s2 - s1).powi(2))
    };
    // ripple wavenumber at the slit is at most k² · (opening half-width + slit half-width)
    let ripple = k * k * (0.5 * opening_width + 0.5 * slit_width + shift.abs());
    let initial_intervals =
        ((ripple * slit_width / (std::f64::consts::PI / 8.0)).ceil() as usize).max(16);
    let q = Romberg {
        rel_tol: 1e-12,
        initial_intervals,
        ..Romberg::default()
    };
    q.integrate_real(-0.5 * slit_width, 0.5 * slit_width, intensity)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPENING: f64 = 54e-6;
    const SLIT: f64 = 30e-6;
    const GAP: f64 = 50e-6;
    const LAMBDA: f64 = 810e-9;

    #[test]
    fn zero_shift_is_exactly_one() {
        assert_eq!(
            effective_transmission(OPENING, SLIT, GAP, 0.0, LAMBDA).unwrap(),
            1.0
        );
    }

    #[test]
    fn zero_gap_is_exactly_one() {
        for shift in [-11e-6, 3e-6, 8e-6] {
            assert_eq!(
                effective_transmission(OPENING, SLIT, 0.0, shift, LAMBDA).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn eight_micron_misalignment() {
        let r = effective_transmission(OPENING, SLIT, GAP, 8e-6, LAMBDA).unwrap();
        let dev = (r - 1.0).abs();
        assert!((0.005..=0.05).contains(&dev), "ratio {r}");
    }

    #[test]
    fn mirror_symmetric_in_shift() {
        let a = effective_transmission(OPENING, SLIT, GAP, 5e-6, LAMBDA).unwrap();
        let b = effective_transmission(OPENING, SLIT, GAP, -5e-6, LAMBDA).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn out_of_model_shift() {
        assert!(matches!(
            effective_transmission(OPENING, SLIT, GAP, 13e-6, LAMBDA),
            Err(Error::OutOfModel(_))
        ));
        assert!(effective_transmission(SLIT, OPENING, GAP, 0.0, LAMBDA).is_err());
        assert!(effective_transmission(OPENING, SLIT, -1e-6, 1e-6, LAMBDA).is_err());
    }

    #[test]
    fn wide_opening_far_from_edges_is_nearly_unaffected() {
        let r = effective_transmission(400e-6, SLIT, GAP, 8e-6, LAMBDA).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn power_matches_fine_grid_oracle() {
        // plain midpoint sum on a very fine grid, independent of the
        // adaptive integrator
        let k = (2.0 / (LAMBDA * GAP)).sqrt();
        let shift = 8e-6;
        let (lo, hi) = (shift - 0.5 * OPENING, shift + 0.5 * OPENING);
        let n = 200_000;
        let h = SLIT / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = -0.5 * SLIT + (i as f64 + 0.5) * h;
            let (c1, s1) = fresnel_cs((lo - x) * k);
            let (c2, s2) = fresnel_cs((hi - x) * k);
            sum += 0.5 * ((c2 - c1).powi(2) + (s2 - s1).powi(2)) * h;
        }
        let got = transmitted_power(OPENING, SLIT, GAP, shift, LAMBDA).unwrap();
        assert!((got / sum - 1.0).abs() < 1e-8, "{got} vs {sum}");
    }
}
