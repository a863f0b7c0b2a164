//! Scalar 1D diffraction from three slits onto a detector plane.
//!
//! Fields are computed one slit at a time with unit transmittance and then
//! combined as `Σ_j sqrt(T_j) u_j(x)`. Because a combination's field is a
//! plain sum of single-slit fields, `field(S ∪ T) = field(S) + field(T)`
//! holds exactly, which is what makes the square-law κ vanish.
//!
//! Both propagators drop the same global constant, so their intensities are
//! directly comparable in the far field.

mod fresnel_integrals;
mod quadrature;
mod transmission;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use fresnel_integrals::{fresnel_complex, fresnel_cs};
pub use quadrature::{simpson_rule, Romberg};
pub use transmission::effective_transmission;

use crate::detection::DetectionLaw;
use crate::error::{Error, Result};
use crate::hierarchy::{ProbabilityOctet, Slit, SlitCombination};

/// Simpson intervals across the detection aperture.
pub const APERTURE_INTERVALS: usize = 64;

/// Largest transmittance accepted, leaving room for fault multipliers.
pub const MAX_TRANSMITTANCE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Propagator {
    Fraunhofer,
    #[default]
    Fresnel,
}

/// Slit mask, detector distance and detection aperture. Lengths in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlitGeometry {
    pub slit_centers: [f64; 3],
    pub slit_widths: [f64; 3],
    pub transmittance: [f64; 3],
    pub wavelength: f64,
    pub screen_distance: f64,
    pub aperture_width: f64,
    /// Separation between the blocking mask and the slit mask.
    pub mask_gap: f64,
    /// Width of each opening in the blocking mask.
    pub opening_width: f64,
}

impl Default for SlitGeometry {
    fn default() -> Self {
        Self {
            slit_centers: [-100e-6, 0.0, 100e-6],
            slit_widths: [30e-6; 3],
            transmittance: [1.0; 3],
            wavelength: 810e-9,
            screen_distance: 0.18,
            aperture_width: 62.5e-6,
            mask_gap: 50e-6,
            opening_width: 54e-6,
        }
    }
}

impl SlitGeometry {
    pub fn validate(&self) -> Result<()> {
        let all_finite = self
            .slit_centers
            .iter()
            .chain(&self.slit_widths)
            .chain(&self.transmittance)
            .chain([
                &self.wavelength,
                &self.screen_distance,
                &self.aperture_width,
                &self.mask_gap,
                &self.opening_width,
            ])
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::config("geometry", "all values must be finite"));
        }
        if self.slit_widths.iter().any(|w| *w <= 0.0) {
            return Err(Error::config("geometry.slit_widths", "widths must be > 0"));
        }
        for i in 0..2 {
            if self.slit_centers[i + 1] <= self.slit_centers[i] {
                return Err(Error::config(
                    "geometry.slit_centers",
                    "centers must be strictly increasing",
                ));
            }
            let gap = (self.slit_centers[i + 1] - 0.5 * self.slit_widths[i + 1])
                - (self.slit_centers[i] + 0.5 * self.slit_widths[i]);
            if gap <= 0.0 {
                return Err(Error::config(
                    "geometry.slit_centers",
                    "adjacent slits overlap",
                ));
            }
        }
        if self
            .transmittance
            .iter()
            .any(|t| !(0.0..=MAX_TRANSMITTANCE).contains(t))
        {
            return Err(Error::config(
                "geometry.transmittance",
                format!("transmittance must lie in [0, {MAX_TRANSMITTANCE}]"),
            ));
        }
        if self.wavelength <= 0.0 {
            return Err(Error::config("geometry.wavelength", "must be > 0"));
        }
        if self.screen_distance < 100.0 * self.wavelength {
            return Err(Error::config(
                "geometry.screen_distance",
                "must be much larger than the wavelength",
            ));
        }
        if self.aperture_width <= 0.0 {
            return Err(Error::config("geometry.aperture_width", "must be > 0"));
        }
        if self.mask_gap < 0.0 {
            return Err(Error::config("geometry.mask_gap", "must be >= 0"));
        }
        if self.slit_widths.iter().any(|w| self.opening_width <= *w) {
            return Err(Error::config(
                "geometry.opening_width",
                "blocking openings must be wider than the slits",
            ));
        }
        Ok(())
    }

    /// Fringe period `λL/d` of the nearest-neighbour pair.
    pub fn fringe_period(&self) -> f64 {
        let pitch = (self.slit_centers[1] - self.slit_centers[0])
            .min(self.slit_centers[2] - self.slit_centers[1]);
        self.wavelength * self.screen_distance / pitch
    }

    /// Outer edge to outer edge extent of the slit mask.
    pub fn aperture_span(&self) -> f64 {
        (self.slit_centers[2] + 0.5 * self.slit_widths[2])
            - (self.slit_centers[0] - 0.5 * self.slit_widths[0])
    }

    /// Distance beyond which the far-field approximation is within about a
    /// percent: `10 · span² / λ`.
    pub fn far_field_distance(&self) -> f64 {
        10.0 * self.aperture_span().powi(2) / self.wavelength
    }
}

/// Per-combination slit transmittances. Row `S` holds the transmittance of
/// each slit while combination `S` is being measured; entries for slits
/// outside `S` are carried but never used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmittanceTable([[f64; 3]; 8]);

impl TransmittanceTable {
    pub fn uniform(transmittance: [f64; 3]) -> Self {
        Self([transmittance; 8])
    }

    pub fn from_geometry(geom: &SlitGeometry) -> Self {
        Self::uniform(geom.transmittance)
    }

    pub fn row(&self, c: SlitCombination) -> [f64; 3] {
        self.0[c.index()]
    }

    pub fn get(&self, c: SlitCombination, slit: Slit) -> f64 {
        self.0[c.index()][slit.index()]
    }

    pub fn set(&mut self, c: SlitCombination, slit: Slit, value: f64) {
        self.0[c.index()][slit.index()] = value;
    }
}

/// Field of one slit with unit transmittance.
pub fn unit_slit_field(
    geom: &SlitGeometry,
    slit: Slit,
    x: f64,
    propagator: Propagator,
) -> Result<Complex64> {
    let j = slit.index();
    let (c, w) = (geom.slit_centers[j], geom.slit_widths[j]);
    match propagator {
        Propagator::Fraunhofer => Ok(fraunhofer_unit(
            c,
            w,
            geom.wavelength,
            geom.screen_distance,
            x,
        )),
        Propagator::Fresnel => fresnel_unit(c, w, geom.wavelength, geom.screen_distance, x),
    }
}

fn fraunhofer_unit(center: f64, width: f64, wavelength: f64, distance: f64, x: f64) -> Complex64 {
    let scale = wavelength * distance;
    let u = PI * width * x / scale;
    let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
    Complex64::from_polar(width * sinc, 2.0 * PI * center * x / scale)
}

// ∫ exp(-iπ (x - x')² / (λL)) dx' over the slit.
fn fresnel_unit(
    center: f64,
    width: f64,
    wavelength: f64,
    distance: f64,
    x: f64,
) -> Result<Complex64> {
    let scale = wavelength * distance;
    let (a, b) = (center - 0.5 * width, center + 0.5 * width);
    let max_offset = (x - a).abs().max((x - b).abs());
    let phase_span = 2.0 * PI * max_offset * width / scale;
    let initial_intervals = ((phase_span / (PI / 8.0)).ceil() as usize).max(8);
    let q = Romberg {
        abs_floor: 1e-6 * width,
        initial_intervals,
        ..Romberg::default()
    };
    q.integrate(a, b, |xp| {
        let d = x - xp;
        Complex64::from_polar(1.0, -PI * d * d / scale)
    })
}

fn combine(
    units: &[Complex64; 3],
    open_set: SlitCombination,
    transmittance: &[f64; 3],
) -> Complex64 {
    open_set
        .slits()
        .map(|s| units[s.index()] * transmittance[s.index()].sqrt())
        .sum()
}

fn field(
    geom: &SlitGeometry,
    open_set: SlitCombination,
    x: f64,
    propagator: Propagator,
) -> Result<Complex64> {
    let mut units = [Complex64::new(0.0, 0.0); 3];
    for s in open_set.slits() {
        units[s.index()] = unit_slit_field(geom, s, x, propagator)?;
    }
    Ok(combine(&units, open_set, &geom.transmittance))
}

/// Far-field amplitude
/// `Σ_j sqrt(T_j) w_j sinc(π w_j x/(λL)) exp(i 2π c_j x/(λL))`.
pub fn fraunhofer_field(geom: &SlitGeometry, open_set: SlitCombination, x: f64) -> Complex64 {
    field(geom, open_set, x, Propagator::Fraunhofer).expect("closed form cannot fail")
}

/// Fresnel-regime amplitude, by adaptive quadrature of the 1D Fresnel
/// integral over each open slit (see [`Romberg`] for the convergence rule).
pub fn fresnel_field(geom: &SlitGeometry, open_set: SlitCombination, x: f64) -> Result<Complex64> {
    field(geom, open_set, x, Propagator::Fresnel)
}

/// Amplitudes of one open-slit combination across the detector plane.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    pub positions: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub open_set: SlitCombination,
}

impl FieldProfile {
    pub fn compute(
        geom: &SlitGeometry,
        open_set: SlitCombination,
        positions: &[f64],
        propagator: Propagator,
    ) -> Result<Self> {
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::OutOfModel(
                "profile positions must be strictly increasing".into(),
            ));
        }
        let amplitude = positions
            .iter()
            .map(|&x| field(geom, open_set, x, propagator))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            positions: positions.to_vec(),
            amplitude,
            open_set,
        })
    }

    pub fn intensity(&self, law: DetectionLaw) -> Vec<f64> {
        self.amplitude.iter().map(|a| law.apply(*a)).collect()
    }
}

/// Single-slit fields sampled across the detection aperture, shared by all
/// eight combinations at one detector position.
#[derive(Debug, Clone)]
pub struct ApertureSample {
    weights: Vec<f64>,
    units: Vec<[Complex64; 3]>,
}

impl ApertureSample {
    pub fn new(geom: &SlitGeometry, x_center: f64, propagator: Propagator) -> Result<Self> {
        let half = 0.5 * geom.aperture_width;
        let (nodes, mut weights) =
            simpson_rule(x_center - half, x_center + half, APERTURE_INTERVALS);
        for w in &mut weights {
            *w /= geom.aperture_width;
        }
        let units = nodes
            .iter()
            .map(|&x| {
                Ok([
                    unit_slit_field(geom, Slit::A, x, propagator)?,
                    unit_slit_field(geom, Slit::B, x, propagator)?,
                    unit_slit_field(geom, Slit::C, x, propagator)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { weights, units })
    }

    /// Aperture-averaged detection probability of `open_set`.
    pub fn probability(
        &self,
        open_set: SlitCombination,
        transmittance: &[f64; 3],
        law: DetectionLaw,
    ) -> f64 {
        if open_set.is_empty() {
            return 0.0;
        }
        self.weights
            .iter()
            .zip(&self.units)
            .map(|(w, u)| w * law.apply(combine(u, open_set, transmittance)))
            .sum()
    }

    pub fn octet(
        &self,
        table: &TransmittanceTable,
        law: DetectionLaw,
        background: f64,
    ) -> Result<ProbabilityOctet> {
        ProbabilityOctet::from_fn(|c| self.probability(c, &table.row(c), law) + background)
    }
}

/// Detection probability of `open_set` averaged over the aperture centred
/// at `x_center`. The average (rather than the integral) keeps the value
/// finite as the aperture shrinks to a point.
pub fn detected_probability(
    geom: &SlitGeometry,
    open_set: SlitCombination,
    x_center: f64,
    law: DetectionLaw,
    propagator: Propagator,
) -> Result<f64> {
    let sample = ApertureSample::new(geom, x_center, propagator)?;
    Ok(sample.probability(open_set, &geom.transmittance, law))
}

/// All eight expected values at one detector position, each shifted by a
/// common `background`; `value[∅] = background`.
pub fn ideal_octet(
    geom: &SlitGeometry,
    x_center: f64,
    law: DetectionLaw,
    propagator: Propagator,
    background: f64,
) -> Result<ProbabilityOctet> {
    ideal_octet_with(
        geom,
        &TransmittanceTable::from_geometry(geom),
        x_center,
        law,
        propagator,
        background,
    )
}

/// [`ideal_octet`] with per-combination transmittances.
pub fn ideal_octet_with(
    geom: &SlitGeometry,
    table: &TransmittanceTable,
    x_center: f64,
    law: DetectionLaw,
    propagator: Propagator,
    background: f64,
) -> Result<ProbabilityOctet> {
    if !(background.is_finite() && background >= 0.0) {
        return Err(Error::InvalidOctet(format!(
            "background {background} must be >= 0"
        )));
    }
    ApertureSample::new(geom, x_center, propagator)?.octet(table, law, background)
}

/// Detector position of the central maximum of the all-open pattern,
/// searched within half a fringe period of the axis.
pub fn central_maximum(
    geom: &SlitGeometry,
    law: DetectionLaw,
    propagator: Propagator,
) -> Result<f64> {
    let half = 0.5 * geom.fringe_period();
    let p_abc = |x: f64| detected_probability(geom, SlitCombination::ABC, x, law, propagator);

    const GRID: usize = 64;
    let step = 2.0 * half / GRID as f64;
    let mut best = (-half, p_abc(-half)?);
    for i in 1..=GRID {
        let x = -half + i as f64 * step;
        let v = p_abc(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }

    // golden-section refinement on the bracketing grid cell pair
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.0 - step).max(-half), (best.0 + step).min(half));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (p_abc(c)?, p_abc(d)?);
    while (b - a) > 1e-6 * geom.fringe_period() {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = p_abc(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = p_abc(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::kappa_default;

    fn symmetric() -> SlitGeometry {
        SlitGeometry::default()
    }

    #[test]
    fn default_geometry_is_valid() {
        symmetric().validate().unwrap();
        assert!((symmetric().fringe_period() - 1.458e-3).abs() < 1e-9);
    }

    #[test]
    fn validation_names_the_key() {
        let mut g = symmetric();
        g.slit_centers = [0.0, -1e-4, 1e-4];
        assert!(
            matches!(g.validate(), Err(Error::Config { path, .. }) if path == "geometry.slit_centers")
        );
        let mut g = symmetric();
        g.slit_widths[1] = 250e-6;
        assert!(g.validate().is_err());
        let mut g = symmetric();
        g.opening_width = 20e-6;
        assert!(
            matches!(g.validate(), Err(Error::Config { path, .. }) if path == "geometry.opening_width")
        );
        let mut g = symmetric();
        g.wavelength = 0.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn empty_set_has_no_field() {
        let g = symmetric();
        for x in [-1e-3, 0.0, 2e-3] {
            assert_eq!(
                fraunhofer_field(&g, SlitCombination::EMPTY, x),
                Complex64::new(0.0, 0.0)
            );
            assert_eq!(
                fresnel_field(&g, SlitCombination::EMPTY, x).unwrap(),
                Complex64::new(0.0, 0.0)
            );
            assert_eq!(
                detected_probability(
                    &g,
                    SlitCombination::EMPTY,
                    x,
                    DetectionLaw::Born,
                    Propagator::Fresnel
                )
                .unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn fraunhofer_on_axis() {
        let g = symmetric();
        let single = fraunhofer_field(&g, SlitCombination::B, 0.0);
        assert_eq!(single, Complex64::new(30e-6, 0.0));
        let triple = fraunhofer_field(&g, SlitCombination::ABC, 0.0);
        assert!((triple - single * 3.0).norm() < 1e-18);
        assert!((triple.norm_sqr() / single.norm_sqr() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn fresnel_superposition_is_exact() {
        let g = symmetric();
        for x in [-2.1e-3, -3e-4, 0.0, 7.7e-4, 3.9e-3] {
            let abc = fresnel_field(&g, SlitCombination::ABC, x).unwrap();
            let ab = fresnel_field(&g, SlitCombination::AB, x).unwrap();
            let c = fresnel_field(&g, SlitCombination::C, x).unwrap();
            assert!((abc - ab - c).norm() <= 1e-14 * abc.norm().max(1e-300));
        }
    }

    #[test]
    fn fresnel_matches_closed_form() {
        // ∫_a^b exp(-iπ(x-x')²/(λL)) dx' = sqrt(λL/2) conj(F(v_b) - F(v_a)),
        // F = C + iS, v = (x' - x) sqrt(2/(λL)).
        let g = symmetric();
        let scale = g.wavelength * g.screen_distance;
        let k = (2.0 / scale).sqrt();
        for x in [-4e-3, -1.1e-3, 0.0, 0.5e-3, 2.9e-3] {
            let mut exact = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                let a = g.slit_centers[j] - 0.5 * g.slit_widths[j];
                let b = g.slit_centers[j] + 0.5 * g.slit_widths[j];
                let diff = fresnel_complex((b - x) * k) - fresnel_complex((a - x) * k);
                exact += diff.conj() / k;
            }
            let got = fresnel_field(&g, SlitCombination::ABC, x).unwrap();
            assert!(
                (got - exact).norm() <= 1e-8 * exact.norm(),
                "x={x}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn fresnel_agrees_with_fraunhofer_in_far_field() {
        let mut g = symmetric();
        g.screen_distance = g.far_field_distance();
        for open in [
            SlitCombination::ABC,
            SlitCombination::AC,
            SlitCombination::B,
        ] {
            let far =
                detected_probability(&g, open, 0.0, DetectionLaw::Born, Propagator::Fraunhofer)
                    .unwrap();
            let near = detected_probability(&g, open, 0.0, DetectionLaw::Born, Propagator::Fresnel)
                .unwrap();
            assert!((near / far - 1.0).abs() < 0.01, "{open}: {near} vs {far}");
        }
    }

    #[test]
    fn two_slit_fringe_period() {
        // Normalised two-slit interference term (P_AB - P_A - P_B) / 2sqrt(P_A P_B)
        // with a point aperture; its maxima are spaced by λL/d.
        let mut g = symmetric();
        g.aperture_width = 1e-9;
        let period = g.wavelength * g.screen_distance / 100e-6;
        assert!((period - 1.458e-3).abs() < 1e-12);
        let xs: Vec<f64> = (0..=4000).map(|i| -3e-3 + i as f64 * 1.5e-6).collect();
        let ab = FieldProfile::compute(&g, SlitCombination::AB, &xs, Propagator::Fresnel).unwrap();
        let a = FieldProfile::compute(&g, SlitCombination::A, &xs, Propagator::Fresnel).unwrap();
        let b = FieldProfile::compute(&g, SlitCombination::B, &xs, Propagator::Fresnel).unwrap();
        let (iab, ia, ib) = (
            ab.intensity(DetectionLaw::Born),
            a.intensity(DetectionLaw::Born),
            b.intensity(DetectionLaw::Born),
        );
        let fringe: Vec<f64> = (0..xs.len())
            .map(|i| (iab[i] - ia[i] - ib[i]) / (2.0 * (ia[i] * ib[i]).sqrt()))
            .collect();
        let peaks: Vec<f64> = (1..xs.len() - 1)
            .filter(|&i| fringe[i] > fringe[i - 1] && fringe[i] >= fringe[i + 1])
            .map(|i| xs[i])
            .collect();
        assert!(peaks.len() >= 3);
        for w in peaks.windows(2) {
            assert!((w[1] - w[0] - period).abs() < 3e-6, "{peaks:?}");
        }
    }

    #[test]
    fn aperture_averaging_limit() {
        let mut g = symmetric();
        let mut last = 0.0;
        for width in [200e-6, 62.5e-6, 10e-6, 1e-9] {
            g.aperture_width = width;
            let triple = detected_probability(
                &g,
                SlitCombination::ABC,
                0.0,
                DetectionLaw::Born,
                Propagator::Fraunhofer,
            )
            .unwrap();
            let single = detected_probability(
                &g,
                SlitCombination::B,
                0.0,
                DetectionLaw::Born,
                Propagator::Fraunhofer,
            )
            .unwrap();
            let ratio = triple / single;
            assert!(ratio > 1.0 && ratio <= 9.0 + 1e-12);
            assert!(ratio >= last);
            last = ratio;
        }
        assert!((last - 9.0).abs() < 1e-6);
    }

    #[test]
    fn born_octets_null_kappa() {
        let g = symmetric();
        for prop in [Propagator::Fraunhofer, Propagator::Fresnel] {
            for bg in [0.0, 3e-11] {
                for x in [-3.3e-3, -0.4e-3, 0.0, 1.9e-3] {
                    let o = ideal_octet(&g, x, DetectionLaw::Born, prop, bg).unwrap();
                    assert_eq!(o.background(), bg);
                    assert!(kappa_default(&o).unwrap().abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn quartic_point_aperture_limit() {
        let mut g = symmetric();
        g.aperture_width = 1e-9;
        let o = ideal_octet(
            &g,
            0.0,
            DetectionLaw::PowerLaw(4.0),
            Propagator::Fraunhofer,
            0.0,
        )
        .unwrap();
        assert!((kappa_default(&o).unwrap() - 6.0 / 7.0).abs() < 1e-6);
    }

    #[test]
    fn transmittance_scales_single_slit_linearly() {
        let g = symmetric();
        let mut dim = g.clone();
        dim.transmittance[2] = 0.64;
        for prop in [Propagator::Fraunhofer, Propagator::Fresnel] {
            let x = 4.1e-4;
            let f0 = unit_slit_field(&g, Slit::C, x, prop).unwrap();
            let f1 = field(&dim, SlitCombination::C, x, prop).unwrap();
            assert!((f1 - f0 * 0.8).norm() <= 1e-15 * f0.norm());
            let p0 =
                detected_probability(&g, SlitCombination::C, x, DetectionLaw::Born, prop).unwrap();
            let p1 = detected_probability(&dim, SlitCombination::C, x, DetectionLaw::Born, prop)
                .unwrap();
            assert!((p1 / p0 - 0.64).abs() < 1e-12);
        }
    }

    #[test]
    fn central_maximum_of_symmetric_mask_is_on_axis() {
        let g = symmetric();
        let x = central_maximum(&g, DetectionLaw::Born, Propagator::Fresnel).unwrap();
        assert!(x.abs() < 1e-8, "{x}");
    }

    #[test]
    fn central_maximum_tracks_asymmetry() {
        let mut g = symmetric();
        g.transmittance = [1.0, 1.0, 0.5];
        let x = central_maximum(&g, DetectionLaw::Born, Propagator::Fraunhofer).unwrap();
        // brute-force oracle on a fine grid
        let half = 0.5 * g.fringe_period();
        let (mut bx, mut bv) = (0.0, f64::MIN);
        for i in 0..=4000 {
            let xi = -half + i as f64 * (2.0 * half / 4000.0);
            let v = detected_probability(
                &g,
                SlitCombination::ABC,
                xi,
                DetectionLaw::Born,
                Propagator::Fraunhofer,
            )
            .unwrap();
            if v > bv {
                bx = xi;
                bv = v;
            }
        }
        assert!((x - bx).abs() < 2.0 * half / 4000.0, "{x} vs {bx}");
    }
}
