//! Aggregate interference statistics: the MGF of the received power under the
//! interference hypothesis and its first moment.
//!
//! A single interferer contributes `P = q·h·ℓ^{-α}·Υ(ω)` with unit-mean
//! Gamma(m) fading `h`, distance `ℓ ~ f_L` and spectral offset `ω ~ f_Ω`.
//! Expanding `E[e^{sP}]` in powers of `s` gives
//!
//! ```text
//! M_P(s) = Σ_n (q s)^n / n! · m^{-n} Γ(n+m)/Γ(m) · 2 γ_n κ_n / (R² (f_e - f_s))
//! ```
//!
//! with the spatial moment `κ_n = ∫ ℓ^{1-nα} a(ℓ) dℓ` (`a` the fraction of the
//! circle of radius ℓ inside the disk) and the spectral moment
//! `γ_n = ∫_0^{near} Υ^n + ∫_0^{far} Υ^n`. The integrand of κ_n is not
//! integrable at the origin once `nα >= 2`, so those orders start at the
//! exclusion radius `eps_min`.

use crate::blockage::GeometryConfig;
use crate::error::{Error, Result};
use crate::numerics::{integrate_pieces, ln_gamma_unchecked, Tolerance};
use crate::spectral::{overlap_tol, upsilon, BandConfig, SpectralModel};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Pathloss exponent α.
    pub alpha: f64,
    /// Nakagami shape m (`f64::INFINITY` disables fading).
    pub m: f64,
    /// Per-interferer transmit power q (W).
    pub q: f64,
    /// Number of candidate interferers N.
    pub n_interferers: u64,
    /// Occupancy probability p of each space-frequency slot.
    pub p: f64,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::config("alpha", self.alpha, "must be finite and > 0"));
        }
        if !(self.m >= 0.5) {
            return Err(Error::config("m", self.m, "must be >= 0.5"));
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(Error::config("q", self.q, "must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::config("p", self.p, "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// ln E[h^n] for unit-mean Gamma(m) power fading.
    pub fn ln_fading_moment(&self, n: usize) -> f64 {
        if n == 0 || self.m.is_infinite() {
            return 0.0;
        }
        let nf = n as f64;
        ln_gamma_unchecked(nf + self.m) - ln_gamma_unchecked(self.m) - nf * self.m.ln()
    }
}

/// Truncation controls for the MGF power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub n_max: usize,
    pub term_rel_floor: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            n_max: 200,
            term_rel_floor: 1e-17,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::config("n_max", self.n_max, "must be >= 1"));
        }
        if !(self.term_rel_floor > 0.0) {
            return Err(Error::config(
                "term_rel_floor",
                self.term_rel_floor,
                "must be > 0",
            ));
        }
        Ok(())
    }
}

/// Truncated series value with the order at which it stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub order: usize,
}

fn moment_tol() -> Tolerance {
    Tolerance {
        rel: 1e-11,
        abs: 0.0,
        max_iter: 4000,
    }
}

/// ln κ_n. Returned in log form because κ_n grows like `eps_min^{2-nα}`.
pub fn ln_kappa_n(n: usize, geo: &GeometryConfig, alpha: f64) -> Result<f64> {
    let power = 1.0 - n as f64 * alpha;
    let singular = n as f64 * alpha >= 2.0;
    let lo = if singular {
        if !(geo.eps_min > 0.0) {
            return Err(Error::Domain(format!(
                "κ_{n} diverges: ℓ^{power} is not integrable at 0 and eps_min = {}",
                geo.eps_min
            )));
        }
        geo.eps_min
    } else {
        0.0
    };
    let outer = geo.max_distance();
    if lo >= outer {
        return Ok(f64::NEG_INFINITY);
    }
    // substitute ℓ = scale·u so the integrand is O(1) at the lower limit
    let scale = if lo > 0.0 { lo } else { 1.0 };
    let inner = geo.radius - geo.v0_norm;
    let mut pts = vec![lo / scale];
    if inner > lo && inner < outer {
        pts.push(inner / scale);
    }
    pts.push(outer / scale);
    let q = integrate_pieces(
        |u| u.powf(power) * geo.annulus_fraction(scale * u),
        &pts,
        moment_tol(),
    )?;
    Ok((power + 1.0) * scale.ln() + q.value.ln())
}

/// κ_n(R, v₀) (units m^{2-nα}).
pub fn kappa_n(n: usize, geo: &GeometryConfig, alpha: f64) -> Result<f64> {
    ln_kappa_n(n, geo, alpha).map(f64::exp)
}

/// γ_n(f_s, f_e) (Hz), the spectral overlap moment of order n.
pub fn gamma_n(n: usize, band: &BandConfig, model: &SpectralModel) -> Result<f64> {
    let (near, far) = band.offset_breakpoints();
    if n == 0 {
        return Ok(near + far);
    }
    let support = model.overlap_support(band.bandwidth);
    let failure = std::cell::RefCell::new(None);
    let integrand = |w: f64| match upsilon(w, band, model, overlap_tol()) {
        Ok(v) => v.powi(n as i32),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let half_w = 0.5 * band.bandwidth;
    let mut pts = vec![0.0];
    for k in [half_w, support] {
        if k < near {
            pts.push(k);
        }
    }
    pts.push(near);
    let shared = integrate_pieces(integrand, &pts, moment_tol())?.value;
    let tail = if support > near {
        let end = support.min(far);
        let mut pts = vec![near];
        if half_w > near && half_w < end {
            pts.push(half_w);
        }
        pts.push(end);
        integrate_pieces(integrand, &pts, moment_tol())?.value
    } else {
        0.0
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 * shared + tail)
}

/// Interference model for one receiver location, with κ_n / γ_n evaluated
/// lazily and memoized so the tables can be shared across threads.
#[derive(Debug)]
pub struct InterferenceModel {
    pub channel: ChannelConfig,
    pub geo: GeometryConfig,
    pub band: BandConfig,
    pub spectral: SpectralModel,
    ln_kappa: Vec<OnceLock<std::result::Result<f64, Error>>>,
    gamma: Vec<OnceLock<std::result::Result<f64, Error>>>,
}

impl InterferenceModel {
    /// Prepare tables for series orders `0..=max_order`.
    pub fn new(
        channel: ChannelConfig,
        geo: GeometryConfig,
        band: BandConfig,
        spectral: SpectralModel,
        max_order: usize,
    ) -> Result<Self> {
        channel.validate()?;
        geo.validate()?;
        band.validate()?;
        spectral.validate()?;
        Ok(Self {
            channel,
            geo,
            band,
            spectral,
            ln_kappa: (0..=max_order).map(|_| OnceLock::new()).collect(),
            gamma: (0..=max_order).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn max_order(&self) -> usize {
        self.ln_kappa.len() - 1
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.max_order() {
            return Err(Error::Domain(format!(
                "series order {n} exceeds prepared table size {}",
                self.max_order()
            )));
        }
        Ok(())
    }

    pub fn ln_kappa(&self, n: usize) -> Result<f64> {
        self.check_order(n)?;
        self.ln_kappa[n]
            .get_or_init(|| ln_kappa_n(n, &self.geo, self.channel.alpha))
            .clone()
    }

    pub fn gamma(&self, n: usize) -> Result<f64> {
        self.check_order(n)?;
        self.gamma[n]
            .get_or_init(|| gamma_n(n, &self.band, &self.spectral))
            .clone()
    }

    /// ln E[(h ℓ^{-α} Υ)^n], i.e. the n-th moment of P/q.
    pub fn ln_normalized_moment(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let r = self.geo.radius;
        Ok(self.channel.ln_fading_moment(n)
            + std::f64::consts::LN_2
            + self.gamma(n)?.ln()
            + self.ln_kappa(n)?
            - 2.0 * r.ln()
            - self.band.span().ln())
    }

    /// E[P], the mean received power of one present, non-blocked interferer (W).
    pub fn interferer_mean_power(&self) -> Result<f64> {
        Ok(self.channel.q * self.ln_normalized_moment(1)?.exp())
    }

    /// `M_P(s) - 1`, summed without the constant term to keep precision near s = 0.
    pub fn interferer_mgf_minus_one(&self, s: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
        ctl.validate()?;
        if s == 0.0 {
            return Ok(SeriesValue {
                value: 0.0,
                order: 0,
            });
        }
        let n_max = ctl.n_max.min(self.max_order());
        let ln_qs = (self.channel.q * s.abs()).ln();
        let mut sum = 0.0;
        let mut peak = 0.0_f64;
        let mut prev = f64::INFINITY;
        for n in 1..=n_max {
            let nf = n as f64;
            let ln_term = nf * ln_qs - ln_gamma_unchecked(nf + 1.0) + self.ln_normalized_moment(n)?;
            let mag = ln_term.exp();
            if !mag.is_finite() {
                return Err(Error::SeriesDivergence { order: n, s });
            }
            let term = if s < 0.0 && n % 2 == 1 { -mag } else { mag };
            sum += term;
            peak = peak.max(mag);
            let shrinking = mag < prev;
            prev = mag;
            // |M_P(s) - 1| is bounded by ~1 for s < 0; judge the floor against 1 + |sum|
            if shrinking && mag <= ctl.term_rel_floor * (1.0 + sum.abs()) {
                if peak * f64::EPSILON > 1e-9 {
                    // cancellation has destroyed the significant digits
                    return Err(Error::SeriesDivergence { order: n, s });
                }
                return Ok(SeriesValue {
                    value: sum,
                    order: n,
                });
            }
        }
        Err(Error::SeriesDivergence { order: n_max, s })
    }

    /// M_P(s), the MGF of a single interferer's received power.
    pub fn interferer_mgf(&self, s: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
        let v = self.interferer_mgf_minus_one(s, ctl)?;
        Ok(SeriesValue {
            value: 1.0 + v.value,
            order: v.order,
        })
    }

    /// M_Y(s) = e^{φs} [1 - π + π M_P(s)]^N with π = p(1 - p_b).
    pub fn aggregate_mgf(&self, s: f64, phi: f64, p_b: f64, ctl: &SeriesControl) -> Result<f64> {
        let success = self.success_probability(p_b)?;
        let signal = (phi * s).exp();
        if success == 0.0 || self.channel.n_interferers == 0 || s == 0.0 {
            return Ok(signal);
        }
        let excess = self.interferer_mgf_minus_one(s, ctl)?.value;
        let n = self.channel.n_interferers as f64;
        Ok(signal * (n * (success * excess).ln_1p()).exp())
    }

    fn success_probability(&self, p_b: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p_b) {
            return Err(Error::config("p_b", p_b, "must lie in [0, 1]"));
        }
        Ok(self.channel.p * (1.0 - p_b))
    }

    /// E[y] = φ + N p (1 - p_b) E[P], the derivative of M_Y at 0.
    pub fn mean_received_power(&self, phi: f64, p_b: f64) -> Result<f64> {
        let success = self.success_probability(p_b)?;
        if success == 0.0 || self.channel.n_interferers == 0 {
            return Ok(phi);
        }
        Ok(phi + self.channel.n_interferers as f64 * success * self.interferer_mean_power()?)
    }
}

/// M_P(s) evaluated from scratch for one configuration.
pub fn interferer_power_mgf(
    s: f64,
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    band: &BandConfig,
    model: &SpectralModel,
    ctl: &SeriesControl,
) -> Result<SeriesValue> {
    InterferenceModel::new(*cfg, *geo, *band, *model, ctl.n_max)?.interferer_mgf(s, ctl)
}

/// M_Y(s) evaluated from scratch for one configuration.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_mgf(
    s: f64,
    phi: f64,
    p_b: f64,
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    band: &BandConfig,
    model: &SpectralModel,
    ctl: &SeriesControl,
) -> Result<f64> {
    InterferenceModel::new(*cfg, *geo, *band, *model, ctl.n_max)?.aggregate_mgf(s, phi, p_b, ctl)
}

/// E[y] evaluated from scratch for one configuration.
pub fn mean_received_power(
    phi: f64,
    p_b: f64,
    cfg: &ChannelConfig,
    geo: &GeometryConfig,
    band: &BandConfig,
    model: &SpectralModel,
) -> Result<f64> {
    InterferenceModel::new(*cfg, *geo, *band, *model, 1)?.mean_received_power(phi, p_b)
}

/// Transmit power conversion, dBm to W.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockage::distance_pdf;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Gamma};

    const GHZ: f64 = 1e9;

    fn geo(v0: f64) -> GeometryConfig {
        GeometryConfig {
            radius: 10.0,
            v0_norm: v0,
            theta: 10f64.to_radians(),
            eps_min: 0.1,
        }
    }

    fn band() -> BandConfig {
        BandConfig {
            f_s: 58.0 * GHZ,
            f_e: 64.0 * GHZ,
            f_0: 62.0 * GHZ,
            bandwidth: 100e6,
        }
    }

    fn channel() -> ChannelConfig {
        ChannelConfig {
            alpha: 2.5,
            m: 3.0,
            q: dbm_to_watts(27.0),
            n_interferers: 200,
            p: 0.5,
        }
    }

    fn model(ch: ChannelConfig, v0: f64) -> InterferenceModel {
        InterferenceModel::new(ch, geo(v0), band(), SpectralModel::gaussian_rc0(100e6), 200)
            .unwrap()
    }

    #[test]
    fn kappa_zero_is_half_radius_squared() {
        for v0 in [0.0, 4.0, 9.0] {
            let k = kappa_n(0, &geo(v0), 2.5).unwrap();
            assert!((k - 50.0).abs() < 1e-8, "v0 {v0}: {k}");
        }
    }

    #[test]
    fn kappa_one_closed_form() {
        let want = 2.0 * (0.1f64.powf(-0.5) - 10f64.powf(-0.5));
        let got = kappa_n(1, &geo(0.0), 2.5).unwrap();
        assert!((got - want).abs() < 1e-10 * want);
    }

    #[test]
    fn kappa_integrable_orders_start_at_origin() {
        // α = 1.5, n = 1: ∫_0^10 ℓ^{-0.5} dℓ = 2√10
        let got = kappa_n(1, &geo(0.0), 1.5).unwrap();
        assert!((got - 2.0 * 10f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn kappa_divergence_without_exclusion() {
        let g = GeometryConfig {
            eps_min: 0.0,
            ..geo(0.0)
        };
        assert!(matches!(kappa_n(1, &g, 2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_large_orders_stay_finite_in_log_space() {
        let lk = ln_kappa_n(150, &geo(3.0), 2.5).unwrap();
        // dominated by the lower limit: eps^{2-nα} / (nα - 2)
        let approx = (2.0 - 375.0) * 0.1f64.ln() - 373f64.ln();
        assert!((lk - approx).abs() < 1e-6);
    }

    #[test]
    fn gamma_zero_is_band_span() {
        let g0 = gamma_n(0, &band(), &SpectralModel::gaussian_rc0(100e6)).unwrap();
        assert_eq!(g0, 6.0 * GHZ);
    }

    #[test]
    fn gamma_one_captures_overlap_mass_on_both_branches() {
        // Υ support ≪ band: both branches integrate the full mass; ∫_0^∞ Υ = W/2
        // for a unit-area PSD through a unit-height window of width W.
        let m = SpectralModel::gaussian_rc0(100e6);
        let g1 = gamma_n(1, &band(), &m).unwrap();
        let direct = integrate_pieces(
            |w| m.overlap_closed_form(w, 100e6).unwrap(),
            &[0.0, 50e6, 1.1e9],
            moment_tol(),
        )
        .unwrap()
        .value;
        assert!((g1 - 2.0 * direct).abs() < 1e-8 * g1);
        assert!((g1 - 100e6).abs() < 1e-6 * g1);
    }

    #[test]
    fn mgf_at_origin() {
        let im = model(channel(), 0.0);
        let ctl = SeriesControl::default();
        assert_eq!(im.interferer_mgf(0.0, &ctl).unwrap().value, 1.0);
        assert_eq!(im.aggregate_mgf(0.0, 0.3, 0.2, &ctl).unwrap(), 1.0);
    }

    #[test]
    fn no_interferers_reduces_to_signal() {
        let ctl = SeriesControl::default();
        let im = model(ChannelConfig { p: 0.0, ..channel() }, 0.0);
        for s in [-1e-3, -1.0, -1e3] {
            assert_eq!(im.aggregate_mgf(s, 0.2, 0.3, &ctl).unwrap(), (0.2 * s).exp());
        }
        let im = model(channel(), 0.0);
        assert_eq!(im.aggregate_mgf(-1.0, 0.2, 1.0, &ctl).unwrap(), (-0.2f64).exp());
        assert_eq!(im.mean_received_power(0.2, 1.0).unwrap(), 0.2);
        let im = model(ChannelConfig { n_interferers: 0, ..channel() }, 0.0);
        assert_eq!(im.mean_received_power(0.2, 0.0).unwrap(), 0.2);
    }

    #[test]
    fn mean_power_matches_direct_sampling() {
        // E[q·h·ℓ^{-α}·Υ(ω); ℓ ≥ eps_min] with ℓ importance-sampled from g ∝ ℓ^{1-α}
        // and weighted by f_L/g, ω from a uniform carrier in the band
        let ch = channel();
        let g = geo(3.0);
        let sm = SpectralModel::gaussian_rc0(100e6);
        let analytic = model(ch, 3.0).interferer_mean_power().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let fading = Gamma::new(ch.m, 1.0 / ch.m).unwrap();
        let (lo, hi) = (g.eps_min, g.max_distance());
        let e = 2.0 - ch.alpha;
        let norm = (hi.powf(e) - lo.powf(e)) / e;
        let n = 2_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random();
            let ell = (lo.powf(e) + u * e * norm).powf(1.0 / e);
            let weight = distance_pdf(ell, &g) * ell.powf(-ch.alpha) / (ell.powf(1.0 - ch.alpha) / norm);
            let f = band().f_s + band().span() * rng.random::<f64>();
            let ups = sm.overlap_closed_form(f - band().f_0, 100e6).unwrap();
            acc += ch.q * fading.sample(&mut rng) * weight * ups;
        }
        let mc = acc / n as f64;
        assert!((mc - analytic).abs() < 0.03 * analytic, "mc {mc} vs {analytic}");
    }

    #[test]
    fn mean_matches_numeric_derivative() {
        let im = model(channel(), 2.0);
        let ctl = SeriesControl::default();
        let (phi, p_b) = (1e-3, 0.25);
        let mean = im.mean_received_power(phi, p_b).unwrap();
        let h = 1e-6 / mean;
        let deriv = (im.aggregate_mgf(h, phi, p_b, &ctl).unwrap()
            - im.aggregate_mgf(-h, phi, p_b, &ctl).unwrap())
            / (2.0 * h);
        assert!((deriv - mean).abs() < 1e-4 * mean, "{deriv} vs {mean}");
    }

    #[test]
    fn mgf_is_completely_monotone_on_negative_axis() {
        let im = model(channel(), 0.0);
        let ctl = SeriesControl::default();
        let mut prev = 1.0;
        for k in 1..=20 {
            let s = -(k as f64) * 1e-4;
            let v = im.aggregate_mgf(s, 1e-3, 0.2, &ctl).unwrap();
            assert!(v > 0.0 && v <= prev, "s {s}: {v} vs {prev}");
            prev = v;
        }
    }

    #[test]
    fn large_argument_reports_divergence() {
        let im = model(channel(), 0.0);
        assert!(matches!(
            im.aggregate_mgf(-1e3, 0.0, 0.2, &SeriesControl::default()),
            Err(Error::SeriesDivergence { .. })
        ));
    }

    #[test]
    fn heavy_m_approaches_no_fading() {
        let ctl = SeriesControl::default();
        let heavy = model(ChannelConfig { m: 1e4, ..channel() }, 0.0);
        let none = model(ChannelConfig { m: f64::INFINITY, ..channel() }, 0.0);
        for s in [-1e-3, -5e-3] {
            let a = heavy.interferer_mgf(s, &ctl).unwrap().value;
            let b = none.interferer_mgf(s, &ctl).unwrap().value;
            assert!((a - b).abs() < 1e-3);
        }
        // Gamma(m, 1/m) concentrates at 1: E[h^n] → 1
        for n in 1..6 {
            let ch = ChannelConfig { m: 1e4, ..channel() };
            assert!(ch.ln_fading_moment(n).abs() < 1e-3);
        }
    }

    #[test]
    fn mean_monotonicity() {
        let base = channel();
        let e = |ch: ChannelConfig, p_b: f64| model(ch, 0.0).mean_received_power(1e-3, p_b).unwrap();
        assert!(e(ChannelConfig { n_interferers: 100, ..base }, 0.2) <= e(base, 0.2));
        assert!(e(ChannelConfig { p: 0.3, ..base }, 0.2) <= e(base, 0.2));
        assert!(e(ChannelConfig { q: 0.1, ..base }, 0.2) <= e(base, 0.2));
        assert!(e(base, 0.5) <= e(base, 0.2));
    }

    #[test]
    fn power_conversion() {
        assert!((dbm_to_watts(27.0) - 0.501_187_233_627_272_3).abs() < 1e-15);
        assert!((watts_to_dbm(1.0) - 30.0).abs() < 1e-12);
    }
}
