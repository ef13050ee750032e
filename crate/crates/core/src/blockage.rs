//! Analytic blockage probability for a single interferer's radiation cone and
//! the resulting distribution of non-blocked interferers.
//!
//! Obstacles are discs of radius `d ~ U[d_s, d_e]` whose centers form a PPP of
//! intensity `rho`. An interferer at distance `ell` from the receiver radiates
//! a cone of half-angle `theta` towards it. Two regimes feed the combined
//! probability: a near-apex obstacle wider than the local cone section blocks
//! outright (`p_b1`), otherwise the shadows of several partial blockers must
//! add up across the cone base (`p_b2`).

use crate::error::{Error, Result};
use crate::numerics::{erf, integrate, integrate_pieces, ln_gamma_unchecked, Tolerance};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

/// How `p_b1` and `p_b2` are combined into one blockage probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// `p_b1 / L1 + p_b2 / (E[ℓ] - L1)` exactly as the closed form is usually
    /// printed, lengths in meters, clamped to `[0, 1]`.
    Verbatim,
    /// `(L1 p_b1 + L2 p_b2) / E[ℓ]`, a dimensionless length-weighted average.
    #[default]
    LengthWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageConfig {
    /// Obstacle density (obstacles per m²).
    pub rho: f64,
    /// Minimum obstacle radius (m).
    pub d_s: f64,
    /// Maximum obstacle radius (m).
    pub d_e: f64,
    #[serde(default)]
    pub mode: CombineMode,
}

impl BlockageConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho >= 0.0) || !self.rho.is_finite() {
            return Err(Error::config("rho", self.rho, "must be finite and >= 0"));
        }
        if !(self.d_s > 0.0) {
            return Err(Error::config("d_s", self.d_s, "must be > 0"));
        }
        if !(self.d_e >= self.d_s) || !self.d_e.is_finite() {
            return Err(Error::config("d_e", self.d_e, "must be finite and >= d_s"));
        }
        Ok(())
    }

    /// Mean obstacle radius under the uniform radius law.
    pub fn mean_radius(&self) -> f64 {
        0.5 * (self.d_s + self.d_e)
    }
}

/// Disk network geometry seen from the reference receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    /// Network disk radius R (m).
    pub radius: f64,
    /// Receiver distance from the disk center ‖v₀‖ (m).
    pub v0_norm: f64,
    /// Beam half-width θ (rad); the beamwidth is 2θ.
    pub theta: f64,
    /// Exclusion radius around the receiver used to keep pathloss moments finite (m).
    pub eps_min: f64,
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::config("radius", self.radius, "must be finite and > 0"));
        }
        if !(self.v0_norm >= 0.0 && self.v0_norm < self.radius) {
            return Err(Error::config(
                "v0_norm",
                self.v0_norm,
                "must satisfy 0 <= v0_norm < radius",
            ));
        }
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return Err(Error::config("theta", self.theta, "must lie in (0, π/2)"));
        }
        if !(self.eps_min > 0.0 && self.eps_min < self.radius) {
            return Err(Error::config(
                "eps_min",
                self.eps_min,
                "must satisfy 0 < eps_min < radius",
            ));
        }
        Ok(())
    }

    pub fn with_v0(&self, v0_norm: f64) -> Self {
        Self { v0_norm, ..*self }
    }

    /// Largest possible interferer distance R + ‖v₀‖.
    pub fn max_distance(&self) -> f64 {
        self.radius + self.v0_norm
    }

    /// Fraction of the circle of radius `ell` around the receiver that lies
    /// inside the disk (1 up to R - ‖v₀‖, then the arccos branch).
    pub fn annulus_fraction(&self, ell: f64) -> f64 {
        let inner = self.radius - self.v0_norm;
        if ell <= inner {
            1.0
        } else if ell > self.max_distance() {
            0.0
        } else {
            let v0 = self.v0_norm;
            let arg = (v0 * v0 - self.radius * self.radius + ell * ell) / (2.0 * ell * v0);
            arg.clamp(-1.0, 1.0).acos() / PI
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageResult {
    pub p_b1: f64,
    pub p_b2: f64,
    /// Δ = 2ρE[ℓ]tanθ.
    pub delta: f64,
    /// E[ℓ] (m).
    pub mean_ell: f64,
    /// E[S], average partial shadow length (m).
    pub mean_s: f64,
    pub p_b: f64,
    pub mode: CombineMode,
    /// Set when the combined probability fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

fn quad_tol() -> Tolerance {
    Tolerance {
        rel: 1e-10,
        abs: 1e-14,
        max_iter: 2000,
    }
}

/// Density of the distance between the receiver and a point uniform in the disk.
pub fn distance_pdf(ell: f64, geo: &GeometryConfig) -> f64 {
    if !(ell > 0.0) || ell > geo.max_distance() {
        return 0.0;
    }
    2.0 * ell * geo.annulus_fraction(ell) / (geo.radius * geo.radius)
}

fn distance_breaks(geo: &GeometryConfig, from: f64) -> Vec<f64> {
    let inner = geo.radius - geo.v0_norm;
    let outer = geo.max_distance();
    let mut pts = vec![from];
    if inner > from && inner < outer {
        pts.push(inner);
    }
    if outer > from {
        pts.push(outer);
    }
    pts
}

/// E[ℓ], the mean interferer distance.
pub fn mean_distance(geo: &GeometryConfig) -> Result<f64> {
    integrate_pieces(
        |l| l * distance_pdf(l, geo),
        &distance_breaks(geo, 0.0),
        quad_tol(),
    )
    .map(|q| q.value)
}

/// Shadow length `2dℓ/r` cast on the cone base by an obstacle of radius `d`
/// at axial distance `r` from the apex of a cone of length `ell`.
pub fn partial_shadow(d: f64, r: f64, ell: f64) -> f64 {
    2.0 * d * ell / r
}

/// Axial distance from the apex below which an obstacle of radius `d` is
/// wider than the cone section: `d / (2 tanθ)`.
pub fn near_field_depth(d: f64, theta: f64) -> f64 {
    d / (2.0 * theta.tan())
}

/// Conditional obstacle-position density along the axis, `f(r | ℓ) ∝ r` on
/// `[r_min, ℓ]` (obstacle centers uniform in area inside the truncated cone).
pub fn axial_position_pdf(r: f64, ell: f64, r_min: f64) -> f64 {
    if r < r_min || r > ell || ell <= r_min {
        return 0.0;
    }
    2.0 * r / (ell * ell - r_min * r_min)
}

/// E[S] for a fixed obstacle radius `d`.
fn mean_shadow_given_radius(d: f64, geo: &GeometryConfig) -> Result<f64> {
    let r_min = near_field_depth(d, geo.theta);
    let inner_tol = quad_tol();
    let over_ell = |ell: f64| -> f64 {
        if ell <= r_min {
            return 0.0;
        }
        let shadow = integrate(
            |r| partial_shadow(d, r, ell) * axial_position_pdf(r, ell, r_min),
            r_min,
            ell,
            inner_tol,
        )
        .unwrap_or(f64::NAN);
        shadow * distance_pdf(ell, geo)
    };
    let q = integrate_pieces(over_ell, &distance_breaks(geo, r_min), quad_tol())?;
    if q.value.is_nan() {
        return Err(Error::NoConvergence {
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
            iterations: 0,
        });
    }
    Ok(q.value)
}

/// Average partial blockage E[S] by nested quadrature over obstacle radius,
/// interferer distance and obstacle axial position.
pub fn mean_partial_blockage(cfg: &BlockageConfig, geo: &GeometryConfig) -> Result<f64> {
    cfg.validate()?;
    geo.validate()?;
    if cfg.d_e == cfg.d_s {
        return mean_shadow_given_radius(cfg.d_s, geo);
    }
    let width = cfg.d_e - cfg.d_s;
    let failure = RefCell::new(None);
    let value = integrate(
        |d| match mean_shadow_given_radius(d, geo) {
            Ok(v) => v / width,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        cfg.d_s,
        cfg.d_e,
        Tolerance {
            rel: 1e-8,
            ..quad_tol()
        },
    );
    let value = value?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Probability that a near-apex obstacle is wider than the cone there.
pub fn near_field_block_probability(cfg: &BlockageConfig, theta: f64) -> f64 {
    if cfg.rho == 0.0 {
        return 0.0;
    }
    let t = theta.tan();
    let v = if cfg.d_e == cfg.d_s {
        // point-mass radius: the erf difference collapses to its derivative
        -(-cfg.rho * cfg.d_s * cfg.d_s / (4.0 * t)).exp_m1()
    } else {
        let k = (cfg.rho / (4.0 * t)).sqrt();
        let bracket = erf(cfg.d_e * k) - erf(cfg.d_s * k);
        1.0 - (PI * t / cfg.rho).sqrt() / (cfg.d_e - cfg.d_s) * bracket
    };
    v.clamp(0.0, 1.0)
}

/// Probability that accumulated partial shadows block the link.
pub fn shadow_block_probability(rho: f64, delta: f64, mean_s: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let needed = (delta / (rho * mean_s).exp_m1()).ceil();
    let mean = 1.0 + delta;
    let ln_p = needed * mean.ln() - mean - ln_gamma_unchecked(needed + 1.0);
    ln_p.exp().clamp(0.0, 1.0)
}

/// Full blockage computation for one receiver location.
pub fn blockage_probability(cfg: &BlockageConfig, geo: &GeometryConfig) -> Result<BlockageResult> {
    cfg.validate()?;
    geo.validate()?;
    let mean_ell = mean_distance(geo)?;
    let mean_s = mean_partial_blockage(cfg, geo)?;
    let t = geo.theta.tan();
    let delta = 2.0 * cfg.rho * mean_ell * t;
    let p_b1 = near_field_block_probability(cfg, geo.theta);
    let p_b2 = shadow_block_probability(cfg.rho, delta, mean_s);

    let near_len = cfg.mean_radius() / (2.0 * t);
    let (raw, clamped) = if cfg.rho == 0.0 {
        (0.0, false)
    } else {
        let raw = match cfg.mode {
            CombineMode::Verbatim => p_b1 / near_len + p_b2 / (mean_ell - near_len),
            CombineMode::LengthWeighted => {
                let l1 = near_len.min(mean_ell);
                let l2 = mean_ell - l1;
                (l1 * p_b1 + l2 * p_b2) / mean_ell
            }
        };
        let out_of_range = !(0.0..=1.0).contains(&raw);
        (raw, out_of_range)
    };
    let p_b = if raw.is_nan() { 1.0 } else { raw.clamp(0.0, 1.0) };
    Ok(BlockageResult {
        p_b1,
        p_b2,
        delta,
        mean_ell,
        mean_s,
        p_b,
        mode: cfg.mode,
        clamped: clamped || raw.is_nan(),
    })
}

/// Law of the number K of active, non-blocked interferers: Binomial(N, p(1-p_b)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonBlockedCount {
    pub n: u64,
    pub success: f64,
}

impl NonBlockedCount {
    /// Probability generating function `[1 - π + π z]^N`.
    pub fn pgf(&self, z: f64) -> f64 {
        (1.0 - self.success + self.success * z).powf(self.n as f64)
    }

    pub fn mean(&self) -> f64 {
        self.n as f64 * self.success
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k > self.n {
            return 0.0;
        }
        let s = self.success;
        if s == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if s == 1.0 {
            return if k == self.n { 1.0 } else { 0.0 };
        }
        let (n, kf) = (self.n as f64, k as f64);
        let ln_choose =
            ln_gamma_unchecked(n + 1.0) - ln_gamma_unchecked(kf + 1.0) - ln_gamma_unchecked(n - kf + 1.0);
        (ln_choose + kf * s.ln() + (n - kf) * (-s).ln_1p()).exp()
    }
}

pub fn nonblocked_count_distribution(n: u64, p: f64, p_b: f64) -> Result<NonBlockedCount> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config("p", p, "must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&p_b) {
        return Err(Error::config("p_b", p_b, "must lie in [0, 1]"));
    }
    Ok(NonBlockedCount {
        n,
        success: p * (1.0 - p_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geo(v0: f64) -> GeometryConfig {
        GeometryConfig {
            radius: 10.0,
            v0_norm: v0,
            theta: 10f64.to_radians(),
            eps_min: 0.1,
        }
    }

    fn cfg(rho: f64) -> BlockageConfig {
        BlockageConfig {
            rho,
            d_s: 0.2,
            d_e: 0.8,
            mode: CombineMode::LengthWeighted,
        }
    }

    #[test]
    fn distance_pdf_values() {
        assert!((distance_pdf(5.0, &geo(0.0)) - 0.1).abs() < 1e-15);
        let want = 2.0 * 12.0 * ((25.0 - 100.0 + 144.0) / (2.0 * 12.0 * 5.0f64)).acos()
            / (PI * 100.0);
        assert!((distance_pdf(12.0, &geo(5.0)) - want).abs() < 1e-15);
        assert_eq!(distance_pdf(0.0, &geo(0.0)), 0.0);
        assert_eq!(distance_pdf(15.1, &geo(5.0)), 0.0);
    }

    #[test]
    fn distance_pdf_matches_disk_sampling() {
        // histogram of |x - v0| for x uniform in the disk vs bin-integrated pdf
        let g = geo(5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bins = 15;
        let width = g.max_distance() / bins as f64;
        let mut counts = vec![0usize; bins];
        let n = 200_000;
        for _ in 0..n {
            let r = g.radius * rng.random::<f64>().sqrt();
            let a = 2.0 * PI * rng.random::<f64>();
            let (x, y) = (r * a.cos() - g.v0_norm, r * a.sin());
            let l = x.hypot(y);
            counts[((l / width) as usize).min(bins - 1)] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            let mass = integrate(
                |l| distance_pdf(l, &g),
                i as f64 * width,
                (i + 1) as f64 * width,
                quad_tol(),
            )
            .unwrap();
            let emp = *c as f64 / n as f64;
            assert!((emp - mass).abs() < 5.0 * (mass / n as f64).sqrt() + 1e-4, "bin {i}");
        }
    }

    #[test]
    fn distance_pdf_normalizes() {
        for v0 in [0.0, 3.0, 9.0] {
            let g = geo(v0);
            let total = integrate_pieces(|l| distance_pdf(l, &g), &distance_breaks(&g, 0.0), quad_tol())
                .unwrap()
                .value;
            assert!((total - 1.0).abs() < 1e-9, "v0 = {v0}: {total}");
        }
    }

    #[test]
    fn mean_distance_closed_form() {
        assert!((mean_distance(&geo(0.0)).unwrap() - 20.0 / 3.0).abs() < 1e-9);
        let unit = GeometryConfig {
            radius: 1.0,
            eps_min: 0.01,
            ..geo(0.0)
        };
        assert!((mean_distance(&unit).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        for v0 in [1.0, 5.0, 9.5] {
            let m = mean_distance(&geo(v0)).unwrap();
            assert!(m > 0.0 && m < 10.0 + v0);
        }
    }

    #[test]
    fn shadow_at_cone_base_is_diameter() {
        assert_eq!(partial_shadow(0.4, 7.0, 7.0), 0.8);
    }

    #[test]
    fn inner_axial_integral_has_closed_form() {
        // ∫ (2dℓ/r)·2r/(ℓ²-r₀²) dr over [r₀, ℓ] = 4dℓ/(ℓ+r₀)
        let (d, ell) = (0.5, 6.0);
        let r0 = near_field_depth(d, 10f64.to_radians());
        let v = integrate(
            |r| partial_shadow(d, r, ell) * axial_position_pdf(r, ell, r0),
            r0,
            ell,
            quad_tol(),
        )
        .unwrap();
        assert!((v - 4.0 * d * ell / (ell + r0)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_radius_collapses_to_point_mass() {
        let point = BlockageConfig {
            d_s: 0.5,
            d_e: 0.5,
            ..cfg(1.0)
        };
        let narrow = BlockageConfig {
            d_s: 0.5 - 1e-6,
            d_e: 0.5 + 1e-6,
            ..cfg(1.0)
        };
        let a = mean_partial_blockage(&point, &geo(0.0)).unwrap();
        let b = mean_partial_blockage(&narrow, &geo(0.0)).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
        let p1 = near_field_block_probability(&point, 0.2);
        let p2 = near_field_block_probability(&narrow, 0.2);
        assert!((p1 - p2).abs() < 1e-9);
    }

    #[test]
    fn mean_partial_blockage_matches_sampling() {
        // sample d ~ U, ℓ ~ f_L (uniform point in the disk), r ~ f(r|ℓ) by inversion
        let (c, g) = (cfg(1.0), geo(0.0));
        let analytic = mean_partial_blockage(&c, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let d = c.d_s + (c.d_e - c.d_s) * rng.random::<f64>();
            let ell = g.radius * rng.random::<f64>().sqrt();
            let r0 = near_field_depth(d, g.theta);
            if ell <= r0 {
                continue;
            }
            let u: f64 = rng.random();
            let r = (r0 * r0 + u * (ell * ell - r0 * r0)).sqrt();
            acc += partial_shadow(d, r, ell);
        }
        let mc = acc / n as f64;
        assert!((mc - analytic).abs() < 0.01 * analytic, "mc {mc} vs {analytic}");
    }

    #[test]
    fn zero_density_means_no_blockage() {
        for mode in [CombineMode::Verbatim, CombineMode::LengthWeighted] {
            let r = blockage_probability(&BlockageConfig { mode, ..cfg(0.0) }, &geo(0.0)).unwrap();
            assert_eq!(r.p_b1, 0.0);
            assert_eq!(r.p_b, 0.0);
            assert!(!r.clamped);
        }
        // small-ρ limit of the erf bracket
        assert!(near_field_block_probability(&cfg(1e-12), 0.2) < 1e-11);
    }

    #[test]
    fn delta_closed_form() {
        let r = blockage_probability(&cfg(1.0), &geo(0.0)).unwrap();
        let want = 2.0 * (20.0 / 3.0) * 10f64.to_radians().tan();
        assert!((r.delta - want).abs() < 1e-8);
        assert!((r.delta - 2.3511).abs() < 1e-4);
    }

    #[test]
    fn near_field_probability_matches_quadrature() {
        // 1 - (1/(d_e-d_s)) ∫ exp(-ρ d²/(4 tanθ)) dd is the erf bracket's integral form
        let c = cfg(1.0);
        let t = 10f64.to_radians().tan();
        let integral = integrate(
            |d| (-c.rho * d * d / (4.0 * t)).exp(),
            c.d_s,
            c.d_e,
            quad_tol(),
        )
        .unwrap();
        let want = 1.0 - integral / (c.d_e - c.d_s);
        assert!((near_field_block_probability(&c, 10f64.to_radians()) - want).abs() < 1e-12);
    }

    #[test]
    fn probabilities_in_unit_interval() {
        for rho in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            for v0 in [0.0, 4.0, 9.0] {
                for mode in [CombineMode::Verbatim, CombineMode::LengthWeighted] {
                    let r = blockage_probability(&BlockageConfig { mode, ..cfg(rho) }, &geo(v0))
                        .unwrap();
                    for p in [r.p_b1, r.p_b2, r.p_b] {
                        assert!((0.0..=1.0).contains(&p));
                    }
                    assert!(r.delta >= 0.0);
                    assert!(r.mean_ell > 0.0 && r.mean_ell <= 10.0 + v0);
                }
            }
        }
    }

    #[test]
    fn pgf_and_limits() {
        let k = nonblocked_count_distribution(20, 1.0, 0.0).unwrap();
        assert_eq!(k.pmf(20), 1.0);
        let k = nonblocked_count_distribution(20, 0.0, 0.3).unwrap();
        assert_eq!(k.pmf(0), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let k = nonblocked_count_distribution(
                rng.random_range(0..500),
                rng.random(),
                rng.random(),
            )
            .unwrap();
            assert!((k.pgf(1.0) - 1.0).abs() < 1e-12);
            let total: f64 = (0..=k.n).map(|i| k.pmf(i)).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
        assert!(nonblocked_count_distribution(3, 1.5, 0.0).is_err());
    }

    #[test]
    fn wider_beams_are_blocked_less() {
        // the near-field depth d/(2 tanθ) shrinks as θ grows
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for deg in [2.5f64, 5.0, 10.0, 20.0, 40.0] {
            let g = GeometryConfig { theta: deg.to_radians(), ..geo(0.0) };
            let r = blockage_probability(&cfg(1.0), &g).unwrap();
            assert!(r.p_b1 <= prev.0 && r.p_b <= prev.1, "{deg} deg: {r:?}");
            prev = (r.p_b1, r.p_b);
        }
    }

    #[test]
    fn denser_obstacles_block_more() {
        let mut prev = (0.0, 0.0);
        for rho in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let verbatim = BlockageConfig { mode: CombineMode::Verbatim, ..cfg(rho) };
            let r = blockage_probability(&verbatim, &geo(0.0)).unwrap();
            assert!(r.p_b1 >= prev.0 && r.p_b >= prev.1, "rho {rho}: {r:?}");
            prev = (r.p_b1, r.p_b);
        }
        // the length-weighted combination is not monotone in ρ: p_b1 saturates
        // while the cone length that weights it stays fixed
        let at = |rho| blockage_probability(&cfg(rho), &geo(0.0)).unwrap().p_b;
        assert!(at(0.5) > at(2.0));
    }

    #[test]
    fn dense_limit_is_below_one() {
        let huge = 1e6;
        let r = blockage_probability(&BlockageConfig { mode: CombineMode::Verbatim, ..cfg(huge) }, &geo(0.0))
            .unwrap();
        // every link has a near-field blocker, but p_b2 is a single Poisson
        // mass and vanishes, so the verbatim sum tends to 1/L1
        assert!((r.p_b1 - 1.0).abs() < 1e-9 && r.p_b2 < 1e-9);
        let l1 = near_field_depth(cfg(huge).mean_radius(), geo(0.0).theta);
        assert!((r.p_b - (1.0 / l1).min(1.0)).abs() < 1e-6, "{r:?} vs {}", 1.0 / l1);
    }

    #[test]
    fn config_validation() {
        assert!(BlockageConfig { rho: -1.0, ..cfg(1.0) }.validate().is_err());
        assert!(BlockageConfig { d_s: 0.0, ..cfg(1.0) }.validate().is_err());
        assert!(BlockageConfig { d_e: 0.1, ..cfg(1.0) }.validate().is_err());
        assert!(geo(10.0).validate().is_err());
        assert!(GeometryConfig { theta: PI / 2.0, ..geo(0.0) }.validate().is_err());
    }
}
