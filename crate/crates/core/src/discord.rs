//! Gaussian quantum discord of two-mode states and the Koashi-Winter
//! consistency checks tying discord to coherent information.
//!
//! `D(A|B)` measures mode B: `D(A|B) = S_min(A|B) - S(AB) + S(B)`, where
//! `S_min(A|B)` is minimized over pure Gaussian (rank-1) measurements of B.
//! The minimum over Gaussian measurements only upper-bounds the true discord.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::info::{entropic_record, Bipartition};
use crate::symplectic::{check_physical, h_entropy, seed_matrix, CovMatrix, Dyne};

/// Range of `log10(squeeze)` scanned by the coarse grid.
pub const LOG_SQUEEZE_MAX: f64 = 3.0;
/// Number of squeezing samples on the coarse grid (log spaced, includes 1).
pub const SQUEEZE_POINTS: usize = 25;
/// Number of orientation samples on the coarse grid over `[0, pi)`.
pub const ANGLE_POINTS: usize = 16;
const REFINE_ROUNDS: usize = 3;
const GOLDEN_TOL: f64 = 1e-8;

/// Pure single-mode Gaussian seed defining a rank-1 measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyneSeed {
    /// Ratio of the seed's variances; 1 is heterodyne, the limits 0 and
    /// infinity are homodynes.
    pub squeeze: f64,
    /// Orientation in `[0, pi)`.
    pub angle: f64,
}

impl DyneSeed {
    pub fn heterodyne() -> Self {
        Self { squeeze: 1.0, angle: 0.0 }
    }

    pub fn dyne(&self) -> Dyne {
        Dyne::Seeded { squeeze: self.squeeze, angle: self.angle }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    /// Gaussian discord in bits, clamped at zero.
    pub discord: f64,
    pub minimizing_seed: DyneSeed,
    /// `S_min(unmeasured | measured)` over Gaussian rank-1 measurements.
    pub conditional_entropy_min: f64,
}

/// Conditional entropy of one mode given a seeded measurement of the other,
/// specialized to 2x2 blocks.
struct ConditionalEntropy {
    va: Matrix2<f64>,
    vb: Matrix2<f64>,
    c: Matrix2<f64>,
}

impl ConditionalEntropy {
    fn new(v: &CovMatrix, measured: usize) -> Self {
        let other = 1 - measured;
        Self { va: v.block(other, other), vb: v.block(measured, measured), c: v.block(other, measured) }
    }

    fn at_seed(&self, seed: &Matrix2<f64>) -> f64 {
        let inv = (self.vb + seed).try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
        let cond = self.va - self.c * inv * self.c.transpose();
        let nu = cond.determinant().max(0.0).sqrt();
        // nu < 1 only through rounding for physical input
        h_entropy(nu.max(1.0)).unwrap_or(f64::NAN)
    }

    fn at(&self, frame: &Matrix2<f64>, log_squeeze: f64, angle: f64) -> f64 {
        self.at_seed(&frame_seed(frame, log_squeeze, angle))
    }
}

/// Seed `F s(l, a) F^T`; `F` is a one-mode symplectic (unit determinant).
fn frame_seed(frame: &Matrix2<f64>, log_squeeze: f64, angle: f64) -> Matrix2<f64> {
    frame * seed_matrix(10f64.powf(log_squeeze), angle) * frame.transpose()
}

/// Symplectic `F` with `V = nu F F^T`, so seeds drawn in that frame see the
/// measured marginal as thermal. Strong local squeezing otherwise compresses
/// the objective into narrow angular valleys the coarse grid can miss.
fn normalizing_frame(vb: &Matrix2<f64>) -> Matrix2<f64> {
    let nu = vb.determinant().max(f64::MIN_POSITIVE).sqrt();
    let eig = (vb / nu).symmetric_eigen();
    let root = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    eig.eigenvectors * Matrix2::from_diagonal(&root) * eig.eigenvectors.transpose()
}

/// Express a pure seed matrix as `(squeeze <= 1, angle)`.
fn seed_params(seed: &Matrix2<f64>) -> DyneSeed {
    let eig = seed.symmetric_eigen();
    let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let v = eig.eigenvectors.column(k);
    DyneSeed { squeeze: eig.eigenvalues[k], angle: v[1].atan2(v[0]).rem_euclid(PI) }
}

/// `S(unmeasured | outcome)` after measuring `measured` with the given seed.
pub fn conditional_entropy(v: &CovMatrix, measured: usize, seed: DyneSeed) -> Result<f64> {
    check_two_mode(v, measured)?;
    let f = ConditionalEntropy::new(v, measured);
    Ok(f.at(&Matrix2::identity(), seed.squeeze.log10(), seed.angle))
}

fn check_two_mode(v: &CovMatrix, measured: usize) -> Result<()> {
    if v.n_modes() != 2 || measured > 1 {
        return Err(Error::InvalidModes(format!(
            "discord needs a two-mode state and measured mode 0 or 1 (got {} modes, mode {measured})",
            v.n_modes()
        )));
    }
    let phys = check_physical(v);
    if !phys.physical {
        return Err(Error::Unphysical { min_nu: phys.min_nu });
    }
    Ok(())
}

/// Golden-section minimization of `f` on `[lo, hi]`; returns the best point seen.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid cells refined after the coarse scan.
const REFINE_STARTS: usize = 4;

/// Gaussian discord with `measured` the measured mode: `D(other | measured)`.
///
/// Coarse grid over `log10(squeeze)` in `[-3, 3]` and 16 orientations, run
/// both in the lab frame and in the frame where the measured marginal is
/// thermal. The best few cells then get three rounds of per-coordinate
/// golden-section refinement.
pub fn gaussian_discord(v: &CovMatrix, measured: usize) -> Result<DiscordResult> {
    check_two_mode(v, measured)?;
    let f = ConditionalEntropy::new(v, measured);
    let frames = [Matrix2::identity(), normalizing_frame(&f.vb)];

    let step_l = 2.0 * LOG_SQUEEZE_MAX / (SQUEEZE_POINTS - 1) as f64;
    let step_a = PI / ANGLE_POINTS as f64;
    // (value, frame, log squeeze, angle)
    let mut cells = Vec::with_capacity(2 * SQUEEZE_POINTS * ANGLE_POINTS);
    for (fi, frame) in frames.iter().enumerate() {
        for i in 0..SQUEEZE_POINTS {
            let l = -LOG_SQUEEZE_MAX + step_l * i as f64;
            for k in 0..ANGLE_POINTS {
                let a = step_a * k as f64;
                let val = f.at(frame, l, a);
                if val.is_finite() {
                    cells.push((val, fi, l, a));
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Numerical("conditional entropy is not finite on the grid".into()));
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best = cells[0];
    for &start in cells.iter().take(REFINE_STARTS) {
        let cand = refine(&f, &frames[start.1], start, step_l, step_a);
        if cand.0 < best.0 {
            best = cand;
        }
    }

    let rec = entropic_record(v, &Bipartition::two_mode())?;
    let s_measured = if measured == 0 { rec.s_a } else { rec.s_b };
    let discord = (best.0 - rec.s_ab + s_measured).max(0.0);
    Ok(DiscordResult {
        discord,
        minimizing_seed: seed_params(&frame_seed(&frames[best.1], best.2, best.3)),
        conditional_entropy_min: best.0,
    })
}

fn refine(
    f: &ConditionalEntropy,
    frame: &Matrix2<f64>,
    start: (f64, usize, f64, f64),
    step_l: f64,
    step_a: f64,
) -> (f64, usize, f64, f64) {
    let mut best = start;
    for _ in 0..REFINE_ROUNDS {
        let before = best.0;
        let (l0, a0) = (best.2, best.3);
        let lo = (l0 - step_l).max(-LOG_SQUEEZE_MAX);
        let hi = (l0 + step_l).min(LOG_SQUEEZE_MAX);
        let (l, val) = golden_section(|l| f.at(frame, l, a0), lo, hi);
        if val < best.0 {
            best = (val, best.1, l, a0);
        }
        let l0 = best.2;
        let (a, val) = golden_section(|a| f.at(frame, l0, a), a0 - step_a, a0 + step_a);
        if val < best.0 {
            best = (val, best.1, l0, a);
        }
        if before - best.0 < 1e-12 {
            break;
        }
    }
    best
}

/// Discord `D(B|A)` of the EPR state `V(mu)` after a pure-loss channel of
/// transmissivity `tau`: `h(mu) - h(tau + (1 - tau) mu)`.
pub fn discord_closed_form_epr_loss(mu: f64, tau: f64) -> Result<f64> {
    if !(mu >= 1.0) || !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("need mu >= 1 and tau in [0, 1], got mu = {mu}, tau = {tau}")));
    }
    Ok(h_entropy(mu)? - h_entropy(tau + (1.0 - tau) * mu)?)
}

/// Both discords and coherent informations of a two-mode state.
///
/// `d_ab = D(A|B)` (mode 1 measured) pairs with `ic_fwd = I_c(A>B)`, and
/// `d_ba = D(B|A)` with `ic_bwd = I_c(B>A)`. The Koashi-Winter relation gives
/// `D = I_c + E_f >= max{0, I_c}`, so both gaps must be nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordBounds {
    pub d_ab: f64,
    pub d_ba: f64,
    pub ic_fwd: f64,
    pub ic_bwd: f64,
    /// `d_ab - max{0, ic_fwd}`.
    pub gap_ab: f64,
    /// `d_ba - max{0, ic_bwd}`.
    pub gap_ba: f64,
    /// `d_ab - ic_fwd`, the entanglement of formation implied between A and
    /// the purifying system.
    pub ef_ab_implied: f64,
    /// `d_ba - ic_bwd`.
    pub ef_ba_implied: f64,
}

pub fn discord_coherent_bounds(v: &CovMatrix) -> Result<DiscordBounds> {
    let d_ab = gaussian_discord(v, 1)?.discord;
    let d_ba = gaussian_discord(v, 0)?.discord;
    let rec = entropic_record(v, &Bipartition::two_mode())?;
    let (ic_fwd, ic_bwd) = (rec.ic_forward(), rec.ic_backward());
    Ok(DiscordBounds {
        d_ab,
        d_ba,
        ic_fwd,
        ic_bwd,
        gap_ab: d_ab - ic_fwd.max(0.0),
        gap_ba: d_ba - ic_bwd.max(0.0),
        ef_ab_implied: d_ab - ic_fwd,
        ef_ba_implied: d_ba - ic_bwd,
    })
}
