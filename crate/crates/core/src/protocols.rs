//! End-to-end evaluators for the two Gaussian protocols.
//!
//! * The device-dependent protocol: Alice prepares a (possibly separable)
//!   two-mode state `V_Aa`, sends mode `a` through an entangling cloner
//!   (beam splitter of transmissivity `tau` mixing `a` with one arm of Eve's
//!   EPR state `V(omega)`), and both parties heterodyne.
//! * The ideal EPR protocol over a pure-loss channel.
//!
//! Finite-modulation rates always come from the generic covariance-matrix
//! pipeline. The closed-form spectra and the large-modulation rates are
//! exposed separately and serve as independent cross-checks.

use std::f64::consts::E;

use crate::discord::{discord_closed_form_epr_loss, gaussian_discord};
use crate::error::{Error, Result, Security};
use crate::info::{classical_mi_heterodyne, conditional_qmi, holevo_information, subsystem_entropy};
use crate::symplectic::{
    apply_beam_splitter, dyne_condition, h_entropy, max_physical_g, ppt_separable_two_mode, purify,
    symplectic_eigenvalues, validate_modes, CorrelationForm, CovMatrix, Dyne, PHYSICAL_TOL,
};

/// Mode indices of the four-mode global state `(A, B, E, E')`.
pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_E: usize = 2;
pub const MODE_E_PRIME: usize = 3;
/// Eve's memory `(E, E')`.
pub const EVE: [usize; 2] = [MODE_E, MODE_E_PRIME];
/// Purifying modes of the trusted noise in the six-mode state from
/// [`trusted_noise_global_cm`].
pub const TRUSTED_P: [usize; 2] = [4, 5];

/// Alice's input state parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub mu: f64,
    pub g: f64,
    pub form: CorrelationForm,
}

impl ProtocolParams {
    pub fn new(mu: f64, g: f64, form: CorrelationForm) -> Result<Self> {
        if !(mu >= 1.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("mu must be >= 1, got {mu}")));
        }
        let bound = max_physical_g(mu, form);
        if !g.is_finite() || g.abs() > bound + PHYSICAL_TOL {
            return Err(Error::Domain(format!("|g| = {} exceeds the physical bound {bound}", g.abs())));
        }
        Ok(Self { mu, g, form })
    }

    /// Strongest separable correlation, `g = mu - 1`.
    pub fn max_separable(mu: f64, form: CorrelationForm) -> Result<Self> {
        Self::new(mu, mu - 1.0, form)
    }

    /// Pure input, `g = sqrt(mu^2 - 1)` with the `Z` form.
    pub fn pure(mu: f64) -> Result<Self> {
        Self::new(mu, (mu * mu - 1.0).max(0.0).sqrt(), CorrelationForm::Z)
    }

    pub fn is_separable(&self) -> bool {
        self.g.abs() <= self.mu - 1.0 + PHYSICAL_TOL
    }

    pub fn input_state(&self) -> CovMatrix {
        CovMatrix::input_pair(self.mu, self.g, self.form).expect("validated parameters")
    }
}

/// Entangling-cloner parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackParams {
    pub tau: f64,
    pub omega: f64,
}

impl AttackParams {
    pub fn new(tau: f64, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("tau must lie in [0, 1], got {tau}")));
        }
        if !(omega >= 1.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be >= 1, got {omega}")));
        }
        Ok(Self { tau, omega })
    }

    pub fn pure_loss(tau: f64) -> Result<Self> {
        Self::new(tau, 1.0)
    }
}

/// Global CM over `(A, B, E, E')`: the input pair tensored with `V(omega)`,
/// then a beam splitter on the signal and Eve's injected mode.
pub fn build_global_cm(p: &ProtocolParams, a: &AttackParams) -> Result<CovMatrix> {
    let v = p.input_state().direct_sum(&CovMatrix::epr(a.omega)?);
    // modes are now (A, a, e, E'); the splitter maps (a, e) -> (B, E)
    apply_beam_splitter(&v, 1, 2, a.tau)
}

/// Six-mode pure state `(A, B, E, E', P1, P2)` in which `P` purifies the
/// trusted preparation noise of `V_Aa`.
pub fn trusted_noise_global_cm(p: &ProtocolParams, a: &AttackParams) -> Result<CovMatrix> {
    let phi = purify(&p.input_state())?; // (A, a, P1, P2)
    let v = phi.direct_sum(&CovMatrix::epr(a.omega)?); // (A, a, P1, P2, e, E')
    let v = apply_beam_splitter(&v, 1, 4, a.tau)?;
    v.reduced(&[0, 1, 4, 5, 2, 3])
}

/// Scalar quantities appearing in the closed-form description of the
/// entangling-cloner output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolTerms {
    pub nu_b: f64,
    pub nu_b_given_x: f64,
    pub epsilon: f64,
    pub nu_e: f64,
    pub gamma: f64,
    pub delta: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ProtocolTerms {
    pub fn new(p: &ProtocolParams, a: &AttackParams) -> Self {
        let (mu, g, tau, w) = (p.mu, p.g, a.tau, a.omega);
        let g2 = g * g;
        let nu_b = tau * mu + (1.0 - tau) * w;
        let alpha = (1.0 - tau) * (mu - w);
        let beta = tau + (1.0 - tau) * mu * w;
        Self {
            nu_b,
            nu_b_given_x: nu_b - tau * g2 / (mu + 1.0),
            epsilon: mu - 1.0 - g2 / (mu + 1.0),
            nu_e: tau * w + (1.0 - tau) * mu,
            gamma: (tau * (1.0 - tau)).sqrt() * (w - mu),
            delta: (1.0 - tau).sqrt() * (w * w - 1.0).sqrt(),
            kappa: (tau * (w * w - 1.0)).sqrt(),
            alpha,
            beta,
            theta: (1.0 - tau) * g2 - (mu + 1.0) * alpha,
            phi: (mu + 1.0) * beta - (1.0 - tau) * w * g2,
        }
    }
}

/// Symplectic spectra of Eve's memory: unconditioned, given Bob's
/// heterodyne record `Y`, and given Alice's record `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveSpectra {
    pub nu_e_plus: f64,
    pub nu_e_minus: f64,
    pub nu_ey_plus: f64,
    pub nu_ey_minus: f64,
    pub nu_ex_plus: f64,
    pub nu_ex_minus: f64,
}

impl EveSpectra {
    fn sorted(a: f64, b: f64) -> [f64; 2] {
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    /// The three spectra as ascending pairs, for comparison with the generic
    /// pipeline.
    pub fn as_sorted(&self) -> [[f64; 2]; 3] {
        [
            Self::sorted(self.nu_e_plus, self.nu_e_minus),
            Self::sorted(self.nu_ey_plus, self.nu_ey_minus),
            Self::sorted(self.nu_ex_plus, self.nu_ex_minus),
        ]
    }
}

/// Eve's spectra from the alpha, beta, theta, phi closed forms.
pub fn eve_spectra_closed_form(p: &ProtocolParams, a: &AttackParams) -> EveSpectra {
    let t = ProtocolTerms::new(p, a);
    let (mu, tau, w) = (p.mu, a.tau, a.omega);
    let root_e = (t.alpha * t.alpha + 4.0 * t.beta).sqrt();
    let root_x = (t.theta * t.theta + 4.0 * (mu + 1.0) * t.phi).sqrt();
    EveSpectra {
        nu_e_plus: 0.5 * (root_e + t.alpha),
        nu_e_minus: 0.5 * (root_e - t.alpha),
        nu_ey_plus: (mu + t.beta) / (1.0 + mu * tau + (1.0 - tau) * w),
        nu_ey_minus: 1.0,
        nu_ex_plus: (root_x + t.theta) / (2.0 * (mu + 1.0)),
        nu_ex_minus: (root_x - t.theta) / (2.0 * (mu + 1.0)),
    }
}

/// Eve's spectra computed by conditioning the global CM. Each pair is
/// ascending, so the `plus`/`minus` labels hold the larger/smaller value.
pub fn eve_spectra_generic(p: &ProtocolParams, a: &AttackParams) -> Result<EveSpectra> {
    let v = build_global_cm(p, a)?;
    let pair = |cm: &CovMatrix| -> (f64, f64) {
        let nu = symplectic_eigenvalues(cm);
        (nu[1], nu[0])
    };
    let (e_hi, e_lo) = pair(&v.reduced(&EVE)?);
    let given_y = dyne_condition(&v.reduced(&[MODE_B, MODE_E, MODE_E_PRIME])?, &[0], Dyne::Heterodyne)?;
    let (y_hi, y_lo) = pair(&given_y);
    let given_x = dyne_condition(&v.reduced(&[MODE_A, MODE_E, MODE_E_PRIME])?, &[0], Dyne::Heterodyne)?;
    let (x_hi, x_lo) = pair(&given_x);
    Ok(EveSpectra {
        nu_e_plus: e_hi,
        nu_e_minus: e_lo,
        nu_ey_plus: y_hi,
        nu_ey_minus: y_lo,
        nu_ex_plus: x_hi,
        nu_ex_minus: x_lo,
    })
}

/// All entropic quantities of one parameter point of the device-dependent
/// protocol, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    pub params: ProtocolParams,
    pub attack: AttackParams,
    pub separable: bool,
    /// Shannon information between the heterodyne records `X` and `Y`.
    pub i_xy: f64,
    /// Eve's Holevo information on `X`.
    pub holevo_x: f64,
    /// Eve's Holevo information on `Y`.
    pub holevo_y: f64,
    /// Direct reconciliation `K(Y|X) = I(X,Y) - I(E,X)`.
    pub k_dr: f64,
    /// Reverse reconciliation `K(X|Y) = I(X,Y) - I(E,Y)`.
    pub k_rr: f64,
    pub spectra: EveSpectra,
    pub terms: ProtocolTerms,
}

pub fn key_rates(p: &ProtocolParams, a: &AttackParams) -> Result<KeyRateReport> {
    let v = build_global_cm(p, a)?;
    let i_xy = classical_mi_heterodyne(&v.reduced(&[MODE_A, MODE_B])?)?;
    let holevo_x = holevo_information(&v, &EVE, MODE_A, Dyne::Heterodyne)?;
    let holevo_y = holevo_information(&v, &EVE, MODE_B, Dyne::Heterodyne)?;
    Ok(KeyRateReport {
        params: *p,
        attack: *a,
        separable: p.is_separable(),
        i_xy,
        holevo_x,
        holevo_y,
        k_dr: i_xy - holevo_x,
        k_rr: i_xy - holevo_y,
        spectra: eve_spectra_closed_form(p, a),
        terms: ProtocolTerms::new(p, a),
    })
}

/// Large-modulation rates for `g = mu - 1`, `mu -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRates {
    /// Common term `R(tau, omega)`.
    pub r: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub k_dr_inf: f64,
    pub k_rr_inf: f64,
    /// Set at `tau = 0` or `tau = 1`, where the rates are reported as
    /// `-inf` or `+inf`.
    pub divergent: bool,
}

pub fn asymptotic_rates(tau: f64, omega: f64) -> Result<AsymptoticRates> {
    AttackParams::new(tau, omega)?;
    let w = omega;
    let s = ((w + 3.0).powi(2) + tau * tau * (w - 3.0).powi(2) - 2.0 * tau * (w * w + 7.0)).max(0.0).sqrt();
    let d = (1.0 - tau) * (w - 3.0);
    let (xi_plus, xi_minus) = (0.5 * (s + d), 0.5 * (s - d));
    if tau == 0.0 || tau == 1.0 {
        let inf = if tau == 1.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(AsymptoticRates { r: inf, xi_plus, xi_minus, k_dr_inf: inf, k_rr_inf: inf, divergent: true });
    }
    let r = (2.0 * tau / (E * (1.0 - tau) * (1.0 + 3.0 * tau + (1.0 - tau) * w))).log2() - h_entropy(w)?;
    Ok(AsymptoticRates {
        r,
        xi_plus,
        xi_minus,
        k_dr_inf: r + h_entropy(xi_plus)? + h_entropy(xi_minus)?,
        k_rr_inf: r + h_entropy((1.0 + (1.0 - tau) * w) / tau)?,
        divergent: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconciliation {
    /// Key from Alice's record (forward).
    Direct,
    /// Key from Bob's record (backward).
    Reverse,
}

/// How rates are evaluated when scanning `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMode {
    Asymptotic,
    /// Generic pipeline at modulation `mu` with `g = mu - 1`, `Z` form.
    Finite { mu: f64 },
}

/// Key rate of the separable protocol at maximal separable correlation.
pub fn rate_at(tau: f64, omega: f64, rec: Reconciliation, mode: RateMode) -> Result<f64> {
    match mode {
        RateMode::Asymptotic => {
            let r = asymptotic_rates(tau, omega)?;
            Ok(match rec {
                Reconciliation::Direct => r.k_dr_inf,
                Reconciliation::Reverse => r.k_rr_inf,
            })
        }
        RateMode::Finite { mu } => {
            let rep = key_rates(&ProtocolParams::max_separable(mu, CorrelationForm::Z)?, &AttackParams::new(tau, omega)?)?;
            Ok(match rec {
                Reconciliation::Direct => rep.k_dr,
                Reconciliation::Reverse => rep.k_rr,
            })
        }
    }
}

/// Lower end of the transmissivity bracket searched by [`find_threshold`].
pub const THRESHOLD_TAU_LO: f64 = 0.01;
pub const THRESHOLD_TAU_HI: f64 = 0.999;
const THRESHOLD_TOL: f64 = 1e-6;
const THRESHOLD_PROBE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub tau_star: f64,
    /// Rate at `tau_star - 1e-4`.
    pub rate_below: f64,
    /// Rate at `tau_star + 1e-4`.
    pub rate_above: f64,
}

/// Minimum transmissivity for a positive key, by bisection on
/// `[0.01, 0.999]` down to a bracket of `1e-6`.
pub fn find_threshold(omega: f64, rec: Reconciliation, mode: RateMode) -> Result<Threshold> {
    let f = |t: f64| rate_at(t, omega, rec, mode);
    let (mut lo, mut hi) = (THRESHOLD_TAU_LO, THRESHOLD_TAU_HI);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    match (f_lo > 0.0, f_hi > 0.0) {
        (true, true) => return Err(Error::NoSignChange(Security::AlwaysSecure)),
        (false, false) => return Err(Error::NoSignChange(Security::NeverSecure)),
        (true, false) => return Err(Error::Numerical("key rate decreases with transmissivity".into())),
        (false, true) => {}
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau_star = 0.5 * (lo + hi);
    let rate_below = f((tau_star - THRESHOLD_PROBE).max(0.0))?;
    let rate_above = f((tau_star + THRESHOLD_PROBE).min(1.0))?;
    if !(rate_below < 0.0 && rate_above > 0.0) {
        return Err(Error::Numerical(format!(
            "threshold {tau_star} not bracketed: rates {rate_below}, {rate_above}"
        )));
    }
    Ok(Threshold { tau_star, rate_below, rate_above })
}

/// Devetak-Winter rate with heterodyne encoding.
///
/// Forward: `I(bob, X) - I(eve, X)` with `X` from the single mode in `alice`.
/// Backward: `I(alice, Y) - I(eve, Y)` with `Y` from the single mode in `bob`.
/// The decoding side may hold several modes.
pub fn dw_rates(
    global: &CovMatrix,
    alice: &[usize],
    bob: &[usize],
    eve: &[usize],
    rec: Reconciliation,
) -> Result<f64> {
    let all: Vec<usize> = alice.iter().chain(bob).chain(eve).copied().collect();
    validate_modes(&all, global.n_modes())?;
    if eve.is_empty() {
        return Err(Error::InvalidModes("eve holds no modes".into()));
    }
    let (encoder, decoder) = match rec {
        Reconciliation::Direct => (alice, bob),
        Reconciliation::Reverse => (bob, alice),
    };
    let [x] = encoder else {
        return Err(Error::InvalidModes(format!("the encoding side must be a single mode, got {encoder:?}")));
    };
    if decoder.is_empty() {
        return Err(Error::InvalidModes("decoding side holds no modes".into()));
    }
    Ok(holevo_information(global, decoder, *x, Dyne::Heterodyne)? - holevo_information(global, eve, *x, Dyne::Heterodyne)?)
}

/// Trusted-noise bound chain for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    /// `I_c(A>B)`.
    pub ic_fwd: f64,
    /// `I_c(B>A)`.
    pub ic_bwd: f64,
    /// `I(A, P | B)`.
    pub qmi_ap_given_b: f64,
    /// `I(B, P | A)`.
    pub qmi_bp_given_a: f64,
    pub upper_fwd: f64,
    pub upper_bwd: f64,
    /// `2 min{S(P), S(AB)}`.
    pub cap: f64,
    /// DW rates against Eve holding `(E, E')`.
    pub dw_fwd: f64,
    pub dw_bwd: f64,
    /// DW rates against Eve holding `(E, E', P)`.
    pub dw_fwd_eve_p: f64,
    pub dw_bwd_eve_p: f64,
    /// DW rates with `P` handed to the decoder (Bob forward, Alice backward).
    pub dw_fwd_decoder_p: f64,
    pub dw_bwd_decoder_p: f64,
    pub s_p: f64,
    pub s_ab: f64,
    /// `S(E E' P)`, equal to `S(AB)` by purity.
    pub s_eve_p: f64,
    /// `max |nu - 1|` over the six-mode global spectrum.
    pub purity_defect: f64,
}

pub fn device_dependent_bounds(p: &ProtocolParams, a: &AttackParams) -> Result<BoundsReport> {
    let v = trusted_noise_global_cm(p, a)?;
    let purity_defect = symplectic_eigenvalues(&v).into_iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let (ma, mb) = ([MODE_A], [MODE_B]);
    let s_a = subsystem_entropy(&v, &ma)?;
    let s_b = subsystem_entropy(&v, &mb)?;
    let s_ab = subsystem_entropy(&v, &[MODE_A, MODE_B])?;
    let s_p = subsystem_entropy(&v, &TRUSTED_P)?;
    let eve_p = [MODE_E, MODE_E_PRIME, TRUSTED_P[0], TRUSTED_P[1]];
    let s_eve_p = subsystem_entropy(&v, &eve_p)?;
    let ic_fwd = s_b - s_ab;
    let ic_bwd = s_a - s_ab;
    let qmi_ap_given_b = conditional_qmi(&v, &ma, &TRUSTED_P, &mb)?;
    let qmi_bp_given_a = conditional_qmi(&v, &mb, &TRUSTED_P, &ma)?;
    let bp = [MODE_B, TRUSTED_P[0], TRUSTED_P[1]];
    let ap = [MODE_A, TRUSTED_P[0], TRUSTED_P[1]];
    use Reconciliation::{Direct, Reverse};
    Ok(BoundsReport {
        ic_fwd,
        ic_bwd,
        qmi_ap_given_b,
        qmi_bp_given_a,
        upper_fwd: ic_fwd + qmi_ap_given_b,
        upper_bwd: ic_bwd + qmi_bp_given_a,
        cap: 2.0 * s_p.min(s_ab),
        dw_fwd: dw_rates(&v, &ma, &mb, &EVE, Direct)?,
        dw_bwd: dw_rates(&v, &ma, &mb, &EVE, Reverse)?,
        dw_fwd_eve_p: dw_rates(&v, &ma, &mb, &eve_p, Direct)?,
        dw_bwd_eve_p: dw_rates(&v, &ma, &mb, &eve_p, Reverse)?,
        dw_fwd_decoder_p: dw_rates(&v, &ma, &bp, &EVE, Direct)?,
        dw_bwd_decoder_p: dw_rates(&v, &ap, &mb, &EVE, Reverse)?,
        s_p,
        s_ab,
        s_eve_p,
        purity_defect,
    })
}

/// Three-mode state `(A, B, E)` of the EPR protocol: `V(mu)` with the signal
/// arm sent through a pure-loss beam splitter against a vacuum ancilla.
pub fn epr_pure_loss_global_cm(mu: f64, tau: f64) -> Result<CovMatrix> {
    AttackParams::pure_loss(tau)?;
    let v = CovMatrix::epr(mu)?.direct_sum(&CovMatrix::vacuum(1));
    apply_beam_splitter(&v, 1, 2, tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprLossReport {
    pub mu: f64,
    pub tau: f64,
    /// Backward DW rate `I(A,Y) - I(E,Y)` with heterodyne at Bob.
    pub k_rr_dw: f64,
    /// Gaussian discord `D(B|A)` (Alice's mode measured).
    pub discord_ba: f64,
    pub discord_closed_form: f64,
    /// `I_c(B>A) = S(A) - S(AB)`.
    pub ic_bwd: f64,
    /// `E_f(B, E) = 0` certified by the PPT criterion on the channel outputs.
    pub ef_be_zero_certified: bool,
    pub nu_tilde_min_be: f64,
}

pub fn epr_pure_loss_report(mu: f64, tau: f64) -> Result<EprLossReport> {
    let v = epr_pure_loss_global_cm(mu, tau)?;
    let vab = v.reduced(&[MODE_A, MODE_B])?;
    let k_rr_dw = dw_rates(&v, &[MODE_A], &[MODE_B], &[MODE_E], Reconciliation::Reverse)?;
    let discord_ba = gaussian_discord(&vab, MODE_A)?.discord;
    let ic_bwd = subsystem_entropy(&v, &[MODE_A])? - subsystem_entropy(&v, &[MODE_A, MODE_B])?;
    let ppt = ppt_separable_two_mode(&v.reduced(&[MODE_B, MODE_E])?)?;
    Ok(EprLossReport {
        mu,
        tau,
        k_rr_dw,
        discord_ba,
        discord_closed_form: discord_closed_form_epr_loss(mu, tau)?,
        ic_bwd,
        ef_be_zero_certified: ppt.separable,
        nu_tilde_min_be: ppt.nu_tilde_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::StateSampler;
    use crate::symplectic::check_physical;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2;

    fn z() -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }

    #[test]
    fn parameter_validation() {
        assert!(ProtocolParams::new(0.5, 0.0, CorrelationForm::Z).is_err());
        assert!(ProtocolParams::new(2.0, 1.8, CorrelationForm::Z).is_err());
        assert!(ProtocolParams::new(2.0, 1.5, CorrelationForm::I).is_err());
        assert!(ProtocolParams::pure(3.0).unwrap().g > 2.0);
        assert!(!ProtocolParams::pure(3.0).unwrap().is_separable());
        assert!(ProtocolParams::max_separable(3.0, CorrelationForm::I).unwrap().is_separable());
        assert!(AttackParams::new(1.1, 1.0).is_err());
        assert!(AttackParams::new(0.5, 0.9).is_err());
    }

    #[test]
    fn global_cm_matches_displayed_blocks() {
        let p = ProtocolParams::new(2.0, 1.0, CorrelationForm::Z).unwrap();
        let a = AttackParams::new(0.5, 1.2).unwrap();
        let v = build_global_cm(&p, &a).unwrap();
        let t = ProtocolTerms::new(&p, &a);
        let (tau, w, mu) = (0.5f64, 1.2f64, 2.0f64);
        assert_abs_diff_eq!(t.gamma, (tau * (1.0 - tau)).sqrt() * (w - mu), epsilon = 1e-15);
        assert_abs_diff_eq!(t.delta, (1.0 - tau).sqrt() * (w * w - 1.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.kappa, (tau * (w * w - 1.0)).sqrt(), epsilon = 1e-15);
        let g = z() * 1.0;
        let i = Matrix2::identity();
        let expected = [
            [i * mu, g * tau.sqrt(), -g * (1.0 - tau).sqrt(), Matrix2::zeros()],
            [g * tau.sqrt(), i * t.nu_b, i * t.gamma, z() * t.delta],
            [-g * (1.0 - tau).sqrt(), i * t.gamma, i * t.nu_e, z() * t.kappa],
            [Matrix2::zeros(), z() * t.delta, z() * t.kappa, i * w],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_abs_diff_eq!((v.block(r, c) - expected[r][c]).amax(), 0.0, epsilon = 1e-12);
            }
        }
        // Eve's reduction keeps nu_E I, omega I and kappa Z
        let eve = v.reduced(&EVE).unwrap();
        assert_abs_diff_eq!(eve.block(0, 1)[(1, 1)], -t.kappa, epsilon = 1e-12);
    }

    #[test]
    fn full_transmission_leaves_eve_with_her_epr() {
        let p = ProtocolParams::new(3.0, 2.0, CorrelationForm::I).unwrap();
        let a = AttackParams::new(1.0, 2.0).unwrap();
        let v = build_global_cm(&p, &a).unwrap();
        assert_abs_diff_eq!((v.block(1, 1) - Matrix2::identity() * 3.0).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((v.block(0, 1) - Matrix2::identity() * 2.0).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((v.reduced(&EVE).unwrap().matrix() - CovMatrix::epr(2.0).unwrap().matrix()).amax(), 0.0, epsilon = 1e-15);
        let s = eve_spectra_closed_form(&p, &a);
        assert_abs_diff_eq!(s.nu_e_plus, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.nu_e_minus, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_spectra_match_pipeline() {
        let mut s = StateSampler::new(99);
        for _ in 0..100 {
            let mu = s.uniform(1.0, 50.0);
            let g = s.uniform(-(mu - 1.0), mu - 1.0);
            let form = if s.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
            let p = ProtocolParams::new(mu, g, form).unwrap();
            let a = AttackParams::new(s.uniform(0.05, 0.95), s.uniform(1.0, 5.0)).unwrap();
            let closed = eve_spectra_closed_form(&p, &a).as_sorted();
            let generic = eve_spectra_generic(&p, &a).unwrap().as_sorted();
            for k in 0..3 {
                for j in 0..2 {
                    assert_abs_diff_eq!(closed[k][j], generic[k][j], epsilon = 1e-9);
                }
            }
            assert_abs_diff_eq!(generic[1][0], 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn key_rates_small_example() {
        let p = ProtocolParams::new(2.0, 1.0, CorrelationForm::Z).unwrap();
        let a = AttackParams::new(0.5, 1.0).unwrap();
        let r = key_rates(&p, &a).unwrap();
        assert_abs_diff_eq!(r.i_xy, (2.5f64 / (1.5 - 0.5 / 3.0 + 1.0)).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.k_dr, r.i_xy - r.holevo_x, epsilon = 1e-15);
        assert_abs_diff_eq!(r.k_rr, r.i_xy - r.holevo_y, epsilon = 1e-15);
        // Holevo terms against the closed-form spectra
        let sp = r.spectra;
        let s_e = h_entropy(sp.nu_e_plus).unwrap() + h_entropy(sp.nu_e_minus).unwrap();
        let s_ex = h_entropy(sp.nu_ex_plus).unwrap() + h_entropy(sp.nu_ex_minus).unwrap();
        let s_ey = h_entropy(sp.nu_ey_plus).unwrap();
        assert_abs_diff_eq!(r.holevo_x, s_e - s_ex, epsilon = 1e-9);
        assert_abs_diff_eq!(r.holevo_y, s_e - s_ey, epsilon = 1e-9);
    }

    #[test]
    fn forms_give_identical_rates() {
        for (mu, g, tau, w) in [(5.0, 4.0, 0.7, 1.3), (20.0, 12.0, 0.4, 2.0)] {
            let a = AttackParams::new(tau, w).unwrap();
            let ri = key_rates(&ProtocolParams::new(mu, g, CorrelationForm::I).unwrap(), &a).unwrap();
            let rz = key_rates(&ProtocolParams::new(mu, g, CorrelationForm::Z).unwrap(), &a).unwrap();
            assert_abs_diff_eq!(ri.k_dr, rz.k_dr, epsilon = 1e-9);
            assert_abs_diff_eq!(ri.k_rr, rz.k_rr, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_correlation_gives_no_key() {
        for tau in [0.1, 0.5, 0.9, 1.0] {
            for w in [1.0, 1.5, 3.0] {
                let r = key_rates(&ProtocolParams::new(4.0, 0.0, CorrelationForm::Z).unwrap(), &AttackParams::new(tau, w).unwrap()).unwrap();
                assert_abs_diff_eq!(r.i_xy, 0.0, epsilon = 1e-12);
                assert!(r.k_dr <= 1e-12 && r.k_rr <= 1e-12, "{r:?}");
            }
        }
    }

    #[test]
    fn pure_loss_large_modulation() {
        let mu = 1e4;
        let p = ProtocolParams::max_separable(mu, CorrelationForm::Z).unwrap();
        let tau = 0.9f64;
        let r = key_rates(&p, &AttackParams::pure_loss(tau).unwrap()).unwrap();
        let oracle = (tau / (E * (1.0 - tau * tau))).log2() + h_entropy(2.0 / tau - 1.0).unwrap();
        assert!((r.k_rr - oracle).abs() < 0.02, "{} vs {}", r.k_rr, oracle);
        let oracle_dr = (tau / (E * (1.0 - tau * tau))).log2() + h_entropy(3.0 - 2.0 * tau).unwrap();
        assert!((r.k_dr - oracle_dr).abs() < 0.02);
    }

    #[test]
    fn asymptotic_reference_points() {
        let r = asymptotic_rates(0.693, 1.0).unwrap();
        assert!(r.k_dr_inf.abs() < 2e-3, "{r:?}");
        let r = asymptotic_rates(0.532, 1.0).unwrap();
        assert!(r.k_rr_inf.abs() < 2e-3, "{r:?}");
        let r = asymptotic_rates(0.6, 1.0).unwrap();
        assert!(r.k_dr_inf < 0.0 && r.k_rr_inf > 0.0);
        // pure-loss reduction: xi = (1, 3 - 2 tau)
        assert_abs_diff_eq!(r.xi_plus, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.xi_minus, 3.0 - 1.2, epsilon = 1e-12);
        let ends = (asymptotic_rates(0.0, 1.0).unwrap(), asymptotic_rates(1.0, 2.0).unwrap());
        assert!(ends.0.divergent && ends.0.k_rr_inf == f64::NEG_INFINITY);
        assert!(ends.1.divergent && ends.1.k_dr_inf == f64::INFINITY);
        assert!(asymptotic_rates(1.5, 1.0).is_err());
    }

    #[test]
    fn thresholds() {
        let dr = find_threshold(1.0, Reconciliation::Direct, RateMode::Asymptotic).unwrap();
        assert!((dr.tau_star - 0.693).abs() <= 1e-3, "{dr:?}");
        let rr = find_threshold(1.0, Reconciliation::Reverse, RateMode::Asymptotic).unwrap();
        assert!((rr.tau_star - 0.532).abs() <= 1e-3, "{rr:?}");
        let t = find_threshold(1.2, Reconciliation::Reverse, RateMode::Asymptotic).unwrap();
        assert!(t.rate_below < 0.0 && t.rate_above > 0.0);
        assert!(t.tau_star > rr.tau_star);
        // very noisy channels stay insecure up to the bracket edge
        assert_eq!(
            find_threshold(1000.0, Reconciliation::Direct, RateMode::Asymptotic),
            Err(Error::NoSignChange(Security::NeverSecure))
        );
    }

    #[test]
    fn dw_rate_validation() {
        let v = epr_pure_loss_global_cm(5.0, 0.5).unwrap();
        assert!(dw_rates(&v, &[0], &[0], &[2], Reconciliation::Direct).is_err());
        assert!(dw_rates(&v, &[0], &[1], &[], Reconciliation::Direct).is_err());
        assert!(dw_rates(&v, &[0, 2], &[1], &[], Reconciliation::Direct).is_err());
        // Eve uncorrelated with everything: rate = I(B, X)
        let prod = v.reduced(&[0, 1]).unwrap().direct_sum(&CovMatrix::thermal(3.0).unwrap());
        let k = dw_rates(&prod, &[0], &[1], &[2], Reconciliation::Direct).unwrap();
        let i_bx = holevo_information(&prod, &[1], 0, Dyne::Heterodyne).unwrap();
        assert_abs_diff_eq!(k, i_bx, epsilon = 1e-12);
        assert!(k > 0.0);
    }

    #[test]
    fn epr_loss_report() {
        let r = epr_pure_loss_report(20.0, 0.5).unwrap();
        assert_abs_diff_eq!(r.k_rr_dw, r.discord_closed_form, epsilon = 1e-6);
        assert_abs_diff_eq!(r.discord_ba, r.discord_closed_form, epsilon = 1e-5);
        assert_abs_diff_eq!(r.ic_bwd, r.discord_closed_form, epsilon = 1e-9);
        assert!(r.ef_be_zero_certified);
        // V_AB off-diagonal block sqrt(tau (mu^2 - 1)) Z
        let v = epr_pure_loss_global_cm(20.0, 0.5).unwrap();
        let c = (0.5f64 * (400.0 - 1.0)).sqrt();
        assert_abs_diff_eq!((v.block(0, 1) - z() * c).amax(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.block(1, 1)[(0, 0)], 0.5 * 20.0 + 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bounds_for_pure_and_separable_inputs() {
        let a = AttackParams::new(0.7, 1.3).unwrap();
        let b = device_dependent_bounds(&ProtocolParams::pure(5.0).unwrap(), &a).unwrap();
        assert_abs_diff_eq!(b.s_p, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.upper_fwd, b.ic_fwd, epsilon = 1e-8);
        assert_abs_diff_eq!(b.upper_bwd, b.ic_bwd, epsilon = 1e-8);

        let p = ProtocolParams::max_separable(10.0, CorrelationForm::Z).unwrap();
        let a = AttackParams::pure_loss(0.8).unwrap();
        let b = device_dependent_bounds(&p, &a).unwrap();
        let k = key_rates(&p, &a).unwrap();
        assert!(b.ic_fwd <= 0.0 && b.ic_bwd <= 0.0, "{b:?}");
        assert!(k.k_rr > 0.0, "{k:?}");
        assert!(b.purity_defect < 1e-9);
        assert_abs_diff_eq!(b.s_ab, b.s_eve_p, epsilon = 1e-9);
    }

    #[test]
    fn bound_chain_on_grid() {
        let mut s = StateSampler::new(4242);
        for _ in 0..25 {
            let mu = s.uniform(1.5, 20.0);
            let form = if s.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
            let g = s.uniform(-1.0, 1.0) * max_physical_g(mu, form);
            let p = ProtocolParams::new(mu, g, form).unwrap();
            let a = AttackParams::new(s.uniform(0.05, 0.95), s.uniform(1.0, 4.0)).unwrap();
            let b = device_dependent_bounds(&p, &a).unwrap();
            assert!(b.dw_fwd_eve_p <= b.dw_fwd + 1e-6 && b.dw_fwd <= b.upper_fwd + 1e-6, "{b:?}");
            assert!(b.dw_bwd_eve_p <= b.dw_bwd + 1e-6 && b.dw_bwd <= b.upper_bwd + 1e-6, "{b:?}");
            assert!(b.qmi_ap_given_b <= b.cap + 1e-9 && b.qmi_bp_given_a <= b.cap + 1e-9);
            // Eve holding P reduces the rate to the coherent information;
            // the decoder holding P lifts it to the upper bound
            assert_abs_diff_eq!(b.dw_fwd_eve_p, b.ic_fwd, epsilon = 1e-7);
            assert_abs_diff_eq!(b.dw_bwd_eve_p, b.ic_bwd, epsilon = 1e-7);
            assert_abs_diff_eq!(b.dw_fwd_decoder_p, b.upper_fwd, epsilon = 1e-7);
            assert_abs_diff_eq!(b.dw_bwd_decoder_p, b.upper_bwd, epsilon = 1e-7);
            let k = key_rates(&p, &a).unwrap();
            assert!(b.dw_fwd >= k.k_dr - 1e-9);
            assert!(b.purity_defect < 1e-9, "{}", b.purity_defect);
            assert!(check_physical(&trusted_noise_global_cm(&p, &a).unwrap()).physical);
        }
    }
}
