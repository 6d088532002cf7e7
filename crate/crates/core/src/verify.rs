//! Seeded self-verification suites over random physical states and protocol
//! grids. Each suite draws from its own generator so the outcome does not
//! depend on scheduling.

use rayon::prelude::*;

use crate::discord::{conditional_entropy, discord_coherent_bounds, gaussian_discord, DyneSeed};
use crate::error::Result;
use crate::info::{
    classical_mi_heterodyne, conditional_qmi, quantum_mutual_information, subsystem_entropy, Bipartition,
};
use crate::protocols::{
    device_dependent_bounds, eve_spectra_closed_form, eve_spectra_generic, key_rates, trusted_noise_global_cm,
    AttackParams, ProtocolParams,
};
use crate::sampling::StateSampler;
use crate::symplectic::{
    apply_beam_splitter, check_physical, dyne_condition, h_entropy, max_physical_g, ppt_separable_two_mode, purify,
    symplectic_eigenvalues, von_neumann_entropy, williamson, CorrelationForm, CovMatrix, Dyne, SymplecticForm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    /// Random states drawn by the state-level suites.
    pub fn states(self) -> usize {
        match self {
            Level::Quick => 100,
            Level::Full => 1000,
        }
    }

    /// Points drawn by the protocol-level suites.
    fn points(self) -> usize {
        match self {
            Level::Quick => 20,
            Level::Full => 200,
        }
    }
}

/// Entropy function used on the oracle side of the cross-checks. Swapping it
/// for a wrong one must make the run fail.
pub type EntropyFn = fn(f64) -> Result<f64>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub level: Level,
    pub oracle_entropy: EntropyFn,
}

impl VerifyConfig {
    pub fn new(seed: u64, level: Level) -> Self {
        Self { seed, level, oracle_entropy: h_entropy }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect()
    }
}

/// Failures are capped per suite to keep manifests readable.
const MAX_REPORTED: usize = 10;

struct Ctx {
    rng: StateSampler,
    n: usize,
    points: usize,
    h: EntropyFn,
    checks: usize,
    failures: Vec<String>,
}

impl Ctx {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < MAX_REPORTED {
            self.failures.push(msg());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || format!("{what}: got {got:.12e}, expected {want:.12e} (tol {tol:e})"));
    }

    /// Record an evaluation error as a failure.
    fn run<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }

    fn oracle_entropy(&self, nus: &[f64]) -> f64 {
        nus.iter().map(|&x| (self.h)(x).unwrap_or(f64::NAN)).sum()
    }

    fn random_state(&mut self, i: usize) -> CovMatrix {
        match i % 3 {
            0 => self.rng.one_mode(),
            1 => self.rng.two_mode(),
            _ => self.rng.three_mode(),
        }
    }

    fn protocol_point(&mut self) -> (ProtocolParams, AttackParams) {
        let mu = self.rng.uniform(1.0, 50.0);
        let form = if self.rng.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
        let g = self.rng.uniform(-1.0, 1.0) * max_physical_g(mu, form);
        let p = ProtocolParams::new(mu, g, form).expect("sampled inside the physical region");
        let a = AttackParams::new(self.rng.uniform(0.05, 0.95), self.rng.uniform(1.0, 5.0)).expect("in range");
        (p, a)
    }

    fn separable_point(&mut self) -> (ProtocolParams, AttackParams) {
        let mu = self.rng.uniform(1.0, 50.0);
        let form = if self.rng.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
        let g = self.rng.uniform(-1.0, 1.0) * (mu - 1.0);
        let p = ProtocolParams::new(mu, g, form).expect("separable is physical");
        let a = AttackParams::new(self.rng.uniform(0.05, 0.95), self.rng.uniform(1.0, 5.0)).expect("in range");
        (p, a)
    }
}

type Suite = fn(&mut Ctx);

const SUITES: &[(&str, Suite)] = &[
    ("constructors_physical", constructors_physical),
    ("congruence_invariance", congruence_invariance),
    ("entropy_additivity", entropy_additivity),
    ("beam_splitter_unitarity", beam_splitter_unitarity),
    ("heterodyne_physicality", heterodyne_physicality),
    ("williamson_reconstruction", williamson_reconstruction),
    ("purification_round_trip", purification_round_trip),
    ("ppt_input_pair", ppt_input_pair),
    ("purity_equality", purity_equality),
    ("measured_purity", measured_purity),
    ("data_processing", data_processing),
    ("strong_subadditivity", strong_subadditivity),
    ("discord_koashi_winter", discord_koashi_winter),
    ("discord_pure_states", discord_pure_states),
    ("discord_optimizer", discord_optimizer),
    ("zero_discord_no_key", zero_discord_no_key),
    ("eve_spectra_oracle", eve_spectra_oracle),
    ("holevo_oracle", holevo_oracle),
    ("bound_chain", bound_chain),
    ("separable_coherent_info", separable_coherent_info),
    ("rate_continuity", rate_continuity),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

/// Run every suite; suites run in parallel, results keep the fixed order.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let suites = SUITES
        .par_iter()
        .enumerate()
        .map(|(k, (name, f))| {
            let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64);
            let mut ctx = Ctx {
                rng: StateSampler::new(seed),
                n: cfg.level.states(),
                points: cfg.level.points(),
                h: cfg.oracle_entropy,
                checks: 0,
                failures: Vec::new(),
            };
            f(&mut ctx);
            SuiteOutcome { name, checks: ctx.checks, failures: ctx.failures }
        })
        .collect();
    VerifyReport { suites }
}

fn spectra_close(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn constructors_physical(c: &mut Ctx) {
    for _ in 0..c.n {
        let mu = c.rng.uniform(1.0, 100.0);
        let form = if c.rng.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
        let g = c.rng.uniform(-1.0, 1.0) * max_physical_g(mu, form);
        for (what, v) in [
            ("thermal", CovMatrix::thermal(mu)),
            ("epr", CovMatrix::epr(mu)),
            ("input_pair", CovMatrix::input_pair(mu, g, form)),
        ] {
            if let Some(v) = c.run(what, v) {
                let p = check_physical(&v);
                c.check(p.physical, || format!("{what}({mu}, {g}, {form}) unphysical, min nu {}", p.min_nu));
            }
        }
    }
}

fn congruence_invariance(c: &mut Ctx) {
    for i in 0..c.n {
        let v = c.random_state(i);
        let s = c.rng.symplectic(v.n_modes());
        let Some(w) = c.run("congruence", v.congruence(&s)) else { continue };
        let err = spectra_close(&symplectic_eigenvalues(&v), &symplectic_eigenvalues(&w));
        c.check(err <= 1e-9 * (1.0 + v.matrix().amax()), || format!("spectrum moved by {err:e} under S V S^T"));
    }
}

fn entropy_additivity(c: &mut Ctx) {
    for i in 0..c.n {
        let a = c.random_state(i);
        let b = c.random_state(i + 1);
        let joint = a.direct_sum(&b);
        let (Some(s), Some(sa), Some(sb)) = (
            c.run("joint entropy", von_neumann_entropy(&joint)),
            c.run("entropy", von_neumann_entropy(&a)),
            c.run("entropy", von_neumann_entropy(&b)),
        ) else {
            continue;
        };
        c.close("S(A+B) vs S(A) + S(B)", s, sa + sb, 1e-12 * (1.0 + s.abs()));
        let oracle = c.oracle_entropy(&symplectic_eigenvalues(&joint));
        c.close("S against sum of h(nu)", s, oracle, 1e-9);
    }
}

fn beam_splitter_unitarity(c: &mut Ctx) {
    for _ in 0..c.n {
        let v = c.rng.three_mode();
        let i = c.rng.index(3);
        let j = (i + 1 + c.rng.index(2)) % 3;
        let tau = c.rng.uniform(0.0, 1.0);
        let Some(w) = c.run("beam splitter", apply_beam_splitter(&v, i, j, tau)) else { continue };
        let err = spectra_close(&symplectic_eigenvalues(&v), &symplectic_eigenvalues(&w));
        c.check(err <= 1e-9 * (1.0 + v.matrix().amax()), || format!("beam splitter changed the spectrum by {err:e}"));
    }
}

fn heterodyne_physicality(c: &mut Ctx) {
    for i in 0..c.n {
        let v = if i % 2 == 0 { c.rng.two_mode() } else { c.rng.three_mode() };
        let m = c.rng.index(v.n_modes());
        let Some(w) = c.run("heterodyne", dyne_condition(&v, &[m], Dyne::Heterodyne)) else { continue };
        let p = check_physical(&w);
        c.check(p.physical, || format!("conditional state unphysical, min nu {}", p.min_nu));
    }
}

fn williamson_reconstruction(c: &mut Ctx) {
    for i in 0..c.n {
        let v = c.random_state(i);
        let Some(d) = c.run("williamson", williamson(&v)) else { continue };
        let scale = 1.0 + v.matrix().amax();
        let err = (d.reconstruct() - v.matrix()).amax();
        c.check(err <= 1e-9 * scale, || format!("reconstruction error {err:e}"));
        let om = SymplecticForm::new(v.n_modes());
        let err = (&d.s * om.matrix() * d.s.transpose() - om.matrix()).amax();
        c.check(err <= 1e-9 * scale, || format!("S Omega S^T deviates from Omega by {err:e}"));
        c.check(d.nu.iter().all(|&x| x >= 1.0 - 1e-9), || format!("spectrum below 1: {:?}", d.nu));
    }
}

fn purification_round_trip(c: &mut Ctx) {
    for i in 0..c.n {
        let v = if i % 2 == 0 { c.rng.one_mode() } else { c.rng.two_mode() };
        let Some(w) = c.run("purify", purify(&v)) else { continue };
        let n = v.n_modes();
        let dev = symplectic_eigenvalues(&w).into_iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        c.check(dev <= 1e-9, || format!("purification not pure, max |nu - 1| = {dev:e}"));
        let keep: Vec<usize> = (0..n).collect();
        if let Some(r) = c.run("reduce", w.reduced(&keep)) {
            let err = (r.matrix() - v.matrix()).amax();
            c.check(err <= 1e-9 * (1.0 + v.matrix().amax()), || format!("marginal differs by {err:e}"));
        }
    }
}

fn ppt_input_pair(c: &mut Ctx) {
    let steps = (c.n as f64).sqrt().ceil() as usize;
    for form in [CorrelationForm::I, CorrelationForm::Z] {
        for a in 0..steps {
            let mu = 1.0 + 49.0 * (a as f64 + 0.5) / steps as f64;
            let gmax = max_physical_g(mu, form);
            for b in 0..=steps {
                let g = gmax * b as f64 / steps as f64;
                let Some(v) = c.run("input_pair", CovMatrix::input_pair(mu, g, form)) else { continue };
                let Some(r) = c.run("ppt", ppt_separable_two_mode(&v)) else { continue };
                let expect = g.abs() <= mu - 1.0 + 1e-9;
                c.check(r.separable == expect, || format!("ppt({mu}, {g}, {form}) = {}, expected {expect}", r.separable));
            }
        }
    }
}

fn purity_equality(c: &mut Ctx) {
    for i in 0..c.n {
        let n = 2 + 2 * (i % 2);
        let v = c.rng.pure(n);
        let half: Vec<usize> = (0..n / 2).collect();
        let rest: Vec<usize> = (n / 2..n).collect();
        let (Some(s1), Some(s2)) = (c.run("S(H1)", subsystem_entropy(&v, &half)), c.run("S(H2)", subsystem_entropy(&v, &rest)))
        else {
            continue;
        };
        c.close("S(H1) vs S(H2)", s1, s2, 1e-9);
    }
}

fn measured_purity(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.protocol_point();
        let Some(v) = c.run("trusted-noise state", trusted_noise_global_cm(&p, &a)) else { continue };
        let m = c.rng.index(v.n_modes());
        let Some(w) = c.run("heterodyne", dyne_condition(&v, &[m], Dyne::Heterodyne)) else { continue };
        let left: Vec<usize> = (0..2).collect();
        let right: Vec<usize> = (2..5).collect();
        let (Some(s1), Some(s2)) = (c.run("S", subsystem_entropy(&w, &left)), c.run("S", subsystem_entropy(&w, &right)))
        else {
            continue;
        };
        c.close("conditional halves of a pure state", s1, s2, 1e-9);
    }
}

fn data_processing(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.protocol_point();
        let Some(v) = c.run("global", crate::protocols::build_global_cm(&p, &a)) else { continue };
        let Some(vab) = c.run("reduce", v.reduced(&[0, 1])) else { continue };
        let (Some(ci), Some(qi)) = (
            c.run("classical MI", classical_mi_heterodyne(&vab)),
            c.run("quantum MI", quantum_mutual_information(&vab, &Bipartition::two_mode())),
        ) else {
            continue;
        };
        c.check(ci <= qi + 1e-9, || format!("Shannon {ci} exceeds quantum MI {qi} at {p:?} {a:?}"));
    }
}

fn strong_subadditivity(c: &mut Ctx) {
    for _ in 0..c.n {
        let v = c.rng.three_mode();
        let mut idx = [0usize, 1, 2];
        let k = c.rng.index(3);
        idx.swap(0, k);
        let Some(q) = c.run("conditional QMI", conditional_qmi(&v, &[idx[0]], &[idx[1]], &[idx[2]])) else { continue };
        c.check(q >= -1e-9, || format!("I(A:B|C) = {q}"));
    }
}

fn discord_koashi_winter(c: &mut Ctx) {
    for _ in 0..c.n {
        let v = c.rng.two_mode();
        let Some(b) = c.run("discord bounds", discord_coherent_bounds(&v)) else { continue };
        c.check(b.d_ab >= -1e-9 && b.d_ba >= -1e-9, || format!("negative discord {b:?}"));
        c.check(b.gap_ab >= -1e-6, || format!("D(A|B) = {} below max(0, I_c) = {}", b.d_ab, b.ic_fwd.max(0.0)));
        c.check(b.gap_ba >= -1e-6, || format!("D(B|A) = {} below max(0, I_c) = {}", b.d_ba, b.ic_bwd.max(0.0)));
    }
}

fn discord_pure_states(c: &mut Ctx) {
    for _ in 0..c.n {
        let v = c.rng.pure(2);
        let marginal = c.oracle_entropy(&symplectic_eigenvalues(&v.reduced(&[0]).expect("mode 0 exists")));
        for m in 0..2 {
            if let Some(d) = c.run("discord", gaussian_discord(&v, m)) {
                c.close("pure-state discord vs marginal entropy", d.discord, marginal, 1e-5);
            }
        }
    }
}

fn discord_optimizer(c: &mut Ctx) {
    for _ in 0..c.n {
        let v = c.rng.two_mode();
        let m = c.rng.index(2);
        let Some(d) = c.run("discord", gaussian_discord(&v, m)) else { continue };
        for _ in 0..4 {
            let seed = DyneSeed { squeeze: 10f64.powf(c.rng.uniform(-3.0, 3.0)), angle: c.rng.uniform(0.0, std::f64::consts::PI) };
            if let Some(s) = c.run("conditional entropy", conditional_entropy(&v, m, seed)) {
                c.check(d.conditional_entropy_min <= s + 1e-9, || {
                    format!("minimum {} above sample {s} at {seed:?}", d.conditional_entropy_min)
                });
            }
        }
        if let Some(s) = c.run("conditional entropy", conditional_entropy(&v, m, DyneSeed::heterodyne())) {
            c.check(d.conditional_entropy_min <= s + 1e-9, || "minimum above heterodyne".to_string());
        }
    }
}

fn zero_discord_no_key(c: &mut Ctx) {
    for _ in 0..c.points {
        let mu = c.rng.uniform(1.0, 50.0);
        let form = if c.rng.uniform(0.0, 1.0) < 0.5 { CorrelationForm::I } else { CorrelationForm::Z };
        let p = ProtocolParams::new(mu, 0.0, form).expect("g = 0 is physical");
        if let Some(d) = c.run("discord", discord_coherent_bounds(&p.input_state())) {
            c.check(d.d_ab.abs() <= 1e-9 && d.d_ba.abs() <= 1e-9, || format!("g = 0 discord {d:?}"));
        }
        let a = AttackParams::new(c.rng.uniform(0.01, 1.0), c.rng.uniform(1.0, 5.0)).expect("in range");
        if let Some(r) = c.run("key rates", key_rates(&p, &a)) {
            c.check(r.k_dr <= 1e-9 && r.k_rr <= 1e-9, || format!("positive key without discord: {r:?}"));
        }
    }
}

fn eve_spectra_oracle(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.separable_point();
        let closed = eve_spectra_closed_form(&p, &a);
        let Some(generic) = c.run("generic spectra", eve_spectra_generic(&p, &a)) else { continue };
        let (cs, gs) = (closed.as_sorted(), generic.as_sorted());
        for k in 0..3 {
            let err = spectra_close(&cs[k], &gs[k]);
            c.check(err <= 1e-9, || format!("spectrum {k} differs by {err:e} at {p:?} {a:?}"));
        }
        c.close("nu_E|Y minus", gs[1][0], 1.0, 1e-9);
    }
}

fn holevo_oracle(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.protocol_point();
        let Some(r) = c.run("key rates", key_rates(&p, &a)) else { continue };
        let sp = r.spectra;
        let s_e = c.oracle_entropy(&[sp.nu_e_plus, sp.nu_e_minus]);
        let s_ey = c.oracle_entropy(&[sp.nu_ey_plus, sp.nu_ey_minus]);
        let s_ex = c.oracle_entropy(&[sp.nu_ex_plus, sp.nu_ex_minus]);
        c.close("I(E,X) vs closed form", r.holevo_x, s_e - s_ex, 1e-8);
        c.close("I(E,Y) vs closed form", r.holevo_y, s_e - s_ey, 1e-8);
        let t = r.terms;
        let i_xy = ((t.nu_b + 1.0) / (t.nu_b_given_x + 1.0)).log2();
        c.close("I(X,Y) vs closed form", r.i_xy, i_xy, 1e-9);
    }
}

fn bound_chain(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.protocol_point();
        let Some(b) = c.run("bounds", device_dependent_bounds(&p, &a)) else { continue };
        c.check(b.dw_fwd_eve_p <= b.dw_fwd + 1e-6, || format!("forward: Eve+P rate above Eve rate {b:?}"));
        c.check(b.dw_fwd <= b.upper_fwd + 1e-6, || format!("forward rate above upper bound {b:?}"));
        c.check(b.dw_bwd_eve_p <= b.dw_bwd + 1e-6, || format!("backward: Eve+P rate above Eve rate {b:?}"));
        c.check(b.dw_bwd <= b.upper_bwd + 1e-6, || format!("backward rate above upper bound {b:?}"));
        c.check(b.qmi_ap_given_b <= b.cap + 1e-9 && b.qmi_bp_given_a <= b.cap + 1e-9, || format!("QMI above cap {b:?}"));
        c.check(b.purity_defect <= 1e-9, || format!("global state not pure: {:e}", b.purity_defect));
        c.close("S(AB) vs S(EE'P)", b.s_ab, b.s_eve_p, 1e-9);
    }
}

fn separable_coherent_info(c: &mut Ctx) {
    for _ in 0..c.points {
        let (p, a) = c.separable_point();
        let Some(b) = c.run("bounds", device_dependent_bounds(&p, &a)) else { continue };
        c.check(b.ic_fwd <= 1e-9 && b.ic_bwd <= 1e-9, || format!("separable input with positive I_c {b:?}"));
    }
}

/// Sampled at tau <= 0.8: the rates grow like log2(1/(1 - tau)), whose slope
/// alone passes 10 bits per unit tau above tau ~ 0.86.
fn rate_continuity(c: &mut Ctx) {
    let dt = 1e-4;
    for _ in 0..c.points {
        let (p, _) = c.protocol_point();
        let a = AttackParams::new(c.rng.uniform(0.1, 0.8), c.rng.uniform(1.0, 5.0)).expect("in range");
        let b = AttackParams::new(a.tau + dt, a.omega).expect("interior point");
        let (Some(r0), Some(r1)) = (c.run("key rates", key_rates(&p, &a)), c.run("key rates", key_rates(&p, &b))) else {
            continue;
        };
        c.check((r1.k_dr - r0.k_dr).abs() <= 10.0 * dt, || format!("K_DR jumps by {} at {p:?} {a:?}", r1.k_dr - r0.k_dr));
        c.check((r1.k_rr - r0.k_rr).abs() <= 10.0 * dt, || format!("K_RR jumps by {} at {p:?} {a:?}", r1.k_rr - r0.k_rr));
    }
}
