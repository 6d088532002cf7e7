//! Covariance-matrix algebra for multimode Gaussian states.
//!
//! Conventions used throughout the crate: quadratures are ordered
//! `(q1, p1, q2, p2, ...)`, the vacuum has unit variance (hbar = 2), and all
//! states are zero-mean so a state is fully described by its covariance
//! matrix (CM).

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{Error, Result};

/// Slack on the uncertainty principle: symplectic eigenvalues in
/// `[1 - PHYSICAL_TOL, 1)` count as pure and are clamped to 1.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Maximum absolute asymmetry accepted when building a [`CovMatrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Binary entropy-like function of a symplectic eigenvalue, in bits.
///
/// `h(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2)`, evaluated in
/// the cancellation-free form `log2(a) + b log2(1 + 1/b)` with `a = (x+1)/2`,
/// `b = (x-1)/2`. Values just below 1 are clamped.
pub fn h_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 - PHYSICAL_TOL {
        return Err(Error::Domain(format!("h(x) needs x >= 1, got {x}")));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let a = 0.5 * (x + 1.0);
    let b = 0.5 * (x - 1.0);
    Ok((a.ln() + b * (1.0 / b).ln_1p()) / LN_2)
}

/// Correlation block shape of the two-mode input state: `gI` or `gZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationForm {
    I,
    Z,
}

impl CorrelationForm {
    fn block(self, g: f64) -> Matrix2<f64> {
        match self {
            CorrelationForm::I => Matrix2::new(g, 0.0, 0.0, g),
            CorrelationForm::Z => Matrix2::new(g, 0.0, 0.0, -g),
        }
    }
}

impl fmt::Display for CorrelationForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationForm::I => f.write_str("I"),
            CorrelationForm::Z => f.write_str("Z"),
        }
    }
}

impl FromStr for CorrelationForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(CorrelationForm::I),
            "Z" | "z" => Ok(CorrelationForm::Z),
            other => Err(Error::Domain(format!("unknown correlation form '{other}'"))),
        }
    }
}

/// Named Gaussian states available through [`construct_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    /// Single-mode thermal state with variance `mu`.
    Thermal { mu: f64 },
    /// Two-mode squeezed vacuum with local variance `omega`.
    Epr { omega: f64 },
    /// Alice's two-mode input state: diagonal blocks `mu I`, correlation block `gI` or `gZ`.
    InputPair { mu: f64, g: f64, form: CorrelationForm },
}

impl StateKind {
    /// Whether the constructed state is separable. Only meaningful for
    /// [`StateKind::InputPair`], where it holds iff `|g| <= mu - 1`.
    pub fn is_separable(&self) -> bool {
        match *self {
            StateKind::Thermal { .. } => true,
            StateKind::Epr { omega } => omega <= 1.0,
            StateKind::InputPair { mu, g, .. } => g.abs() <= mu - 1.0 + PHYSICAL_TOL,
        }
    }
}

/// Largest `|g|` for which the input pair with the given form is physical.
pub fn max_physical_g(mu: f64, form: CorrelationForm) -> f64 {
    match form {
        CorrelationForm::I => mu - 1.0,
        CorrelationForm::Z => (mu * mu - 1.0).max(0.0).sqrt(),
    }
}

/// Builds the covariance matrix of a named state, validating its parameters.
pub fn construct_state(kind: StateKind) -> Result<CovMatrix> {
    match kind {
        StateKind::Thermal { mu } => CovMatrix::thermal(mu),
        StateKind::Epr { omega } => CovMatrix::epr(omega),
        StateKind::InputPair { mu, g, form } => CovMatrix::input_pair(mu, g, form),
    }
}

/// Real symmetric `2n x 2n` covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    entries: DMatrix<f64>,
}

impl CovMatrix {
    /// Wraps a matrix after checking shape and symmetry. The stored matrix is
    /// exactly symmetrized.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::BadShape { rows, cols });
        }
        let asym = (&entries - entries.transpose()).amax();
        if asym.is_nan() || asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::from_symmetrized(entries))
    }

    /// Symmetrizes without checking; for results of exact-in-theory congruences.
    pub(crate) fn from_symmetrized(m: DMatrix<f64>) -> Self {
        let entries = (&m + m.transpose()) * 0.5;
        Self { entries }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { entries: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    pub fn thermal(mu: f64) -> Result<Self> {
        if !(mu >= 1.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("thermal variance must be >= 1, got {mu}")));
        }
        Ok(Self { entries: DMatrix::identity(2, 2) * mu })
    }

    /// EPR state `V(omega)`: blocks `omega I` on the diagonal and
    /// `sqrt(omega^2 - 1) Z` off the diagonal.
    pub fn epr(omega: f64) -> Result<Self> {
        if !(omega >= 1.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("EPR variance must be >= 1, got {omega}")));
        }
        let c = (omega * omega - 1.0).sqrt();
        let mut m = DMatrix::identity(4, 4) * omega;
        m[(0, 2)] = c;
        m[(2, 0)] = c;
        m[(1, 3)] = -c;
        m[(3, 1)] = -c;
        Ok(Self { entries: m })
    }

    /// Two-mode state with diagonal blocks `mu I` and correlation block `G`
    /// (`gI` or `gZ`).
    ///
    /// The symplectic spectrum is `{mu - |g|, mu + |g|}` for `gI` and
    /// `sqrt(mu^2 - g^2)` (twice) for `gZ`, so the physical range of `|g|` is
    /// `mu - 1` and `sqrt(mu^2 - 1)` respectively. See [`max_physical_g`].
    pub fn input_pair(mu: f64, g: f64, form: CorrelationForm) -> Result<Self> {
        if !(mu >= 1.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("modulation variance must be >= 1, got {mu}")));
        }
        let bound = max_physical_g(mu, form);
        if !g.is_finite() || g.abs() > bound + PHYSICAL_TOL {
            return Err(Error::Domain(format!("|g| = {} exceeds the physical bound {bound} for form {form}", g.abs())));
        }
        let mut m = DMatrix::identity(4, 4) * mu;
        let blk = form.block(g);
        m.view_mut((0, 2), (2, 2)).copy_from(&blk);
        m.view_mut((2, 0), (2, 2)).copy_from(&blk);
        Ok(Self { entries: m })
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// The `2x2` block coupling modes `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// Tensor product: block-diagonal CM with `self` on the first modes.
    pub fn direct_sum(&self, other: &CovMatrix) -> CovMatrix {
        let (a, b) = (self.entries.nrows(), other.entries.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.entries);
        m.view_mut((a, a), (b, b)).copy_from(&other.entries);
        CovMatrix { entries: m }
    }

    /// `S V S^T` for a `2n x 2n` matrix `S`.
    pub fn congruence(&self, s: &DMatrix<f64>) -> Result<CovMatrix> {
        if s.nrows() != self.entries.nrows() || s.ncols() != self.entries.ncols() {
            return Err(Error::BadShape { rows: s.nrows(), cols: s.ncols() });
        }
        Ok(Self::from_symmetrized(s * &self.entries * s.transpose()))
    }

    /// Principal submatrix on the listed modes, in the listed order. This is
    /// the partial trace over the remaining modes.
    pub fn reduced(&self, keep: &[usize]) -> Result<CovMatrix> {
        validate_modes(keep, self.n_modes())?;
        let k = keep.len();
        let mut m = DMatrix::zeros(2 * k, 2 * k);
        for (bi, &i) in keep.iter().enumerate() {
            for (bj, &j) in keep.iter().enumerate() {
                m.fixed_view_mut::<2, 2>(2 * bi, 2 * bj)
                    .copy_from(&self.entries.fixed_view::<2, 2>(2 * i, 2 * j));
            }
        }
        Ok(CovMatrix { entries: m })
    }

    /// Row-major plain text, space separated, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|c| format!("{}", self.entries[(r, c)]))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<CovMatrix> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| Error::Domain(format!("bad entry '{t}': {e}"))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { rows: n, cols: rows.first().map_or(0, Vec::len) });
        }
        CovMatrix::new(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }
}

pub(crate) fn validate_modes(modes: &[usize], n_modes: usize) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::InvalidModes("empty mode subset".into()));
    }
    for (k, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::InvalidModes(format!("mode {m} out of range for {n_modes} modes")));
        }
        if modes[..k].contains(&m) {
            return Err(Error::InvalidModes(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

/// Block-diagonal symplectic form with per-mode blocks `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let mut entries = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            entries[(2 * k, 2 * k + 1)] = 1.0;
            entries[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { n_modes, entries }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// `V = S diag(nu_1, nu_1, ..., nu_n, nu_n) S^T` with `S` symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticDecomposition {
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, ascending.
    pub nu: Vec<f64>,
}

impl SymplecticDecomposition {
    pub fn diagonal(&self) -> DMatrix<f64> {
        let d: Vec<f64> = self.nu.iter().flat_map(|&v| [v, v]).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.s * self.diagonal() * self.s.transpose()
    }
}

/// Symmetric square root of a positive-definite matrix, or `None`.
fn sqrt_pd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let d = eig.eigenvalues.map(f64::sqrt);
    Some(&eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose())
}

/// Hermitian eigenproblem for `i V^{1/2} Omega V^{1/2}`. Its eigenvalues are
/// `+-nu_k`; returns the positive half as (nu, eigenvector) sorted by ascending nu.
fn positive_spectrum(sqrt_v: &DMatrix<f64>) -> Vec<(f64, nalgebra::DVector<Complex<f64>>)> {
    let n = sqrt_v.nrows() / 2;
    let omega = SymplecticForm::new(n);
    let m = sqrt_v * omega.matrix() * sqrt_v;
    let h = m.map(|x| Complex::new(0.0, x));
    // Hermitian up to rounding: enforce it exactly.
    let h = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, nalgebra::DVector<Complex<f64>>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| (l, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.truncate(n);
    pairs.reverse();
    pairs
}

/// Symplectic eigenvalues of `V`, ascending, one per mode. For indefinite
/// input these are the moduli of the eigenvalues of `Omega V` (NaN if the
/// Schur iteration does not converge).
pub fn symplectic_eigenvalues(v: &CovMatrix) -> Vec<f64> {
    if let Some(root) = sqrt_pd(v.matrix()) {
        return positive_spectrum(&root).into_iter().map(|(l, _)| l.abs()).collect();
    }
    // Indefinite or singular input: moduli of the eigenvalues of Omega V.
    let n = v.n_modes();
    let omega = SymplecticForm::new(n);
    let ov = omega.matrix() * v.matrix();
    match ov.try_schur(f64::EPSILON, 10_000) {
        Some(schur) => {
            let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
            moduli.sort_by(f64::total_cmp);
            moduli.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
        }
        None => vec![f64::NAN; n],
    }
}

/// Outcome of the uncertainty-principle check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub min_nu: f64,
}

/// Physical iff `V > 0` and every symplectic eigenvalue is at least
/// `1 - PHYSICAL_TOL` (equivalently `V + i Omega >= 0`).
pub fn check_physical(v: &CovMatrix) -> Physicality {
    let min_nu = symplectic_eigenvalues(v).into_iter().fold(f64::INFINITY, f64::min);
    let positive = is_positive_definite(v.matrix());
    Physicality { physical: positive && min_nu >= 1.0 - PHYSICAL_TOL, min_nu }
}

pub(crate) fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.clone().cholesky().is_some()
}

/// Von Neumann entropy in bits, `sum_k h(nu_k)`.
pub fn von_neumann_entropy(v: &CovMatrix) -> Result<f64> {
    let phys = check_physical(v);
    if !phys.physical {
        return Err(Error::Unphysical { min_nu: phys.min_nu });
    }
    symplectic_eigenvalues(v).into_iter().map(h_entropy).sum()
}

/// Partial trace keeping the listed modes.
pub fn partial_trace(v: &CovMatrix, keep: &[usize]) -> Result<CovMatrix> {
    v.reduced(keep)
}

/// Beam-splitter symplectic acting on modes `(i, j)`:
/// `[[sqrt(t) I, sqrt(1-t) I], [-sqrt(1-t) I, sqrt(t) I]]`.
///
/// With the signal on `i` and Eve's ancilla on `j`, Eve's output mode picks
/// up `-sqrt(1-t)` times the signal. This single convention reproduces the
/// entangling-cloner global CM block for block.
pub fn beam_splitter_matrix(n_modes: usize, i: usize, j: usize, tau: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("transmissivity must lie in [0, 1], got {tau}")));
    }
    if i == j || i >= n_modes || j >= n_modes {
        return Err(Error::InvalidModes(format!("beam splitter on modes ({i}, {j}) of {n_modes}")));
    }
    let t = tau.sqrt();
    let r = (1.0 - tau).sqrt();
    let mut b = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for q in 0..2 {
        let (ii, jj) = (2 * i + q, 2 * j + q);
        b[(ii, ii)] = t;
        b[(ii, jj)] = r;
        b[(jj, ii)] = -r;
        b[(jj, jj)] = t;
    }
    Ok(b)
}

pub fn apply_beam_splitter(v: &CovMatrix, i: usize, j: usize, tau: f64) -> Result<CovMatrix> {
    let b = beam_splitter_matrix(v.n_modes(), i, j, tau)?;
    v.congruence(&b)
}

/// Gaussian rank-1 measurement applied to each measured mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dyne {
    /// Projection onto coherent states (seed CM = identity).
    Heterodyne,
    /// Ideal homodyne of the quadrature `cos(angle) q + sin(angle) p`.
    Homodyne { angle: f64 },
    /// General pure Gaussian seed `R(angle) diag(squeeze, 1/squeeze) R(angle)^T`.
    /// `squeeze = 1` is heterodyne; `squeeze -> 0` homodynes the quadrature at `angle`.
    Seeded { squeeze: f64, angle: f64 },
}

fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Seed CM of a pure single-mode Gaussian state.
pub fn seed_matrix(squeeze: f64, angle: f64) -> Matrix2<f64> {
    let r = rotation(angle);
    r * Matrix2::new(squeeze, 0.0, 0.0, 1.0 / squeeze) * r.transpose()
}

/// Conditional CM of the unmeasured modes after a Gaussian measurement of
/// `measured`. The result does not depend on the outcome.
///
/// For a seeded measurement the update is the Schur complement
/// `V_A - C (V_B + sigma)^{-1} C^T`; homodyne uses the Moore-Penrose inverse
/// of the quadrature-projected block.
pub fn dyne_condition(v: &CovMatrix, measured: &[usize], dyne: Dyne) -> Result<CovMatrix> {
    let n = v.n_modes();
    validate_modes(measured, n)?;
    if measured.len() >= n {
        return Err(Error::InvalidModes("cannot measure every mode".into()));
    }
    let rest: Vec<usize> = (0..n).filter(|m| !measured.contains(m)).collect();
    let idx = |modes: &[usize]| -> Vec<usize> { modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect() };
    let (ia, ib) = (idx(&rest), idx(measured));
    let full = v.matrix();
    let va = full.select_rows(&ia).select_columns(&ia);
    let vb = full.select_rows(&ib).select_columns(&ib);
    let c = full.select_rows(&ia).select_columns(&ib);
    let k = measured.len();

    let correction = match dyne {
        Dyne::Heterodyne | Dyne::Seeded { .. } => {
            let seed = match dyne {
                Dyne::Seeded { squeeze, angle } => {
                    if !(squeeze > 0.0) || !squeeze.is_finite() {
                        return Err(Error::Domain(format!("seed squeeze must be positive, got {squeeze}")));
                    }
                    seed_matrix(squeeze, angle)
                }
                _ => Matrix2::identity(),
            };
            let mut sum = vb.clone();
            for b in 0..k {
                let mut blk = sum.fixed_view_mut::<2, 2>(2 * b, 2 * b);
                blk += seed;
            }
            let inv = sum
                .cholesky()
                .ok_or_else(|| Error::Singular("V_B + seed is not positive definite".into()))?
                .inverse();
            &c * inv * c.transpose()
        }
        Dyne::Homodyne { angle } => {
            let r = rotation(angle);
            let proj = r * Matrix2::new(1.0, 0.0, 0.0, 0.0) * r.transpose();
            let mut p = DMatrix::zeros(2 * k, 2 * k);
            for b in 0..k {
                p.fixed_view_mut::<2, 2>(2 * b, 2 * b).copy_from(&proj);
            }
            let projected = &p * &vb * &p;
            let scale = projected.amax().max(1.0);
            let pinv = projected
                .pseudo_inverse(1e-12 * scale)
                .map_err(|e| Error::Singular(format!("homodyne pseudo-inverse: {e}")))?;
            &c * pinv * c.transpose()
        }
    };
    Ok(CovMatrix::from_symmetrized(va - correction))
}

/// Williamson decomposition of a positive-definite CM.
///
/// Uses the Hermitian eigenproblem of `i V^{1/2} Omega V^{1/2}`: with `O` the
/// orthogonal matrix bringing `V^{1/2} Omega V^{1/2}` to `(+) nu_k J`, the
/// symplectic factor is `S = V^{1/2} O^T D^{-1/2}`.
pub fn williamson(v: &CovMatrix) -> Result<SymplecticDecomposition> {
    let root = sqrt_pd(v.matrix()).ok_or(Error::NotPositiveDefinite)?;
    let n = v.n_modes();
    let spectrum = positive_spectrum(&root);
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut nu = Vec::with_capacity(n);
    let s2 = std::f64::consts::SQRT_2;
    for (k, (l, u)) in spectrum.iter().enumerate() {
        // u = x + i y with M x = nu y and M y = -nu x.
        for r in 0..2 * n {
            o[(2 * k, r)] = s2 * u[r].im;
            o[(2 * k + 1, r)] = s2 * u[r].re;
        }
        nu.push(*l);
    }
    let d_inv_sqrt: Vec<f64> = nu.iter().flat_map(|&x| [1.0 / x.sqrt(), 1.0 / x.sqrt()]).collect();
    let s = root * o.transpose() * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d_inv_sqrt));
    Ok(SymplecticDecomposition { s, nu })
}

const PURE_SNAP: f64 = 1e-12;

/// Pure `2n`-mode CM whose first `n` modes reproduce `V`; the ancillas are
/// the last `n` modes.
///
/// Each Williamson mode `nu_k` is paired with an ancilla in `V(nu_k)`, and
/// the symplectic factor is applied to the system half.
pub fn purify(v: &CovMatrix) -> Result<CovMatrix> {
    let phys = check_physical(v);
    if !phys.physical {
        return Err(Error::Unphysical { min_nu: phys.min_nu });
    }
    let dec = williamson(v)?;
    let n = v.n_modes();
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for (k, &nu) in dec.nu.iter().enumerate() {
        // sqrt(nu^2 - 1) amplifies rounding noise around nu = 1
        let nu = if nu < 1.0 + PURE_SNAP { 1.0 } else { nu };
        let c = (nu * nu - 1.0).sqrt();
        let (sys, anc) = (2 * k, 2 * (n + k));
        for q in 0..2 {
            let sign = if q == 0 { 1.0 } else { -1.0 };
            m[(sys + q, sys + q)] = nu;
            m[(anc + q, anc + q)] = nu;
            m[(sys + q, anc + q)] = sign * c;
            m[(anc + q, sys + q)] = sign * c;
        }
    }
    let mut big_s = DMatrix::identity(4 * n, 4 * n);
    big_s.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&dec.s);
    CovMatrix::from_symmetrized(m).congruence(&big_s)
}

/// PPT test of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub separable: bool,
    pub nu_tilde_min: f64,
}

/// Partial transposition (flip `p` of the second mode) followed by the
/// symplectic spectrum; necessary and sufficient for 1x1-mode Gaussian states.
pub fn ppt_separable_two_mode(v: &CovMatrix) -> Result<PptReport> {
    if v.n_modes() != 2 {
        return Err(Error::InvalidModes(format!("PPT test needs 2 modes, got {}", v.n_modes())));
    }
    let t = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    let vt = v.congruence(&t)?;
    let nu_tilde_min = symplectic_eigenvalues(&vt).into_iter().fold(f64::INFINITY, f64::min);
    Ok(PptReport { separable: nu_tilde_min >= 1.0 - PHYSICAL_TOL, nu_tilde_min })
}
