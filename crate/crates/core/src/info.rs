//! Entropic functionals of Gaussian states: mutual and coherent information,
//! Holevo quantities of dyne-encoded variables, heterodyne Shannon
//! information and conditional mutual information. All values in bits.

use crate::error::{Error, Result};
use crate::symplectic::{dyne_condition, validate_modes, von_neumann_entropy, CovMatrix, Dyne};

/// Two disjoint, nonempty groups of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_a: Vec<usize>, side_b: Vec<usize>) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidModes("bipartition sides must be nonempty".into()));
        }
        if side_a.iter().any(|m| side_b.contains(m)) {
            return Err(Error::InvalidModes("bipartition sides overlap".into()));
        }
        Ok(Self { side_a, side_b })
    }

    /// Mode 0 against mode 1.
    pub fn two_mode() -> Self {
        Self { side_a: vec![0], side_b: vec![1] }
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    fn joint(&self) -> Vec<usize> {
        self.side_a.iter().chain(&self.side_b).copied().collect()
    }
}

/// Direction of a coherent information. `AtoB` is `I_c(A>B) = S(B) - S(AB)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AtoB,
    BtoA,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicRecord {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
}

impl EntropicRecord {
    pub fn mutual_information(&self) -> f64 {
        self.s_a + self.s_b - self.s_ab
    }

    /// `I_c(A>B) = -S(A|B)`.
    pub fn ic_forward(&self) -> f64 {
        self.s_b - self.s_ab
    }

    /// `I_c(B>A) = -S(B|A)`.
    pub fn ic_backward(&self) -> f64 {
        self.s_a - self.s_ab
    }
}

/// Entropy of the reduced state on `modes`; the empty set has zero entropy.
pub fn subsystem_entropy(v: &CovMatrix, modes: &[usize]) -> Result<f64> {
    if modes.is_empty() {
        return Ok(0.0);
    }
    von_neumann_entropy(&v.reduced(modes)?)
}

pub fn entropic_record(v: &CovMatrix, p: &Bipartition) -> Result<EntropicRecord> {
    validate_modes(&p.joint(), v.n_modes())?;
    Ok(EntropicRecord {
        s_a: subsystem_entropy(v, p.side_a())?,
        s_b: subsystem_entropy(v, p.side_b())?,
        s_ab: subsystem_entropy(v, &p.joint())?,
    })
}

pub fn quantum_mutual_information(v: &CovMatrix, p: &Bipartition) -> Result<f64> {
    Ok(entropic_record(v, p)?.mutual_information())
}

pub fn coherent_information(v: &CovMatrix, p: &Bipartition, direction: Direction) -> Result<f64> {
    let rec = entropic_record(v, p)?;
    Ok(match direction {
        Direction::AtoB => rec.ic_forward(),
        Direction::BtoA => rec.ic_backward(),
    })
}

/// Holevo information `S(holders) - S(holders | outcome)` between the
/// quantum system on `holders` and the classical outcome of measuring the
/// single mode `measured`.
pub fn holevo_information(v: &CovMatrix, holders: &[usize], measured: usize, dyne: Dyne) -> Result<f64> {
    if holders.contains(&measured) {
        return Err(Error::InvalidModes(format!("measured mode {measured} is also a holder")));
    }
    let mut modes = holders.to_vec();
    modes.push(measured);
    validate_modes(&modes, v.n_modes())?;
    let joint = v.reduced(&modes)?;
    let s_holders = von_neumann_entropy(&joint.reduced(&(0..holders.len()).collect::<Vec<_>>())?)?;
    let cond = dyne_condition(&joint, &[holders.len()], dyne)?;
    Ok(s_holders - von_neumann_entropy(&cond)?)
}

/// Shannon mutual information of the heterodyne records of a two-mode state,
/// `1/2 log2[det(V_A + I) det(V_B + I) / det(V + I)]`.
pub fn classical_mi_heterodyne(v: &CovMatrix) -> Result<f64> {
    if v.n_modes() != 2 {
        return Err(Error::InvalidModes(format!("heterodyne MI needs 2 modes, got {}", v.n_modes())));
    }
    if v.block(0, 1) == nalgebra::Matrix2::zeros() {
        return Ok(0.0);
    }
    let shifted = v.matrix() + nalgebra::DMatrix::<f64>::identity(4, 4);
    let da = shifted.fixed_view::<2, 2>(0, 0).determinant();
    let db = shifted.fixed_view::<2, 2>(2, 2).determinant();
    let d = shifted.determinant();
    if !(da > 0.0 && db > 0.0 && d > 0.0) {
        return Err(Error::Singular("V + I is not positive definite".into()));
    }
    Ok((0.5 * (da * db / d).log2()).max(0.0))
}

/// `I(a, b | c) = S(ac) + S(bc) - S(c) - S(abc)`.
pub fn conditional_qmi(v: &CovMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidModes("conditional QMI needs nonempty a and b".into()));
    }
    let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let abc = cat(&cat(a, b), c);
    validate_modes(&abc, v.n_modes())?;
    Ok(subsystem_entropy(v, &cat(a, c))? + subsystem_entropy(v, &cat(b, c))?
        - subsystem_entropy(v, c)?
        - subsystem_entropy(v, &abc)?)
}
