//! (tau, omega) grids: validation, parallel evaluation, CSV rows.

use gaussqkd::protocols::{asymptotic_rates, key_rates, AttackParams, ProtocolParams};
use gaussqkd::symplectic::CorrelationForm;
use rayon::prelude::*;

use crate::args::{GRule, GridArgs, InputArgs, Mode};
use crate::error::CliError;
use crate::format::sig9;

pub const CSV_HEADER: &str = "tau,omega,mu,g,form,i_xy,holevo_x,holevo_y,k_dr,k_rr,separable";

/// Resolve `--mu`, `--g`, `--g-rule`, `--form` into validated parameters.
pub fn protocol_params(input: &InputArgs) -> Result<ProtocolParams, CliError> {
    let mu = input.mu.ok_or_else(|| CliError::Usage("--mu is required".into()))?;
    let rule = match (input.g, input.g_rule) {
        (Some(_), None | Some(GRule::Fixed)) => GRule::Fixed,
        (Some(_), Some(r)) => return Err(CliError::Usage(format!("--g conflicts with --g-rule {r:?}"))),
        (None, Some(GRule::Fixed)) => return Err(CliError::Usage("--g-rule fixed needs --g".into())),
        (None, r) => r.unwrap_or(GRule::MaxSeparable),
    };
    let p = match rule {
        GRule::Fixed => ProtocolParams::new(mu, input.g.expect("checked above"), input.form),
        GRule::MaxSeparable => ProtocolParams::max_separable(mu, input.form),
        GRule::Pure if input.form == CorrelationForm::Z => ProtocolParams::pure(mu),
        GRule::Pure => return Err(CliError::Usage("--g-rule pure needs --form Z".into())),
    };
    Ok(p?)
}

/// `steps` evenly spaced values from `lo` to `hi`; one step gives `lo`.
pub fn linspace(lo: f64, hi: f64, steps: u32) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let n = (steps - 1) as f64;
    (0..steps).map(|i| if i == steps - 1 { hi } else { lo + (hi - lo) * i as f64 / n }).collect()
}

#[derive(Debug, Clone, Copy)]
pub enum Evaluator {
    Finite(ProtocolParams),
    Asymptotic { form: CorrelationForm },
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub taus: Vec<f64>,
    pub omegas: Vec<f64>,
    pub eval: Evaluator,
}

impl Grid {
    pub fn from_args(g: &GridArgs) -> Result<Self, CliError> {
        if g.tau_min > g.tau_max || g.omega_min > g.omega_max {
            return Err(CliError::Usage("range minimum exceeds maximum".into()));
        }
        if g.tau_steps == 1 && g.tau_min != g.tau_max || g.omega_steps == 1 && g.omega_min != g.omega_max {
            return Err(CliError::Usage("a single-step range needs equal minimum and maximum".into()));
        }
        if g.omega_min < 1.0 {
            return Err(CliError::Unphysical(format!("omega must be >= 1, got {}", g.omega_min)));
        }
        let eval = match g.mode {
            Mode::Finite => Evaluator::Finite(protocol_params(&g.input)?),
            Mode::Asymptotic => {
                if g.input.mu.is_some() || g.input.g.is_some() {
                    return Err(CliError::Usage("--mode asymptotic takes no --mu or --g".into()));
                }
                if matches!(g.input.g_rule, Some(r) if r != GRule::MaxSeparable) {
                    return Err(CliError::Usage("--mode asymptotic implies --g-rule max-separable".into()));
                }
                Evaluator::Asymptotic { form: g.input.form }
            }
        };
        Ok(Self {
            taus: linspace(g.tau_min, g.tau_max, g.tau_steps),
            omegas: linspace(g.omega_min, g.omega_max, g.omega_steps),
            eval,
        })
    }

    /// Cells in row-major order: omega outer, tau inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.omegas.iter().flat_map(|&w| self.taus.iter().map(move |&t| (t, w))).collect()
    }

    /// Evaluate all cells on the current rayon pool; output order is fixed.
    pub fn evaluate(&self) -> Result<Vec<Cell>, CliError> {
        self.points().par_iter().map(|&(t, w)| self.cell(t, w)).collect()
    }

    fn cell(&self, tau: f64, omega: f64) -> Result<Cell, CliError> {
        match self.eval {
            Evaluator::Finite(p) => {
                let r = key_rates(&p, &AttackParams::new(tau, omega)?)?;
                Ok(Cell {
                    tau,
                    omega,
                    mu: p.mu,
                    g: p.g,
                    form: p.form,
                    i_xy: r.i_xy,
                    holevo_x: r.holevo_x,
                    holevo_y: r.holevo_y,
                    k_dr: r.k_dr,
                    k_rr: r.k_rr,
                    separable: r.separable,
                })
            }
            Evaluator::Asymptotic { form } => {
                let r = asymptotic_rates(tau, omega)?;
                Ok(Cell {
                    tau,
                    omega,
                    mu: f64::INFINITY,
                    g: f64::INFINITY,
                    form,
                    i_xy: f64::NAN,
                    holevo_x: f64::NAN,
                    holevo_y: f64::NAN,
                    k_dr: r.k_dr_inf,
                    k_rr: r.k_rr_inf,
                    separable: true,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub tau: f64,
    pub omega: f64,
    pub mu: f64,
    pub g: f64,
    pub form: CorrelationForm,
    pub i_xy: f64,
    pub holevo_x: f64,
    pub holevo_y: f64,
    pub k_dr: f64,
    pub k_rr: f64,
    pub separable: bool,
}

impl Cell {
    pub fn csv_row(&self) -> String {
        let nums = [self.tau, self.omega, self.mu, self.g];
        let rates = [self.i_xy, self.holevo_x, self.holevo_y, self.k_dr, self.k_rr];
        let mut fields: Vec<String> = nums.iter().map(|&x| sig9(x)).collect();
        fields.push(self.form.to_string());
        fields.extend(rates.iter().map(|&x| sig9(x)));
        fields.push(self.separable.to_string());
        fields.join(",")
    }
}

pub fn csv(cells: &[Cell]) -> String {
    let mut out = String::with_capacity(64 * (cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&c.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.55, 0.75, 5);
        for (x, want) in v.iter().zip([0.55, 0.6, 0.65, 0.7, 0.75]) {
            assert!((x - want).abs() < 1e-15);
        }
        assert_eq!(linspace(0.3, 0.9, 1), vec![0.3]);
        assert_eq!(*linspace(0.01, 0.99, 50).last().unwrap(), 0.99);
    }

    #[test]
    fn g_rules() {
        let input = |g, rule| InputArgs { mu: Some(5.0), g, g_rule: rule, form: CorrelationForm::Z };
        assert_eq!(protocol_params(&input(None, None)).unwrap().g, 4.0);
        assert_eq!(protocol_params(&input(Some(1.5), None)).unwrap().g, 1.5);
        assert!((protocol_params(&input(None, Some(GRule::Pure))).unwrap().g - 24f64.sqrt()).abs() < 1e-15);
        assert!(matches!(protocol_params(&input(Some(1.0), Some(GRule::Pure))), Err(CliError::Usage(_))));
        assert!(matches!(protocol_params(&input(Some(4.95), None)), Err(CliError::Unphysical(_))));
        let mut i = input(None, Some(GRule::Pure));
        i.form = CorrelationForm::I;
        assert!(matches!(protocol_params(&i), Err(CliError::Usage(_))));
    }
}
