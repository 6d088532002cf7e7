mod args;
mod config;
mod error;
mod format;
mod grid;
mod region;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use gaussqkd::discord::discord_coherent_bounds;
use gaussqkd::protocols::{
    build_global_cm, device_dependent_bounds, epr_pure_loss_report, find_threshold, key_rates, AttackParams,
    RateMode, Reconciliation, MODE_A, MODE_B,
};
use gaussqkd::symplectic::h_entropy;
use gaussqkd::verify::{self, VerifyConfig};

use args::{Cli, Command, Dir, GridArgs, Level, Mode, Protocol, RatesArgs, RegionArgs, ThresholdArgs, VerifyArgs};
use error::CliError;
use format::Record;
use grid::Grid;
use region::{RegionImage, Shading};

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("gaussqkd: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::Check(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Rates(a) => rates(&a),
        Command::Sweep(a) => sweep(&a.grid),
        Command::Threshold(a) => threshold(&a),
        Command::Region(a) => region(&a),
        Command::Verify(a) => verify(&a, cli.seed),
    }
}

fn emit(rec: &Record, json: bool) {
    if json {
        print!("{}", rec.to_json());
    } else {
        print!("{}", rec.to_text());
    }
}

fn rates(a: &RatesArgs) -> Result<(), CliError> {
    let rec = match a.protocol {
        Protocol::Separable => separable_record(a)?,
        Protocol::EprLoss => epr_loss_record(a)?,
    };
    emit(&rec, a.json);
    Ok(())
}

fn separable_record(a: &RatesArgs) -> Result<Record, CliError> {
    let p = grid::protocol_params(&a.input)?;
    let att = AttackParams::new(a.tau, a.omega)?;
    let r = key_rates(&p, &att)?;
    let (s, t) = (r.spectra, r.terms);
    let mut rec = Record::default();
    rec.text("protocol", "separable")
        .num("mu", p.mu)
        .num("g", p.g)
        .text("form", p.form.to_string())
        .num("tau", att.tau)
        .num("omega", att.omega)
        .flag("separable", r.separable)
        .num("i_xy", r.i_xy)
        .num("holevo_x", r.holevo_x)
        .num("holevo_y", r.holevo_y)
        .num("k_dr", r.k_dr)
        .num("k_rr", r.k_rr)
        .num("nu_e_plus", s.nu_e_plus)
        .num("nu_e_minus", s.nu_e_minus)
        .num("nu_ey_plus", s.nu_ey_plus)
        .num("nu_ey_minus", s.nu_ey_minus)
        .num("nu_ex_plus", s.nu_ex_plus)
        .num("nu_ex_minus", s.nu_ex_minus)
        .num("nu_b", t.nu_b)
        .num("nu_b_given_x", t.nu_b_given_x)
        .num("epsilon", t.epsilon)
        .num("nu_e", t.nu_e)
        .num("gamma", t.gamma)
        .num("delta", t.delta)
        .num("kappa", t.kappa)
        .num("alpha", t.alpha)
        .num("beta", t.beta)
        .num("theta", t.theta)
        .num("phi", t.phi);
    if a.discord {
        let input = discord_coherent_bounds(&p.input_state())?;
        let output = discord_coherent_bounds(&build_global_cm(&p, &att)?.reduced(&[MODE_A, MODE_B])?)?;
        rec.num("discord_in_ab", input.d_ab)
            .num("discord_in_ba", input.d_ba)
            .num("discord_ab", output.d_ab)
            .num("discord_ba", output.d_ba)
            .num("ic_fwd", output.ic_fwd)
            .num("ic_bwd", output.ic_bwd);
    }
    if a.bounds {
        let b = device_dependent_bounds(&p, &att)?;
        rec.num("bound_ic_fwd", b.ic_fwd)
            .num("bound_ic_bwd", b.ic_bwd)
            .num("qmi_ap_given_b", b.qmi_ap_given_b)
            .num("qmi_bp_given_a", b.qmi_bp_given_a)
            .num("upper_fwd", b.upper_fwd)
            .num("upper_bwd", b.upper_bwd)
            .num("cap", b.cap)
            .num("dw_fwd", b.dw_fwd)
            .num("dw_bwd", b.dw_bwd)
            .num("dw_fwd_eve_p", b.dw_fwd_eve_p)
            .num("dw_bwd_eve_p", b.dw_bwd_eve_p)
            .num("s_p", b.s_p)
            .num("s_ab", b.s_ab);
    }
    Ok(rec)
}

fn epr_loss_record(a: &RatesArgs) -> Result<Record, CliError> {
    if a.input.g.is_some() || a.input.g_rule.is_some() {
        return Err(CliError::Usage("--protocol epr-loss takes no --g or --g-rule".into()));
    }
    if a.omega != 1.0 {
        return Err(CliError::Usage("--protocol epr-loss is a pure-loss channel; --omega must be 1".into()));
    }
    if a.bounds {
        return Err(CliError::Usage("--bounds applies to the separable protocol".into()));
    }
    let mu = a.input.mu.ok_or_else(|| CliError::Usage("--mu is required".into()))?;
    let r = epr_pure_loss_report(mu, a.tau)?;
    let mut rec = Record::default();
    rec.text("protocol", "epr-loss")
        .num("mu", r.mu)
        .num("tau", r.tau)
        .num("k_rr", r.k_rr_dw)
        .num("discord_ba", r.discord_ba)
        .num("discord_closed_form", r.discord_closed_form)
        .num("ic_bwd", r.ic_bwd)
        .flag("ef_be_zero_certified", r.ef_be_zero_certified)
        .num("nu_tilde_min_be", r.nu_tilde_min_be);
    Ok(rec)
}

fn write_out(path: &Path, body: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        std::io::stdout().write_all(body.as_bytes())?;
        return Ok(());
    }
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sweep(g: &GridArgs) -> Result<(), CliError> {
    let grid = Grid::from_args(g)?;
    let cells = grid.evaluate()?;
    write_out(&g.out, &grid::csv(&cells))
}

fn region(a: &RegionArgs) -> Result<(), CliError> {
    if a.grid.out == Path::new("-") {
        return Err(CliError::Usage("region needs a file path for --out".into()));
    }
    if a.shade && !(a.shade_max > 0.0) {
        return Err(CliError::Usage("--shade-max must be positive".into()));
    }
    let grid = Grid::from_args(&a.grid)?;
    let cells = grid.evaluate()?;
    let rates: Vec<f64> = cells
        .iter()
        .map(|c| match a.dir {
            Dir::Dr => c.k_dr,
            Dir::Rr => c.k_rr,
        })
        .collect();
    let shading = if a.shade { Shading::Linear { max: a.shade_max } } else { Shading::Sign };
    let img = RegionImage::from_rates(&rates, grid.taus.len(), grid.omegas.len(), shading);
    write_out(&a.grid.out, &img.to_pgm())?;
    write_out(&companion_csv(&a.grid.out), &grid::csv(&cells))
}

fn companion_csv(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

fn threshold(a: &ThresholdArgs) -> Result<(), CliError> {
    let mode = match (a.mode, a.mu) {
        (Mode::Asymptotic, None) => RateMode::Asymptotic,
        (Mode::Asymptotic, Some(_)) => return Err(CliError::Usage("--mu needs --mode finite".into())),
        (Mode::Finite, Some(mu)) => RateMode::Finite { mu },
        (Mode::Finite, None) => return Err(CliError::Usage("--mode finite needs --mu".into())),
    };
    let (dir, rec_dir) = match a.dir {
        Dir::Dr => ("dr", Reconciliation::Direct),
        Dir::Rr => ("rr", Reconciliation::Reverse),
    };
    let t = find_threshold(a.omega, rec_dir, mode)?;
    let mut rec = Record::default();
    rec.num("omega", a.omega).text("dir", dir);
    match mode {
        RateMode::Asymptotic => rec.text("mode", "asymptotic"),
        RateMode::Finite { mu } => rec.text("mode", "finite").num("mu", mu),
    };
    rec.num("tau_star", t.tau_star).num("rate_below", t.rate_below).num("rate_above", t.rate_above);
    emit(&rec, a.json);
    Ok(())
}

fn skewed_entropy(x: f64) -> gaussqkd::Result<f64> {
    Ok(h_entropy(x)? * 1.01)
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<(), CliError> {
    let level = match a.level {
        Level::Quick => verify::Level::Quick,
        Level::Full => verify::Level::Full,
    };
    let mut cfg = VerifyConfig::new(seed, level);
    if a.corrupt_entropy {
        cfg.oracle_entropy = skewed_entropy;
    }
    let report = verify::run(&cfg);
    for s in &report.suites {
        let status = if s.passed() { "ok  " } else { "FAIL" };
        println!("{status} {:<28} {} checks", s.name, s.checks);
        for f in &s.failures {
            println!("     {f}");
        }
    }
    if report.passed() {
        println!("verify: {} suites passed (seed {seed}, {} states)", report.suites.len(), level.states());
        Ok(())
    } else {
        Err(CliError::Check(format!("failed suites: {}", report.failed_suites().join(", "))))
    }
}
