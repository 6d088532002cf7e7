use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaussqkd"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn rates_reference_point() {
    let v = json(&["rates", "--mu", "2", "--g", "1", "--form", "Z", "--tau", "0.5", "--omega", "1"]);
    assert!((num(&v, "i_xy") - 0.09954).abs() < 1e-4);
    assert!((num(&v, "k_rr") - (num(&v, "i_xy") - num(&v, "holevo_y"))).abs() < 1e-15);
    assert!((num(&v, "nu_ey_minus") - 1.0).abs() < 1e-12);
    assert_eq!(v["separable"], true);
}

#[test]
fn text_record_has_six_decimals() {
    let o = run(&["rates", "--mu", "2", "--g", "1", "--tau", "0.5"]);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("i_xy")).unwrap();
    assert_eq!(line.split(" = ").nth(1).unwrap(), "0.099536");
}

#[test]
fn epr_loss_large_modulation() {
    let v = json(&["rates", "--protocol", "epr-loss", "--mu", "1000000", "--tau", "0.5"]);
    assert!((num(&v, "k_rr") - 1.0).abs() < 0.01);
    assert!((num(&v, "discord_ba") - 1.0).abs() < 0.01);
    assert_eq!(v["ef_be_zero_certified"], true);
}

#[test]
fn zero_correlation_point() {
    let v = json(&["rates", "--mu", "2", "--g", "0", "--tau", "0.7", "--omega", "1", "--discord"]);
    assert!(num(&v, "k_dr") <= 0.0 && num(&v, "k_rr") <= 0.0);
    for k in ["discord_in_ab", "discord_in_ba", "discord_ab", "discord_ba"] {
        assert!(num(&v, k).abs() < 1e-9, "{k}");
    }
}

#[test]
fn bounds_flag_reports_chain() {
    let v = json(&["rates", "--mu", "10", "--tau", "0.8", "--bounds"]);
    assert!(num(&v, "bound_ic_fwd") <= 0.0);
    assert!(num(&v, "k_rr") > 0.0);
    assert!(num(&v, "dw_fwd_eve_p") <= num(&v, "dw_fwd") + 1e-6);
    assert!(num(&v, "dw_fwd") <= num(&v, "upper_fwd") + 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["rates", "--mu", "2", "--tau", "0.5"]), 0);
    assert_eq!(code(&["rates", "--mu", "2", "--tau", "1.5"]), 2);
    assert_eq!(code(&["rates", "--mu", "2"]), 2);
    assert_eq!(code(&["rates", "--mu", "2", "--tau", "0.5", "--bogus"]), 2);
    assert_eq!(code(&["rates", "--mu", "2", "--g", "1", "--g-rule", "pure", "--tau", "0.5"]), 2);
    assert_eq!(code(&["threshold", "--dir", "dr", "--mode", "finite"]), 2);
    assert_eq!(code(&["rates", "--mu", "2", "--g", "1.9", "--tau", "0.5"]), 3);
    assert_eq!(code(&["rates", "--mu", "0.5", "--g", "0", "--tau", "0.5"]), 3);
    assert_eq!(code(&["rates", "--mu", "2", "--tau", "0.5", "--omega", "0.5"]), 3);
    assert_eq!(code(&["sweep", "--mode", "asymptotic", "--out", "/nonexistent-dir/x.csv"]), 4);
    assert_eq!(code(&["--config", "/nonexistent-dir/cfg", "rates", "--mu", "2", "--tau", "0.5"]), 4);
    assert_eq!(code(&["threshold", "--omega", "1000", "--dir", "dr"]), 5);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn threshold_records() {
    let dr = json(&["threshold", "--omega", "1", "--dir", "dr"]);
    assert!((num(&dr, "tau_star") - 0.693).abs() <= 1e-3);
    assert!(num(&dr, "rate_below") < 0.0 && num(&dr, "rate_above") > 0.0);
    let rr = json(&["threshold", "--omega", "1", "--dir", "rr"]);
    assert!((num(&rr, "tau_star") - 0.532).abs() <= 1e-3);
    let fin = json(&["threshold", "--omega", "1", "--dir", "rr", "--mode", "finite", "--mu", "100000"]);
    assert!((num(&fin, "tau_star") - num(&rr, "tau_star")).abs() <= 5e-3);
    let text = stdout(&run(&["threshold", "--omega", "1.2", "--dir", "rr"]));
    let tau = text.lines().find(|l| l.starts_with("tau_star")).unwrap().split(" = ").nth(1).unwrap();
    assert_eq!(tau.split('.').nth(1).unwrap().len(), 6);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_smoke_and_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&[
        "sweep", "--mu", "5", "--tau-min", "0.3", "--tau-max", "0.6", "--tau-steps", "2", "--omega-min", "1",
        "--omega-max", "2", "--omega-steps", "2", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "tau,omega,mu,g,form,i_xy,holevo_x,holevo_y,k_dr,k_rr,separable");
    // omega outer, tau inner
    let keys: Vec<(String, String)> = csv_rows(&text).into_iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let want = [("0.3", "1"), ("0.6", "1"), ("0.3", "2"), ("0.6", "2")];
    assert_eq!(keys, want.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn asymptotic_sweep_sign_pattern() {
    let o = run(&[
        "sweep", "--mode", "asymptotic", "--tau-min", "0.55", "--tau-max", "0.75", "--tau-steps", "5", "--omega-min",
        "1", "--omega-max", "1", "--omega-steps", "1", "--out", "-",
    ]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let tau: f64 = r[0].parse().unwrap();
        let k_dr: f64 = r[8].parse().unwrap();
        let k_rr: f64 = r[9].parse().unwrap();
        assert!(k_rr > 0.0, "{r:?}");
        assert_eq!(k_dr > 0.0, tau >= 0.7 - 1e-12, "{r:?}");
        assert_eq!(&r[2], "inf");
        assert_eq!(&r[5], "nan");
    }
}

#[test]
fn finite_sweep_converges_to_asymptotic() {
    let grid = ["--tau-min", "0.6", "--tau-max", "0.95", "--tau-steps", "4", "--omega-min", "1", "--omega-max", "1.4",
        "--omega-steps", "3", "--out", "-"];
    let mut fin = vec!["sweep", "--mu", "10000"];
    fin.extend(grid);
    let mut asy = vec!["sweep", "--mode", "asymptotic"];
    asy.extend(grid);
    let (f, a) = (csv_rows(&stdout(&run(&fin))), csv_rows(&stdout(&run(&asy))));
    assert_eq!(f.len(), 12);
    for (rf, ra) in f.iter().zip(&a) {
        for col in [8, 9] {
            let x: f64 = rf[col].parse().unwrap();
            let y: f64 = ra[col].parse().unwrap();
            assert!((x - y).abs() < 0.02, "{rf:?} vs {ra:?}");
        }
    }
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let grid = ["sweep", "--mu", "20", "--g-rule", "pure", "--tau-steps", "7", "--omega-steps", "5", "--out", "-"];
    let one = stdout(&bin().arg("--jobs").arg("1").args(grid).output().unwrap());
    let four = stdout(&bin().args(grid).args(["--jobs", "4"]).output().unwrap());
    let again = stdout(&bin().args(grid).args(["--jobs", "4"]).output().unwrap());
    assert_eq!(csv_rows(&one).len(), 35);
    assert_eq!(one, four);
    assert_eq!(four, again);
}

/// Half a unit in the ninth significant digit of `x`.
fn printed_precision(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    0.5 * 10f64.powi(x.abs().log10().floor() as i32 - 8)
}

#[test]
fn csv_rows_round_trip_through_rates() {
    let o = run(&[
        "sweep", "--mu", "7.5", "--g", "-4", "--form", "I", "--tau-min", "0.2", "--tau-max", "0.9", "--tau-steps", "3",
        "--omega-min", "1", "--omega-max", "3", "--omega-steps", "2", "--out", "-",
    ]);
    let header = ["tau", "omega", "mu", "g", "form", "i_xy", "holevo_x", "holevo_y", "k_dr", "k_rr", "separable"];
    for row in csv_rows(&stdout(&o)) {
        let v = json(&[
            "rates", "--tau", &row[0], "--omega", &row[1], "--mu", &row[2], "--g", &row[3], "--form", &row[4],
        ]);
        for (k, field) in header.iter().zip(&row) {
            match *k {
                "form" => assert_eq!(v[*k].as_str().unwrap(), field),
                "separable" => assert_eq!(v[*k].as_bool().unwrap().to_string(), *field),
                _ => {
                    let printed: f64 = field.parse().unwrap();
                    let fresh = num(&v, k);
                    let tol = 1e-9_f64.max(printed_precision(fresh) * 1.0000001);
                    assert!((printed - fresh).abs() <= tol, "{k}: {printed} vs {fresh}");
                }
            }
        }
    }
}

fn pgm_values(text: &str) -> (usize, usize, Vec<u8>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("P2"));
    let dims: Vec<usize> = lines.next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(lines.next(), Some("255"));
    let vals: Vec<u8> = lines.flat_map(|l| l.split_whitespace().map(|x| x.parse::<u8>().unwrap()).collect::<Vec<_>>()).collect();
    (dims[0], dims[1], vals)
}

fn region(dir: &Path, name: &str, extra: &[&str]) -> (usize, usize, Vec<u8>) {
    let out = dir.join(name);
    let mut args = vec!["region", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().all(|l| l.len() <= 70));
    assert!(out.with_extension("csv").exists());
    pgm_values(&text)
}

#[test]
fn region_maps() {
    let dir = tempfile::tempdir().unwrap();
    let row = ["--mode", "asymptotic", "--tau-min", "0.01", "--tau-max", "0.99", "--tau-steps", "99", "--omega-min", "1",
        "--omega-max", "1", "--omega-steps", "1"];
    let mut dr_args = row.to_vec();
    dr_args.extend(["--dir", "dr"]);
    let (w, h, dr) = region(dir.path(), "dr.pgm", &dr_args);
    assert_eq!((w, h, dr.len()), (99, 1, 99));
    let cell = 0.98 / 98.0;
    for (i, &v) in dr.iter().enumerate() {
        let tau = 0.01 + cell * i as f64;
        if (tau - 0.693).abs() > cell {
            assert_eq!(v == 255, tau > 0.693, "tau {tau}");
        }
    }
    let (_, _, rr) = region(dir.path(), "rr.pgm", &row);
    assert!(dr.iter().zip(&rr).all(|(d, r)| *d == 0 || *r == 255));
    assert!(rr.iter().filter(|&&v| v == 255).count() > dr.iter().filter(|&&v| v == 255).count());

    let (w, h, one) = region(dir.path(), "one.pgm", &["--mu", "3", "--tau-min", "0.5", "--tau-max", "0.5", "--tau-steps",
        "1", "--omega-min", "1", "--omega-max", "1", "--omega-steps", "1"]);
    assert_eq!((w, h, one.len()), (1, 1, 1));

    // low omega on the bottom row: noisier rows above are never more secure
    let (w, h, img) = region(dir.path(), "shade.pgm", &["--mode", "asymptotic", "--tau-steps", "30", "--omega-steps",
        "6", "--omega-max", "1.5", "--shade"]);
    assert_eq!((w, h), (30, 6));
    for x in 0..w {
        for y in 1..h {
            assert!(img[(y - 1) * w + x] <= img[y * w + x]);
        }
    }
    assert!(img.iter().any(|&v| v > 0 && v < 255));
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(&cfg, "# manifest\nmu = 4\ntau_steps = 3\nomega_steps = 1\nomega_max = 1\nout = -\ng_rule = max-separable\n").unwrap();
    let o = bin().args(["--config", cfg.to_str().unwrap(), "sweep", "--mu", "9"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[2] == "9" && r[3] == "8"));
    fs::write(&cfg, "mu = 4\nnot_a_flag = 1\n").unwrap();
    let o = bin().args(["rates", "--tau", "0.5", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_quick_and_negative_control() {
    let ok = run(&["--seed", "42", "verify", "--level", "quick"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = run(&["--seed", "42", "verify", "--corrupt-entropy"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("entropy_additivity"), "{err}");
}
