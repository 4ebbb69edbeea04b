//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so it shows up in normal `cargo test` output.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use common::{erfc_reference, point, rel, ReceiverOracle};
use num_complex::Complex64;
use qi_opa::cli::config::{grid, Scale, SweepSpec};
use qi_opa::cli::figures::{figure_table, FIGURES, GAIN_FAMILY};
use qi_opa::cli::table::Table;
use qi_opa::detection::{detection_from_sidebands, evaluate, ErrorModel, ScenarioParams};
use qi_opa::dynamics::{drift_matrix, squeezed_frame, stability};
use qi_opa::gaussian::{covariance_from_sidebands, log_negativity, CovarianceMatrix};
use qi_opa::numerics::{eigenvalues, erfc, ComplexMatrix};
use qi_opa::spectra::{cross_check, photon_numbers, Sidebands};
use qi_opa::{DerivedParams, PhysicalParams, ThermalOccupations};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn is_stable(p: &PhysicalParams, d: &DerivedParams) -> bool {
    stability(&drift_matrix(p, d)).map(|r| r.stable).unwrap_or(false)
}

/// Random stable points over G in [0, 2.5) kappa_o, all theta, omega in [0.5, 1.5] omega_m.
fn random_stable_points(seed: u64, count: usize) -> Vec<(PhysicalParams, DerivedParams, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (p, d) = point(rng.gen_range(0.0..2.5), rng.gen_range(0.0..2.0 * PI));
        let omega = rng.gen_range(0.5..1.5) * p.omega_m;
        if is_stable(&p, &d) {
            out.push((p, d, omega));
        }
    }
    out
}

fn coefficient_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (p, d, omega) in random_stable_points(1, 200) {
        for w in [omega, -omega] {
            // Zero tolerance lists every coefficient that is not bit-identical.
            let all = cross_check(&p, &d, w, 0.0).map_err(|e| e.to_string())?;
            for c in all {
                worst = worst.max(c.relative_error);
                if c.relative_error > 1e-9 {
                    failures.push(c.coefficient);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && secs < 5.0,
        format!("200 stable points, worst relative error {worst:.2e}, {} over 1e-9, {secs:.2} s", failures.len()),
    )
}

fn receiver_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for (p, d, omega) in random_stable_points(3, 50) {
        let scenario = ScenarioParams {
            eta: rng.gen_range(0.001..0.5),
            mode_pairs: 1_000_000,
            n_background: rng.gen_range(0.0..1000.0),
        };
        let sb = Sidebands::evaluate(&p, &d, omega).map_err(|e| e.to_string())?;
        let stats = detection_from_sidebands(&sb, &d.thermal, &scenario, ErrorModel::AsPrinted)
            .map_err(|e| e.to_string())?;
        for (h, eta) in [(&stats.h0, 0.0), (&stats.h1, scenario.eta)] {
            let oracle = ReceiverOracle::new(&p, &d, omega, eta, scenario.n_background);
            let (d_plus, f_plus) = oracle.count_coefficients(1.0);
            let (d_minus, f_minus) = oracle.count_coefficients(-1.0);
            let (k, t) = oracle.reflected_coefficients();
            let pairs = [
                (&h.plus_terms.d, &d_plus),
                (&h.plus_terms.f, &f_plus),
                (&h.minus_terms.d, &d_minus),
                (&h.minus_terms.f, &f_minus),
                (&h.reflected_terms.k, &k),
                (&h.reflected_terms.t, &t),
            ];
            for (ours, theirs) in pairs {
                for q in 0..4 {
                    worst = worst.max(rel(ours[q], theirs[q]));
                }
            }
            worst = worst.max(rel(h.variance, oracle.variance()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && secs < 10.0,
        format!("50 stable points, D/F/K/T and variances worst relative error {worst:.2e}, {secs:.2} s"),
    )
}

fn covariance_physicality() -> Outcome {
    let mut min_nu = f64::INFINITY;
    let mut count = 0;
    let mut visit = |g: f64, theta: f64, w: f64| -> Result<(), String> {
        let (p, d) = point(g, theta);
        if !is_stable(&p, &d) {
            return Ok(());
        }
        let sb = Sidebands::evaluate(&p, &d, w * p.omega_m).map_err(|e| e.to_string())?;
        let (nu_minus, _) = covariance_from_sidebands(&sb, &d.thermal).symplectic_eigenvalues();
        min_nu = min_nu.min(nu_minus);
        count += 1;
        Ok(())
    };
    for g in grid(0.0, 2.5, 101, Scale::Linear) {
        for t in grid(0.0, 1.0, 101, Scale::Linear) {
            visit(g, 2.0 * PI * t, 1.0)?;
        }
    }
    for w in grid(0.5, 1.5, 201, Scale::Linear) {
        for g in GAIN_FAMILY {
            visit(g, 0.62 * PI, w)?;
        }
    }
    for g in grid(0.0, 1.7, 201, Scale::Linear) {
        visit(g, 0.62 * PI, 1.0)?;
    }

    let r: f64 = 0.5;
    let (a, c) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    let tmsv = CovarianceMatrix {
        entries: [[a, 0.0, c, 0.0], [0.0, a, 0.0, -c], [c, 0.0, a, 0.0], [0.0, -c, 0.0, a]],
        omega: 0.0,
    };
    let e_n = log_negativity(&tmsv).map_err(|e| e.to_string())?.log_negativity;
    check(
        min_nu >= 0.5 - 1e-9 && (e_n - 1.0).abs() <= 1e-10,
        format!("{count} stable fig3 grid points, min symplectic eigenvalue {min_nu:.12}; TMSV r = 0.5 gives E_N = {e_n:.15}"),
    )
}

fn max_entanglement_over_theta(g: f64) -> Result<f64, String> {
    let mut best: f64 = 0.0;
    for t in grid(0.0, 2.0 * PI, 721, Scale::Linear) {
        let (p, d) = point(g, t);
        if !is_stable(&p, &d) {
            continue;
        }
        let sb = Sidebands::evaluate(&p, &d, p.omega_m).map_err(|e| e.to_string())?;
        let e = log_negativity(&covariance_from_sidebands(&sb, &d.thermal)).map_err(|e| e.to_string())?;
        best = best.max(e.log_negativity);
    }
    Ok(best)
}

fn entanglement_ordering() -> Outcome {
    let maxima = GAIN_FAMILY
        .iter()
        .map(|g| max_entanglement_over_theta(*g))
        .collect::<Result<Vec<_>, _>>()?;
    let monotone = maxima.windows(2).all(|w| w[1] >= w[0]);
    check(
        monotone && maxima[3] > maxima[0],
        format!("max_theta E_N at G = 0, 0.5, 1.0, 1.7 kappa_o: {maxima:.4?}"),
    )
}

fn figure(name: &str) -> Result<Table, String> {
    figure_table(name, &SweepSpec::default(), 0)
        .map(|d| d.table)
        .ok_or_else(|| format!("no figure {name}"))
}

fn column(t: &Table, name: &str) -> Result<Vec<f64>, String> {
    t.column(name)
        .ok_or_else(|| format!("no column {name}"))?
        .into_iter()
        .map(|v| v.ok_or_else(|| format!("empty cell in {name}")))
        .collect()
}

fn conversion_monotonicity() -> Outcome {
    let t = figure("fig3d")?;
    let n_ow = column(&t, "n_o_given_w")?;
    let n_wo = column(&t, "n_w_given_o")?;
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    check(
        increasing(&n_ow) && increasing(&n_wo),
        format!(
            "201 points on G in [0, 1.7] kappa_o: n(o|w) {:.4e} -> {:.4e}, n(w|o) {:.4e} -> {:.4e}",
            n_ow[0],
            n_ow[200],
            n_wo[0],
            n_wo[200]
        ),
    )
}

fn detection_map_ordering() -> Outcome {
    let snr_map = figure("fig4a")?;
    let p_map = figure("fig4b")?;
    let g = column(&snr_map, "G_over_kappa_o")?;
    let snr = snr_map.column("SNR").ok_or("no SNR")?;
    let log_p = p_map.column("log10_P").ok_or("no log10_P")?;
    let p = p_map.column("P").ok_or("no P")?;
    let at_zero = (0..g.len()).find(|&i| g[i] == 0.0).ok_or("no G = 0 row")?;
    let (snr0, log_p0) = (snr[at_zero].ok_or("G = 0 unstable")?, log_p[at_zero].ok_or("G = 0 unstable")?);
    let best = (0..g.len())
        .filter(|&i| g[i] > 0.0 && snr[i].is_some())
        .max_by(|&a, &b| snr[a].unwrap().total_cmp(&snr[b].unwrap()))
        .ok_or("no stable G > 0 point")?;
    let (snr_best, log_p_best) = (snr[best].unwrap(), log_p[best].ok_or("P missing at best SNR")?);
    check(
        snr_best > snr0 && log_p_best < log_p0 && p[best] <= p[at_zero],
        format!(
            "SNR(G=0) = {snr0:.3}, max SNR = {snr_best:.3} at G = {:.3} kappa_o; log10 P {log_p0:.3} -> {log_p_best:.3}",
            g[best]
        ),
    )
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn error_probability_trends() -> Outcome {
    let by_m = figure("fig5a")?;
    let by_eta = figure("fig5b")?;
    let mut notes = Vec::new();
    let mut ok = true;
    for t in [&by_m, &by_eta] {
        for g in GAIN_FAMILY {
            ok &= strictly_decreasing(&column(t, &format!("log10_P[G={g}kappa_o]"))?);
        }
        let with = column(t, "log10_P[G=1.7kappa_o]")?;
        let without = column(t, "log10_P[G=0kappa_o]")?;
        ok &= with.iter().zip(&without).all(|(a, b)| a < b);
    }
    let p_best = *column(&by_m, "P[G=1.7kappa_o]")?.last().unwrap();
    let log_p_best = *column(&by_m, "log10_P[G=1.7kappa_o]")?.last().unwrap();
    ok &= p_best < 1e-2;
    notes.push(format!("P(M=1e6, G=1.7 kappa_o, eta=0.05) = {p_best:.3e} (log10 {log_p_best:.1})"));
    notes.push("log10 P strictly decreasing in M and eta for every G; G = 1.7 below G = 0 pointwise".into());
    check(ok, notes.join("; "))
}

fn quantum_advantage() -> Outcome {
    let mut rows = 0;
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for name in ["fig6a", "fig6b"] {
        let t = figure(name)?;
        let qi = column(&t, "log10_P_qi")?;
        let coh = column(&t, "log10_P_coh")?;
        let p_qi = column(&t, "P_qi")?;
        let p_coh = column(&t, "P_coh")?;
        for i in 0..qi.len() {
            ok &= qi[i] < coh[i] && p_qi[i] < p_coh[i];
            margin = margin.min(coh[i] - qi[i]);
            rows += 1;
        }
    }
    check(ok, format!("P_qi < P_coh on all {rows} rows, smallest log10 margin {margin:.3}"))
}

fn trivial_limits() -> Outcome {
    let (p, d) = point(1.7, 0.62 * PI);
    let no_target = ScenarioParams { eta: 0.0, ..ScenarioParams::default() };
    let stats = evaluate(&p, &d, 1.02 * p.omega_m, &no_target, ErrorModel::AsPrinted).map_err(|e| e.to_string())?;
    let eta_zero = stats.snr == 0.0 && stats.p_err == 0.5;

    let zero = Complex64::new(0.0, 0.0);
    let vacuum = DerivedParams {
        drive_w: 0.0,
        drive_o: 0.0,
        alpha_w: zero,
        alpha_o: zero,
        g_w_eff: zero,
        g_o_eff: zero,
        thermal: ThermalOccupations::VACUUM,
    };
    let p0 = PhysicalParams::default();
    let sb = Sidebands::evaluate(&p0, &vacuum, p0.omega_m).map_err(|e| e.to_string())?;
    let v = covariance_from_sidebands(&sb, &vacuum.thermal);
    let mut v_dev: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 0.5 } else { 0.0 };
            v_dev = v_dev.max((v.entries[i][j] - expected).abs());
        }
    }
    let e_n = log_negativity(&v).map_err(|e| e.to_string())?.log_negativity;
    let scenario = ScenarioParams { eta: 0.3, mode_pairs: 100, n_background: 0.0 };
    let counts = detection_from_sidebands(&sb, &vacuum.thermal, &scenario, ErrorModel::AsPrinted)
        .map_err(|e| e.to_string())?;
    let photons = photon_numbers(&sb.plus, &vacuum.thermal);
    let max_count = [counts.h0.n_plus, counts.h0.n_minus, counts.h1.n_plus, counts.h1.n_minus, photons.n_w_out]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let vacuum_ok = v_dev <= 1e-15 && e_n == 0.0 && max_count <= 1e-15;

    let frame = squeezed_frame(&p0).map_err(|e| e.to_string())?;
    let frame_ok = frame.r == 0.0 && frame.g_os == p0.g_o && frame.g_op == 0.0;
    check(
        eta_zero && vacuum_ok && frame_ok,
        format!(
            "eta = 0: SNR = {}, P = {}; vacuum: |V - I/2| = {v_dev:.1e}, E_N = {e_n}, counts <= {max_count:.1e}; G = 0: r = {}, g_os = g_o {}",
            stats.snr, stats.p_err, frame.r, frame.g_os == p0.g_o
        ),
    )
}

fn numerics() -> Outcome {
    let mut worst_erfc: f64 = 0.0;
    for i in 0..=20000 {
        let x = -10.0 + i as f64 * 1e-3;
        worst_erfc = worst_erfc.max(rel(erfc(x), erfc_reference(x)));
    }
    let mut rng = StdRng::seed_from_u64(10);
    let (mut worst_trace, mut worst_det): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let rows: Vec<Vec<Complex64>> = (0..6)
            .map(|_| (0..6).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let m = ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let ev = eigenvalues(&m).map_err(|e| e.to_string())?;
        let (tr, det) = (m.trace(), m.determinant());
        worst_trace = worst_trace.max((ev.iter().sum::<Complex64>() - tr).norm() / tr.norm().max(m.norm()));
        worst_det = worst_det.max((ev.iter().product::<Complex64>() - det).norm() / det.norm());
    }
    check(
        worst_erfc <= 1e-12 && worst_trace <= 1e-9 && worst_det <= 1e-7,
        format!(
            "erfc worst relative error {worst_erfc:.2e} on [-10, 10]; 1000 random 6x6: trace {worst_trace:.2e}, determinant {worst_det:.2e}"
        ),
    )
}

fn determinism() -> Outcome {
    let run = |name: &str, jobs: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qi-opa"))
            .args(["figure", name, "--jobs", jobs])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{name} exited with {:?}", out.status.code()));
        }
        Ok(out.stdout)
    };
    let mut bytes = 0;
    for name in FIGURES {
        let serial = run(name, "1")?;
        let parallel = run(name, "4")?;
        let again = run(name, "4")?;
        if serial != parallel || parallel != again {
            return Err(format!("{name} differs between runs"));
        }
        bytes += serial.len();
    }
    Ok(format!("all 13 figures identical across --jobs 1 / 4 / 4 ({bytes} bytes each pass)"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("coefficient oracle equivalence", coefficient_oracle),
        ("receiver statistics oracle equivalence", receiver_oracle),
        ("covariance physicality", covariance_physicality),
        ("entanglement grows with OPA gain", entanglement_ordering),
        ("conversion photon numbers grow with G", conversion_monotonicity),
        ("SNR and P ordering over (G, theta)", detection_map_ordering),
        ("error probability trends in M and eta", error_probability_trends),
        ("quantum illumination beats coherent radar", quantum_advantage),
        ("trivial limits", trivial_limits),
        ("numerics", numerics),
        ("determinism", determinism),
    ];
    let mut stderr = std::io::stderr();
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let _ = writeln!(stderr, "acceptance {:>2} {tag}  {title}: {detail}", i + 1);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
