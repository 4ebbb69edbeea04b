//! Grid evaluation. Every grid point is independent; points are evaluated on a
//! worker pool and collected back in row-major order.

use rayon::prelude::*;

use super::config::{Output, SweepSpec, Variable};
use super::table::{Cell, Table};
use crate::detection::{coherent_from_transmitted, detection_from_sidebands, ErrorModel, ScenarioParams};
use crate::dynamics::{drift_matrix, stability};
use crate::error::Error;
use crate::gaussian::{covariance_from_sidebands, log_negativity};
use crate::params::{derive, PhysicalParams};
use crate::spectra::{photon_numbers, Sidebands};

/// Everything needed to evaluate one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub physics: PhysicalParams,
    pub scenario: ScenarioParams,
    pub omega: f64,
    pub error_model: ErrorModel,
}

impl Point {
    pub fn base(spec: &SweepSpec) -> Self {
        Self {
            physics: spec.physics,
            scenario: spec.scenario,
            omega: spec.omega,
            error_model: spec.error_model,
        }
    }

    pub fn set(&mut self, variable: Variable, value: f64) {
        match variable {
            Variable::G => self.physics.opa_gain = value,
            Variable::Theta => self.physics.opa_phase = value,
            Variable::Omega => self.omega = value,
            Variable::M => self.scenario.mode_pairs = mode_pairs(value),
            Variable::Eta => self.scenario.eta = value,
            Variable::NB => self.scenario.n_background = value,
            Variable::PW => self.physics.power_w = value,
            Variable::PO => self.physics.power_o = value,
            Variable::KappaW => self.physics.kappa_w = value,
            Variable::KappaO => self.physics.kappa_o = value,
        }
    }
}

/// Swept mode-pair counts are rounded to the nearest integer; values below
/// one become 0 and are rejected by scenario validation.
pub fn mode_pairs(value: f64) -> u64 {
    if value.is_finite() && value >= 0.5 {
        value.round() as u64
    } else {
        0
    }
}

/// Observables at one point. Cells stay `None` at unstable points and for
/// quantities that failed or were not requested.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointResult {
    pub stable: Option<bool>,
    /// Largest real part of the drift-matrix spectrum, rad/s.
    pub max_real_part: Option<f64>,
    pub log_negativity: Option<f64>,
    pub n_o_given_w: Option<f64>,
    pub n_w_given_o: Option<f64>,
    pub snr: Option<f64>,
    pub p_err: Option<f64>,
    pub log10_p_err: Option<f64>,
    pub snr_coh: Option<f64>,
    pub p_coh: Option<f64>,
    pub log10_p_coh: Option<f64>,
    pub error: Option<Error>,
}

impl PointResult {
    /// Column names and values contributed by one output.
    pub fn cells(&self, output: Output, omega_m: f64) -> Vec<(&'static str, Option<f64>)> {
        match output {
            Output::Stability => vec![("max_re_over_omega_m", self.max_real_part.map(|x| x / omega_m))],
            Output::LogNegativity => vec![("E_N", self.log_negativity)],
            Output::OpticalGivenMicrowave => vec![("n_o_given_w", self.n_o_given_w)],
            Output::MicrowaveGivenOptical => vec![("n_w_given_o", self.n_w_given_o)],
            Output::Snr => vec![("SNR", self.snr)],
            Output::ErrorProbability => vec![("P", self.p_err), ("log10_P", self.log10_p_err)],
            Output::CoherentSnr => vec![("SNR_coh", self.snr_coh)],
            Output::CoherentErrorProbability => vec![("P_coh", self.p_coh), ("log10_P_coh", self.log10_p_coh)],
        }
    }
}

pub fn evaluate_point(point: &Point, outputs: &[Output]) -> PointResult {
    let mut result = PointResult::default();
    if let Err(e) = evaluate_into(point, outputs, &mut result) {
        result.error = Some(e);
    }
    result
}

fn evaluate_into(point: &Point, outputs: &[Output], r: &mut PointResult) -> Result<(), Error> {
    let physics = point.physics.validated()?;
    let scenario = point.scenario.validated()?;
    if !point.omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("must be finite, got {}", point.omega),
        });
    }
    let derived = derive(&physics)?;
    let report = stability(&drift_matrix(&physics, &derived))?;
    r.stable = Some(report.stable);
    r.max_real_part = Some(report.max_real_part);
    if !report.stable || outputs.iter().all(|o| *o == Output::Stability) {
        return Ok(());
    }

    let wants = |o: Output| outputs.contains(&o);
    let sb = Sidebands::evaluate(&physics, &derived, point.omega)?;
    let thermal = &derived.thermal;
    let mut first_error = None;

    if wants(Output::LogNegativity) {
        match log_negativity(&covariance_from_sidebands(&sb, thermal)) {
            Ok(e) => r.log_negativity = Some(e.log_negativity),
            Err(e) => first_error = first_error.or(Some(e)),
        }
    }
    let photons = photon_numbers(&sb.plus, thermal);
    if wants(Output::OpticalGivenMicrowave) {
        r.n_o_given_w = Some(photons.n_o_given_w);
    }
    if wants(Output::MicrowaveGivenOptical) {
        r.n_w_given_o = Some(photons.n_w_given_o);
    }
    if wants(Output::Snr) || wants(Output::ErrorProbability) {
        match detection_from_sidebands(&sb, thermal, &scenario, point.error_model) {
            Ok(stats) => {
                if wants(Output::Snr) {
                    r.snr = Some(stats.snr);
                }
                if wants(Output::ErrorProbability) {
                    r.p_err = Some(stats.p_err);
                    r.log10_p_err = Some(stats.log10_p_err);
                }
            }
            Err(e) => first_error = first_error.or(Some(e)),
        }
    }
    if wants(Output::CoherentSnr) || wants(Output::CoherentErrorProbability) {
        let coh = coherent_from_transmitted(photons.n_w_out, &scenario, point.error_model)?;
        if wants(Output::CoherentSnr) {
            r.snr_coh = Some(coh.snr);
        }
        if wants(Output::CoherentErrorProbability) {
            r.p_coh = Some(coh.p_err);
            r.log10_p_coh = Some(coh.log10_p_err);
        }
    }
    first_error.map_or(Ok(()), Err)
}

/// Maps `f` over `items` on a pool of `jobs` threads (0 = all cores), keeping order.
pub fn parallel_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

/// Row-major cartesian product of the axis grids (first axis outermost).
pub fn grid_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, values| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

/// Tally used to pick the process exit status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub points: usize,
    pub stable: usize,
    pub unstable: usize,
    /// Points whose evaluation raised a physics-domain error.
    pub failed: usize,
    pub numeric_failures: usize,
}

impl Summary {
    pub fn tally<'a>(results: impl IntoIterator<Item = &'a PointResult>) -> Self {
        let mut s = Summary::default();
        for r in results {
            s.points += 1;
            match &r.error {
                Some(e) if e.is_numeric_failure() => s.numeric_failures += 1,
                Some(_) => s.failed += 1,
                None if r.stable == Some(true) => s.stable += 1,
                None => s.unstable += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub table: Table,
    pub results: Vec<PointResult>,
    pub summary: Summary,
}

pub fn run_sweep(spec: &SweepSpec, jobs: usize, provenance: Vec<String>) -> SweepResult {
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.grid()).collect();
    let coordinates = grid_points(&grids);
    let base = Point::base(spec);
    let results = parallel_map(&coordinates, jobs, |coords| {
        let mut point = base;
        for (axis, value) in spec.axes.iter().zip(coords) {
            point.set(axis.variable, *value);
        }
        evaluate_point(&point, &spec.outputs)
    });

    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.variable.name().to_string()).collect();
    columns.push("stable".into());
    let omega_m = spec.physics.omega_m;
    let template = PointResult::default();
    for output in &spec.outputs {
        columns.extend(template.cells(*output, omega_m).into_iter().map(|(n, _)| n.to_string()));
    }
    columns.push("error".into());

    let rows = coordinates
        .iter()
        .zip(&results)
        .map(|(coords, r)| {
            let mut row: Vec<Cell> = spec
                .axes
                .iter()
                .zip(coords)
                .map(|(axis, v)| match axis.variable {
                    Variable::M => Cell::Int(mode_pairs(*v) as i64),
                    _ => Cell::Float(*v),
                })
                .collect();
            row.push(r.stable.map_or(Cell::Empty, |s| Cell::Int(s as i64)));
            for output in &spec.outputs {
                row.extend(r.cells(*output, omega_m).into_iter().map(|(_, v)| Cell::opt(v)));
            }
            row.push(r.error.as_ref().map_or(Cell::Empty, |e| Cell::Text(e.to_string())));
            row
        })
        .collect();

    SweepResult {
        summary: Summary::tally(&results),
        table: Table {
            provenance,
            columns,
            rows,
        },
        results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse_config;

    #[test]
    fn single_point_stability() {
        let spec = parse_config("outputs = stability").unwrap();
        let sweep = run_sweep(&spec, 1, Vec::new());
        assert_eq!(sweep.table.rows.len(), 1);
        assert_eq!(sweep.table.columns, ["stable", "max_re_over_omega_m", "error"]);
        assert_eq!(sweep.table.rows[0][0], Cell::Int(1));
        assert_eq!(sweep.summary.stable, 1);
    }

    #[test]
    fn row_count_is_product_of_steps_and_order_is_row_major() {
        let spec = parse_config("axis1 = G 0 1kappa_o 3\naxis2 = theta 0 1pi 4\noutputs = E_N").unwrap();
        let sweep = run_sweep(&spec, 3, Vec::new());
        assert_eq!(sweep.table.rows.len(), 12);
        let g = sweep.table.column("G").unwrap();
        let theta = sweep.table.column("theta").unwrap();
        assert_eq!(g[3], Some(0.0));
        assert_eq!(g[4], Some(0.5 * spec.physics.kappa_o));
        assert_eq!(theta[5], Some(std::f64::consts::PI / 3.0));
    }

    #[test]
    fn unstable_points_have_no_observables() {
        let spec = parse_config("P_o = 1W\naxis1 = G 0 1kappa_o 3").unwrap();
        let sweep = run_sweep(&spec, 2, Vec::new());
        assert_eq!(sweep.summary.unstable, 3);
        for row in &sweep.table.rows {
            assert_eq!(row[1], Cell::Int(0));
            // Everything after the stability cells is blank.
            assert!(row[3..].iter().all(|c| *c == Cell::Empty), "{row:?}");
        }
    }

    #[test]
    fn errors_are_recorded_per_row() {
        let spec = parse_config("axis1 = eta 0.5 1.5 3\noutputs = SNR").unwrap();
        let sweep = run_sweep(&spec, 1, Vec::new());
        let err = sweep.table.column_index("error").unwrap();
        assert_eq!(sweep.table.rows[0][err], Cell::Empty);
        assert!(matches!(sweep.table.rows[1][err], Cell::Text(_)));
        assert!(matches!(sweep.table.rows[2][err], Cell::Text(_)));
        assert_eq!(sweep.summary.failed, 2);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let spec = parse_config("axis1 = G 0 1.7kappa_o 9\naxis2 = omega 0.8omega_m 1.2omega_m 7").unwrap();
        let one = run_sweep(&spec, 1, Vec::new()).table.to_csv();
        let many = run_sweep(&spec, 4, Vec::new()).table.to_csv();
        assert_eq!(one, many);
    }
}
