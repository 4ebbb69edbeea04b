//! Built-in datasets for each figure of the converter study.

use std::f64::consts::PI;

use super::config::{grid, serialize, Output, Scale, SweepSpec, Variable};
use super::sweep::{evaluate_point, grid_points, mode_pairs, parallel_map, Point, PointResult, Summary};
use super::table::{Cell, Table};

pub const FIGURES: [&str; 13] = [
    "fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig6a",
    "fig6b",
];

/// OPA gains, in units of `kappa_o`, used for the curve families.
pub const GAIN_FAMILY: [f64; 4] = [0.0, 0.5, 1.0, 1.7];

const MAP_STEPS: usize = 101;
const CURVE_STEPS: usize = 201;

#[derive(Debug, Clone, Copy)]
enum Unit {
    None,
    KappaO,
    OmegaM,
    /// Column shows `theta / 2pi`; the config line is written in units of pi.
    TwoPi,
}

#[derive(Debug, Clone, Copy)]
struct FigureAxis {
    variable: Variable,
    unit: Unit,
    min: f64,
    max: f64,
    steps: usize,
    scale: Scale,
}

impl FigureAxis {
    const fn new(variable: Variable, unit: Unit, min: f64, max: f64, steps: usize) -> Self {
        Self {
            variable,
            unit,
            min,
            max,
            steps,
            scale: Scale::Linear,
        }
    }

    fn label(&self) -> String {
        match self.unit {
            Unit::None => self.variable.name().to_string(),
            Unit::KappaO => format!("{}_over_kappa_o", self.variable.name()),
            Unit::OmegaM => format!("{}_over_omega_m", self.variable.name()),
            Unit::TwoPi => format!("{}_over_2pi", self.variable.name()),
        }
    }

    fn factor(&self, spec: &SweepSpec) -> f64 {
        match self.unit {
            Unit::None => 1.0,
            Unit::KappaO => spec.physics.kappa_o,
            Unit::OmegaM => spec.physics.omega_m,
            Unit::TwoPi => 2.0 * PI,
        }
    }

    fn config_line(&self, index: usize) -> String {
        let bound = |x: f64| match self.unit {
            Unit::None => format!("{x:?}"),
            Unit::KappaO => format!("{x:?}kappa_o"),
            Unit::OmegaM => format!("{x:?}omega_m"),
            Unit::TwoPi => format!("{:?}pi", 2.0 * x),
        };
        let scale = match self.scale {
            Scale::Linear => "linear",
            Scale::Log => "log",
        };
        format!(
            "axis{index} = {} {} {} {} {scale}",
            self.variable.name(),
            bound(self.min),
            bound(self.max),
            self.steps
        )
    }
}

struct Figure {
    description: &'static str,
    spec: SweepSpec,
    axes: Vec<FigureAxis>,
    /// `G / kappa_o` values for a curve family; empty for a single dataset.
    family: Vec<f64>,
    outputs: Vec<Output>,
    renames: &'static [(&'static str, &'static str)],
}

fn gain_map() -> Vec<FigureAxis> {
    vec![
        FigureAxis::new(Variable::G, Unit::KappaO, 0.0, 2.5, MAP_STEPS),
        FigureAxis::new(Variable::Theta, Unit::TwoPi, 0.0, 1.0, MAP_STEPS),
    ]
}

fn omega_curve() -> Vec<FigureAxis> {
    vec![FigureAxis::new(Variable::Omega, Unit::OmegaM, 0.5, 1.5, CURVE_STEPS)]
}

fn gain_curve() -> Vec<FigureAxis> {
    vec![FigureAxis::new(Variable::G, Unit::KappaO, 0.0, 1.7, CURVE_STEPS)]
}

fn mode_pair_curve() -> Vec<FigureAxis> {
    vec![FigureAxis {
        scale: Scale::Log,
        ..FigureAxis::new(Variable::M, Unit::None, 1e4, 1e6, CURVE_STEPS)
    }]
}

fn reflectivity_curve() -> Vec<FigureAxis> {
    vec![FigureAxis::new(Variable::Eta, Unit::None, 0.01, 0.1, CURVE_STEPS)]
}

fn figure(name: &str, base: &SweepSpec) -> Option<Figure> {
    let mut spec = base.clone();
    let kappa_o = spec.physics.kappa_o;
    let omega_m = spec.physics.omega_m;
    let set_theta = |s: &mut SweepSpec| s.physics.opa_phase = 0.62 * PI;
    let fig = |description: &'static str, axes: Vec<FigureAxis>, family: &[f64], outputs: &[Output]| Figure {
        description,
        spec: SweepSpec::default(),
        axes,
        family: family.to_vec(),
        outputs: outputs.to_vec(),
        renames: &[],
    };
    spec.omega = omega_m;
    let mut f = match name {
        "fig2" => fig("stability versus G/kappa_o and theta/2pi", gain_map(), &[], &[Output::Stability]),
        "fig3a" => fig("E_N versus G/kappa_o and theta/2pi at omega = omega_m", gain_map(), &[], &[Output::LogNegativity]),
        "fig3b" => {
            set_theta(&mut spec);
            fig("E_N versus omega/omega_m at theta = 0.62pi", omega_curve(), &GAIN_FAMILY, &[Output::LogNegativity])
        }
        "fig3c" => {
            set_theta(&mut spec);
            fig("E_N versus G/kappa_o at theta = 0.62pi, omega = omega_m", gain_curve(), &[], &[Output::LogNegativity])
        }
        "fig3d" => {
            set_theta(&mut spec);
            fig(
                "n(o|w) and n(w|o) versus G/kappa_o at theta = 0.62pi, omega = omega_m",
                gain_curve(),
                &[],
                &[Output::OpticalGivenMicrowave, Output::MicrowaveGivenOptical],
            )
        }
        "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            spec.scenario.eta = 0.07;
            spec.scenario.mode_pairs = 1_000_000;
            spec.scenario.n_background = 610.0;
            let snr = name == "fig4a" || name == "fig4c";
            let output = if snr { Output::Snr } else { Output::ErrorProbability };
            if name == "fig4a" || name == "fig4b" {
                let d = if snr { "SNR versus G/kappa_o and theta/2pi" } else { "P versus G/kappa_o and theta/2pi" };
                fig(d, gain_map(), &[], &[output])
            } else {
                set_theta(&mut spec);
                let d = if snr { "SNR versus omega/omega_m at theta = 0.62pi" } else { "P versus omega/omega_m at theta = 0.62pi" };
                fig(d, omega_curve(), &GAIN_FAMILY, &[output])
            }
        }
        "fig5a" | "fig5b" | "fig6a" | "fig6b" => {
            set_theta(&mut spec);
            spec.omega = 1.02 * omega_m;
            spec.scenario.n_background = 610.0;
            spec.scenario.eta = 0.05;
            spec.scenario.mode_pairs = 1_000_000;
            let axes = if name.ends_with('a') { mode_pair_curve() } else { reflectivity_curve() };
            if name.starts_with("fig5") {
                let d = if name == "fig5a" { "P versus M at eta = 0.05" } else { "P versus eta at M = 1e6" };
                fig(d, axes, &GAIN_FAMILY, &[Output::ErrorProbability])
            } else {
                spec.physics.opa_gain = 1.7 * kappa_o;
                let d = if name == "fig6a" {
                    "quantum illumination versus coherent radar, P versus M at G = 1.7kappa_o, eta = 0.05"
                } else {
                    "quantum illumination versus coherent radar, P versus eta at G = 1.7kappa_o, M = 1e6"
                };
                let mut f = fig(
                    d,
                    axes,
                    &[],
                    &[Output::Snr, Output::ErrorProbability, Output::CoherentSnr, Output::CoherentErrorProbability],
                );
                f.renames = &[("P", "P_qi"), ("log10_P", "log10_P_qi"), ("SNR", "SNR_qi")];
                f
            }
        }
        _ => return None,
    };
    spec.axes.clear();
    spec.outputs = f.outputs.clone();
    f.spec = spec;
    Some(f)
}

/// Result of a figure run.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub table: Table,
    pub summary: Summary,
}

/// Builds the dataset for `name`, taking every parameter the figure does not
/// pin from `base`. Returns `None` for an unknown name.
pub fn figure_table(name: &str, base: &SweepSpec, jobs: usize) -> Option<FigureData> {
    let fig = figure(name, base)?;
    let spec = &fig.spec;
    let factors: Vec<f64> = fig.axes.iter().map(|a| a.factor(spec)).collect();
    let grids: Vec<Vec<f64>> = fig.axes.iter().map(|a| grid(a.min, a.max, a.steps, a.scale)).collect();
    let coordinates = grid_points(&grids);
    let members: Vec<Option<f64>> = if fig.family.is_empty() {
        vec![None]
    } else {
        fig.family.iter().map(|g| Some(*g)).collect()
    };

    let jobs_list: Vec<(usize, Option<f64>)> = (0..coordinates.len())
        .flat_map(|i| members.iter().map(move |m| (i, *m)))
        .collect();
    let results: Vec<PointResult> = parallel_map(&jobs_list, jobs, |(i, member)| {
        let mut point = Point::base(spec);
        if let Some(g) = member {
            point.physics.opa_gain = g * spec.physics.kappa_o;
        }
        for ((axis, value), factor) in fig.axes.iter().zip(&coordinates[*i]).zip(&factors) {
            point.set(axis.variable, value * factor);
        }
        evaluate_point(&point, &fig.outputs)
    });

    let omega_m = spec.physics.omega_m;
    let template = PointResult::default();
    let rename = |n: &str| -> String {
        fig.renames
            .iter()
            .find(|(from, _)| *from == n)
            .map_or(n.to_string(), |(_, to)| to.to_string())
    };
    let suffix = |m: &Option<f64>| m.map_or(String::new(), |g| format!("[G={g}kappa_o]"));

    let mut columns: Vec<String> = fig.axes.iter().map(|a| a.label()).collect();
    for m in &members {
        columns.push(format!("stable{}", suffix(m)));
        for output in &fig.outputs {
            for (n, _) in template.cells(*output, omega_m) {
                columns.push(format!("{}{}", rename(n), suffix(m)));
            }
        }
    }
    columns.push("error".into());

    let rows = coordinates
        .iter()
        .zip(results.chunks(members.len()))
        .map(|(coords, chunk)| {
            let mut row: Vec<Cell> = fig
                .axes
                .iter()
                .zip(coords)
                .map(|(axis, v)| match (axis.variable, axis.unit) {
                    (Variable::M, _) => Cell::Int(mode_pairs(*v) as i64),
                    _ => Cell::Float(*v),
                })
                .collect();
            let mut errors = Vec::new();
            for (m, r) in members.iter().zip(chunk) {
                row.push(r.stable.map_or(Cell::Empty, |s| Cell::Int(s as i64)));
                for output in &fig.outputs {
                    row.extend(r.cells(*output, omega_m).into_iter().map(|(_, v)| Cell::opt(v)));
                }
                if let Some(e) = &r.error {
                    errors.push(format!("{}{e}", m.map_or(String::new(), |g| format!("G={g}kappa_o: "))));
                }
            }
            row.push(if errors.is_empty() { Cell::Empty } else { Cell::Text(errors.join("; ")) });
            row
        })
        .collect();

    let mut provenance = vec![
        format!("qi-opa {} figure {name}", env!("CARGO_PKG_VERSION")),
        fig.description.to_string(),
        format!(
            "grid: {} points, row-major with the first axis outermost",
            coordinates.len()
        ),
    ];
    for (i, a) in fig.axes.iter().enumerate() {
        provenance.push(a.config_line(i + 1));
    }
    if !fig.family.is_empty() {
        let gains: Vec<String> = fig.family.iter().map(|g| format!("{g}kappa_o")).collect();
        provenance.push(format!("family: G = {} (overrides G below)", gains.join(", ")));
    }
    provenance.push("parameters (axis values override the matching keys):".into());
    provenance.push(serialize(spec).trim_end().to_string());

    Some(FigureData {
        summary: Summary::tally(&results),
        table: Table {
            provenance,
            columns,
            rows,
        },
    })
}
