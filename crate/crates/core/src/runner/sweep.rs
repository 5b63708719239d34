//! Photon-number × χ sweeps and their CSV form.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{cr_bound_rs, cr_bound_rs_general_q};
use crate::error::{Error, Result};
use crate::interferometer::{
    quadrature_bound_rs, sql_bound_rs, squeezed_lossy_bound, validity_metric, MeasurementPlan,
    SqueezedProbe,
};
use crate::probe::{KerrVariant, Probe};
use crate::runner::feasibility::y_tilde;
use crate::schwarzschild::Geometry;
use crate::stats::log_grid;

pub const CSV_HEADER: [&str; 9] = [
    "N",
    "chi",
    "y_tilde",
    "bound_fisher",
    "bound_quadrature",
    "bound_sql",
    "bound_squeezed_lossy",
    "validity_metric",
    "valid_flag",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    Fisher,
    Quadrature,
    Sql,
    SqueezedLossy,
}

impl SweepMethod {
    pub const ALL: [SweepMethod; 4] = [
        SweepMethod::Fisher,
        SweepMethod::Quadrature,
        SweepMethod::Sql,
        SweepMethod::SqueezedLossy,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub n_decade_min: i32,
    pub n_decade_max: i32,
    pub points_per_decade: u32,
    pub chis: Vec<f64>,
    pub omega: f64,
    pub variant: KerrVariant,
    pub q: u32,
    pub geometry: Geometry,
    pub plan: MeasurementPlan,
    pub methods: Vec<SweepMethod>,
    pub validity_threshold: f64,
    pub squeezed_eps: f64,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Desk-scale defaults: L = 1 cm, h = 10 m, ω = 1e14 rad/s, M = 1e10.
    pub fn desk_scale(chis: Vec<f64>) -> Self {
        SweepSpec {
            n_decade_min: 6,
            n_decade_max: 22,
            points_per_decade: 4,
            chis,
            omega: 1e14,
            variant: KerrVariant::ShiftedQuadratic,
            q: 2,
            geometry: Geometry::earth(10.0, 0.01),
            plan: MeasurementPlan::lossless(10_000_000_000),
            methods: SweepMethod::ALL.to_vec(),
            validity_threshold: crate::interferometer::LINEARIZATION_THRESHOLD,
            squeezed_eps: 1.0 - 1e-6,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_decade_max < self.n_decade_min || self.points_per_decade == 0 {
            return Err(Error::invalid("sweep grid", "empty photon-number grid"));
        }
        if self.chis.is_empty() {
            return Err(Error::invalid("chi_per_s", "empty chi list"));
        }
        if let Some(bad) = self.chis.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(Error::invalid(
                "chi_per_s",
                format!("chi {bad} must be finite and >= 0"),
            ));
        }
        if !(self.omega > 0.0) {
            return Err(Error::invalid("omega", "sweeps need omega > 0"));
        }
        if !(self.validity_threshold > 0.0) {
            return Err(Error::invalid("validity_threshold", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.squeezed_eps) {
            return Err(Error::invalid(
                "squeezed_eps",
                "transmission outside [0, 1]",
            ));
        }
        self.geometry.validate()?;
        self.plan.validate()
    }

    pub fn photon_numbers(&self) -> Vec<f64> {
        log_grid(self.n_decade_min, self.n_decade_max, self.points_per_decade)
    }

    fn probe(&self, n: f64, chi: f64) -> Probe {
        match self.variant {
            KerrVariant::ShiftedQuadratic => Probe::new(n, self.omega, chi),
            KerrVariant::Monomial => Probe::monomial(n, self.omega, chi, self.q),
        }
    }

    fn wants(&self, method: SweepMethod) -> bool {
        self.methods.contains(&method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: f64,
    pub chi: f64,
    pub y_tilde: f64,
    pub fisher: Option<f64>,
    pub quadrature: Option<f64>,
    pub sql: Option<f64>,
    pub squeezed_lossy: Option<f64>,
    pub validity_metric: f64,
    pub valid: bool,
}

fn evaluate(spec: &SweepSpec, n: f64, chi: f64) -> Result<SweepRow> {
    let probe = spec.probe(n, chi);
    let g = &spec.geometry;
    let m = spec.plan.repetitions;
    let metric = validity_metric(&probe, g);
    let valid = metric <= spec.validity_threshold;
    let fisher = if spec.wants(SweepMethod::Fisher) {
        let bound = match spec.variant {
            KerrVariant::ShiftedQuadratic => cr_bound_rs(&probe, g, m)?,
            KerrVariant::Monomial => cr_bound_rs_general_q(&probe, g, m)?,
        };
        Some(bound.relative_error)
    } else {
        None
    };
    let quadrature = if spec.wants(SweepMethod::Quadrature) && valid {
        Some(quadrature_bound_rs(&probe, g, &spec.plan)?.relative_error)
    } else {
        None
    };
    let sql = if spec.wants(SweepMethod::Sql) {
        Some(sql_bound_rs(&probe, g, m)?.relative_error)
    } else {
        None
    };
    // half the photons in the coherent part, half squeezed
    let squeezed_lossy = if spec.wants(SweepMethod::SqueezedLossy) {
        let sq = SqueezedProbe::from_squeezed_photons(0.5 * n, 0.5 * n, spec.squeezed_eps)?;
        Some(squeezed_lossy_bound(&sq, g, spec.omega, m)?.relative_error)
    } else {
        None
    };
    Ok(SweepRow {
        n,
        chi,
        y_tilde: y_tilde(&probe, g.n_prime)?,
        fisher,
        quadrature,
        sql,
        squeezed_lossy,
        validity_metric: metric,
        valid,
    })
}

/// One row per (χ, N), ordered by χ as listed and then by increasing N.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let ns = spec.photon_numbers();
    let points: Vec<(f64, f64)> = spec
        .chis
        .iter()
        .flat_map(|&chi| ns.iter().map(move |&n| (n, chi)))
        .collect();
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&(n, chi)| evaluate(spec, n, chi))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = points
        .iter()
        .map(|&(n, chi)| evaluate(spec, n, chi))
        .collect();
    rows
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            cell(Some(r.n)),
            cell(Some(r.chi)),
            cell(Some(r.y_tilde)),
            cell(r.fisher),
            cell(r.quadrature),
            cell(r.sql),
            cell(r.squeezed_lossy),
            cell(Some(r.validity_metric)),
            r.valid.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_path(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}
