//! Figure reproduction: each figure id maps to a data file (CSV) and a
//! deterministic SVG line plot, all derived from one bias-flux sweep at the
//! configured grid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::spectral::TransitionData;
use crate::svg::render_series;
use crate::sweep::{evaluate_point, sweep, ChiColumn, SweepTable};
use crate::table_io::format_number;

/// The reproducible figures, keyed by their conventional ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    F2a,
    F2b,
    F2c,
    F3a,
    F3b,
    F4a,
    F4b,
}

pub const ALL_FIGURES: [Figure; 7] =
    [Figure::F2a, Figure::F2b, Figure::F2c, Figure::F3a, Figure::F3b, Figure::F4a, Figure::F4b];

impl Figure {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "2a" => Ok(Figure::F2a),
            "2b" => Ok(Figure::F2b),
            "2c" => Ok(Figure::F2c),
            "3a" => Ok(Figure::F3a),
            "3b" => Ok(Figure::F3b),
            "4a" => Ok(Figure::F4a),
            "4b" => Ok(Figure::F4b),
            other => Err(Error::InvalidParameter {
                name: "figure",
                reason: format!("unknown figure id `{other}` (expected 2a|2b|2c|3a|3b|4a|4b)"),
            }),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Figure::F2a => "2a",
            Figure::F2b => "2b",
            Figure::F2c => "2c",
            Figure::F3a => "3a",
            Figure::F3b => "3b",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
        }
    }

    pub fn stem(&self) -> String {
        format!("fig{}", self.id())
    }

    fn title(&self) -> &'static str {
        match self {
            Figure::F2a => "Transition element moduli vs reduced flux",
            Figure::F2b => "Mixing product modulus R vs reduced flux",
            Figure::F2c => "Transition frequency detunings vs reduced flux",
            Figure::F3a => "Transition frequencies vs reduced flux",
            Figure::F3b => "Second-harmonic susceptibility modulus vs reduced flux",
            Figure::F4a => "Sum-output product modulus R1 vs reduced flux",
            Figure::F4b => "Difference-output product modulus R2 vs reduced flux",
        }
    }

    fn y_label(&self) -> &'static str {
        match self {
            Figure::F2a => "|i_ij| (I_0 units)",
            Figure::F2b => "R (I_0^3 units)",
            Figure::F2c => "detuning (GHz)",
            Figure::F3a => "frequency (GHz)",
            Figure::F3b => "|chi2| (chi units)",
            Figure::F4a => "R1 (I_0^2 units)",
            Figure::F4b => "R2 (I_0^2 units)",
        }
    }
}

/// Emitted artifacts of one figure.
#[derive(Debug, Clone)]
pub struct FigureData {
    pub figure: Figure,
    pub csv: String,
    pub svg: String,
}

impl FigureData {
    /// Write `<stem>.csv` and `<stem>.svg` under `dir`; returns the paths.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.figure.stem()));
        let svg_path = dir.join(format!("{}.svg", self.figure.stem()));
        std::fs::write(&csv_path, &self.csv)?;
        std::fs::write(&svg_path, &self.svg)?;
        Ok((csv_path, svg_path))
    }
}

fn series_for(
    figure: Figure,
    table: &SweepTable,
    reference: &TransitionData,
) -> Result<Vec<(String, Vec<f64>)>> {
    let col = |name: &str| table.column(name);
    Ok(match figure {
        Figure::F2a => vec![
            ("i12_abs".to_string(), col("i12_abs")?),
            ("i23_abs".to_string(), col("i23_abs")?),
            ("i13_abs".to_string(), col("i13_abs")?),
        ],
        Figure::F2b => vec![("r".to_string(), col("r")?)],
        Figure::F2c => {
            let d = |sel: fn(&TransitionData) -> f64, base: f64| -> Vec<f64> {
                table.rows.iter().map(|r| sel(&r.td) - base).collect()
            };
            vec![
                ("delta21_ghz".to_string(), d(|t| t.omega21, reference.omega21)),
                ("delta31_ghz".to_string(), d(|t| t.omega31, reference.omega31)),
                ("delta32_ghz".to_string(), d(|t| t.omega32, reference.omega32)),
            ]
        }
        Figure::F3a => vec![
            ("nu21_ghz".to_string(), col("nu21_ghz")?),
            ("nu31_ghz".to_string(), col("nu31_ghz")?),
            ("nu32_ghz".to_string(), col("nu32_ghz")?),
        ],
        Figure::F3b => vec![("chi_shg_abs".to_string(), col("chi_shg_abs")?)],
        Figure::F4a => vec![("r1".to_string(), col("r1")?)],
        Figure::F4b => vec![("r2".to_string(), col("r2")?)],
    })
}

fn csv_for(xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let mut out = String::from("f");
    for (name, _) in series {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for (k, &x) in xs.iter().enumerate() {
        let _ = write!(out, "{}", format_number(x));
        for (_, v) in series {
            let _ = write!(out, ",{}", format_number(v[k]));
        }
        out.push('\n');
    }
    out
}

/// Build one figure from an already computed sweep table and the
/// optimal-point reference.
pub fn figure_from_table(
    figure: Figure,
    table: &SweepTable,
    reference: &TransitionData,
) -> Result<FigureData> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r.f).collect();
    let series = series_for(figure, table, reference)?;
    let csv = csv_for(&xs, &series);
    let svg = render_series(&xs, &series, figure.title(), figure.y_label())?;
    Ok(FigureData { figure, csv, svg })
}

/// Run the configured sweep once and emit every requested figure from it.
pub fn reproduce_figures(cfg: &RunConfig, figures: &[Figure]) -> Result<Vec<FigureData>> {
    let table = sweep(
        &cfg.circuit,
        &cfg.basis,
        &cfg.rates,
        cfg.sweep.f_min,
        cfg.sweep.f_max,
        cfg.sweep.steps,
        &[ChiColumn::ShgAbs],
    )?;
    let reference = evaluate_point(&cfg.circuit, &cfg.basis, &cfg.rates, 0.5, &[])?.td;
    figures.iter().map(|&fig| figure_from_table(fig, &table, &reference)).collect()
}
