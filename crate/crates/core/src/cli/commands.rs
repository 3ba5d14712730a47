use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::figures::{
    build_figures, figures_json, render_bars, render_markdown, render_svg, render_wide_csv, Figure, Panel,
};
use super::report::{parse_report_csv, report_json, report_rows, write_report_csv};
use super::{generate, CliError, InputPaths, RunConfig, SynthFiles, SynthSpec};
use crate::evaluate::{cross_validate, design_matrix, spearman_matrix, CorrelationMatrix, EvaluationReport};
use crate::ingest::{
    assemble_samples, build_station_records, parse_ghcnd_dly, parse_ghcnd_stations, parse_grid_series, AssemblyOptions,
    GaugeData, GridSeries, PredictorSet, ProductTag, SampleTable, StationInventory, ALL_PREDICTORS, PREDICTAND_NAME,
};
use crate::learners::{dump_text, fit_xgb, gain_importance, write_model, FittedModel, ImportanceTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(format!("unknown format {s:?}; expected csv, json or svg")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Named file contents, written together or not at all.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn push(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.into(), bytes.into()));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    /// Stage every file under a temporary name, then rename into place.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let staged: Vec<(PathBuf, PathBuf)> = self
            .files
            .iter()
            .map(|(name, _)| (dir.join(format!(".{name}.partial")), dir.join(name)))
            .collect();
        let cleanup = |upto: usize| {
            for (tmp, _) in &staged[..upto] {
                let _ = fs::remove_file(tmp);
            }
        };
        for (i, ((_, bytes), (tmp, _))) in self.files.iter().zip(&staged).enumerate() {
            if let Err(e) = fs::write(tmp, bytes) {
                cleanup(i + 1);
                return Err(e.into());
            }
        }
        for (tmp, dst) in &staged {
            fs::rename(tmp, dst)?;
        }
        Ok(staged.into_iter().map(|(_, d)| d).collect())
    }
}

/// Generated files plus a `config.toml` that runs on them.
pub fn synth_outputs(spec: &SynthSpec) -> Result<Outputs, CliError> {
    let files = generate(spec)?;
    let mut out = Outputs::default();
    for (name, bytes) in files.named() {
        out.push(name, bytes);
    }
    let config = RunConfig {
        seed: spec.seed,
        input: Some(InputPaths {
            gauges: SynthFiles::NAMES[0].into(),
            stations: SynthFiles::NAMES[1].into(),
            persiann: SynthFiles::NAMES[2].into(),
            imerg: SynthFiles::NAMES[3].into(),
        }),
        ..RunConfig::default()
    };
    out.push("config.toml", config.to_toml_string());
    Ok(out)
}

pub fn cmd_synth(spec: &SynthSpec, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    synth_outputs(spec)?.write_all(out_dir)
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn read_inputs(cfg: &RunConfig) -> Result<(GaugeData, StationInventory, GridSeries, GridSeries), CliError> {
    match &cfg.input {
        Some(p) => Ok((
            parse_ghcnd_dly(open(&p.gauges)?)?,
            parse_ghcnd_stations(open(&p.stations)?)?,
            parse_grid_series(open(&p.persiann)?, Some(ProductTag::Persiann))?,
            parse_grid_series(open(&p.imerg)?, Some(ProductTag::Imerg))?,
        )),
        None => generate(&cfg.synth_or_default())?.parse(),
    }
}

/// Read or synthesize the inputs and assemble the regression samples.
pub fn load_samples(cfg: &RunConfig) -> Result<SampleTable, CliError> {
    cfg.validate()?;
    let (gauges, inventory, persiann, imerg) = read_inputs(cfg)?;
    let records = build_station_records(&inventory, &gauges, cfg.study.start, cfg.study.end);
    let options = AssemblyOptions {
        window: cfg.study.window(),
        imerg_target: cfg.study.imerg_target.resolve(persiann.spec())?,
    };
    let table = assemble_samples(&records, &persiann, &imerg, &options)?;
    if table.is_empty() {
        return Err(CliError::Data("no samples survive assembly in the study window".into()));
    }
    Ok(table)
}

pub fn run_evaluation(cfg: &RunConfig) -> Result<(SampleTable, EvaluationReport), CliError> {
    let table = load_samples(cfg)?;
    let report = cross_validate(&table, &cfg.cv_options()?)?;
    Ok((table, report))
}

fn push_figures(out: &mut Outputs, figs: &[Figure]) {
    for f in figs {
        out.push(format!("{}.svg", f.name), render_svg(f));
    }
}

pub fn run_outputs(report: &EvaluationReport, cfg: &RunConfig, format: OutputFormat) -> Outputs {
    let rows = report_rows(report);
    let mut out = Outputs::default();
    out.push("report.csv", write_report_csv(&rows));
    out.push("report.json", report_json(report, cfg));
    if format == OutputFormat::Svg {
        push_figures(&mut out, &build_figures(&rows));
    }
    out
}

pub fn cmd_run(cfg: &RunConfig, format: OutputFormat) -> Result<(EvaluationReport, Vec<PathBuf>), CliError> {
    let (_, report) = run_evaluation(cfg)?;
    let written = run_outputs(&report, cfg, format).write_all(&cfg.output.dir)?;
    Ok((report, written))
}

/// Correlations and full-data gain importance.
#[derive(Debug, Clone, PartialEq)]
pub struct Exploration {
    pub correlation: CorrelationMatrix,
    pub predictor_names: Vec<&'static str>,
    pub importance: ImportanceTable,
    pub model: FittedModel,
}

pub fn explore(table: &SampleTable, cfg: &RunConfig) -> Result<Exploration, CliError> {
    let mut names = vec![PREDICTAND_NAME];
    names.extend(ALL_PREDICTORS.iter().map(|p| p.name()));
    let mut columns = vec![table.samples.iter().map(|s| s.y).collect::<Vec<_>>()];
    columns.extend(
        ALL_PREDICTORS
            .iter()
            .map(|p| table.samples.iter().map(|s| p.extract(s)).collect::<Vec<_>>()),
    );
    let correlation = spearman_matrix(&names, &columns)?;

    let rows: Vec<usize> = (0..table.len()).collect();
    let (x, y) = design_matrix(table, &rows, PredictorSet::Set3);
    let model = FittedModel::Xgb(fit_xgb(&x, &y, &cfg.xgboost)?);
    let importance = gain_importance(&model)?;
    Ok(Exploration {
        correlation,
        predictor_names: PredictorSet::Set3.names(),
        importance,
        model,
    })
}

fn fmt_corr(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn explore_outputs(ex: &Exploration, format: OutputFormat) -> Result<Outputs, CliError> {
    let mut out = Outputs::default();
    let m = &ex.correlation;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["variable".to_string()];
    header.extend(m.names.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for i in 0..m.size() {
        let mut rec = vec![m.names[i].clone()];
        rec.extend((0..m.size()).map(|j| fmt_corr(m.get(i, j))));
        w.write_record(&rec).expect("in-memory write");
    }
    out.push("spearman.csv", w.into_inner().expect("in-memory flush"));

    let ranking = ex.importance.ranking();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "predictor", "gain_fraction"])
        .expect("in-memory write");
    for (r, &f) in ranking.iter().enumerate() {
        w.write_record([
            (r + 1).to_string(),
            ex.predictor_names[f].to_string(),
            ex.importance.fractions[f].to_string(),
        ])
        .expect("in-memory write");
    }
    out.push("importance.csv", w.into_inner().expect("in-memory flush"));

    let mut model = Vec::new();
    write_model(&mut model, &ex.model)?;
    out.push("model.bin", model);
    out.push("model.txt", dump_text(&ex.model, Some(&ex.predictor_names)));

    match format {
        OutputFormat::Csv => {}
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "spearman": {
                    "variables": m.names,
                    "values": (0..m.size()).map(|i| (0..m.size()).map(|j| m.get(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                },
                "importance": ranking.iter().map(|&f| serde_json::json!({
                    "predictor": ex.predictor_names[f],
                    "gain_fraction": ex.importance.fractions[f],
                })).collect::<Vec<_>>(),
                "degenerate": ex.importance.degenerate,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            out.push("explore.json", s);
        }
        OutputFormat::Svg => {
            let fig = Figure {
                name: "spearman".into(),
                title: "Spearman correlation between the predictand and the predictors".into(),
                panels: vec![Panel {
                    title: String::new(),
                    row_labels: m.names.clone(),
                    col_labels: (0..m.size()).map(|j| j.to_string()).collect(),
                    cells: (0..m.size())
                        .map(|i| (0..m.size()).map(|j| m.get(i, j).map(|v| format!("{v:.2}"))).collect())
                        .collect(),
                }],
            };
            out.push("spearman.svg", render_svg(&fig));
            let bars: Vec<(String, f64)> = ranking
                .iter()
                .map(|&f| (ex.predictor_names[f].to_string(), ex.importance.fractions[f]))
                .collect();
            out.push("importance.svg", render_bars("Gain importance, predictor set 3", &bars));
        }
    }
    Ok(out)
}

pub fn cmd_explore(cfg: &RunConfig, format: OutputFormat) -> Result<(Exploration, Vec<PathBuf>), CliError> {
    let table = load_samples(cfg)?;
    let ex = explore(&table, cfg)?;
    let written = explore_outputs(&ex, format)?.write_all(&cfg.output.dir)?;
    Ok((ex, written))
}

/// Render a long-format report. `svg` (default for this command) writes
/// heatmaps plus `tables.md`; `csv` and `json` write wide tables.
pub fn report_outputs(report_csv: &[u8], format: OutputFormat) -> Result<Outputs, CliError> {
    let rows = parse_report_csv(report_csv)?;
    let figs = build_figures(&rows);
    if figs.is_empty() {
        return Err(CliError::Schema(
            "report holds no improvement or rank-frequency rows".into(),
        ));
    }
    let mut out = Outputs::default();
    match format {
        OutputFormat::Svg => {
            push_figures(&mut out, &figs);
            out.push("tables.md", render_markdown(&figs));
        }
        OutputFormat::Csv => {
            for f in &figs {
                out.push(format!("{}.csv", f.name), render_wide_csv(f));
            }
        }
        OutputFormat::Json => out.push("figures.json", figures_json(&figs)),
    }
    Ok(out)
}

pub fn cmd_report(input: &Path, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, CliError> {
    let data = fs::read(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    report_outputs(&data, format)?.write_all(out_dir)
}
