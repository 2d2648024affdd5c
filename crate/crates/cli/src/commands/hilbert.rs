//! `hilbert`: circular Hilbert transform of sampled periodic data.

use serde_json::json;
use vortex_panel::hilbert_solver::{hilbert_pv, hilbert_spectral, GridKind, PeriodicSamples};
use vortex_panel::UniformBoundaryMesh;

use crate::config::{HilbertConfig, HilbertMethod};
use crate::report::{csv_line, num, CliError, Exit, Outcome};

fn read_samples(cfg: &HilbertConfig) -> Result<Vec<f64>, CliError> {
    match (&cfg.input, &cfg.samples) {
        (Some(_), Some(_)) => Err(CliError::invalid("give either input or samples, not both").with_key("samples")),
        (None, None) => Err(CliError::invalid("one of input or samples is required").with_key("input")),
        (None, Some(s)) => Ok(s.clone()),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("cannot read samples {}: {e}", path.display())).with_key("input"))?;
            text.lines()
                .enumerate()
                .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty())
                .map(|(i, l)| {
                    l.parse::<f64>()
                        .map_err(|e| CliError::invalid(format!("line {}: {e}", i + 1)).with_key("input"))
                })
                .collect()
        }
    }
}

pub fn run(cfg: &HilbertConfig) -> Result<Outcome, CliError> {
    let grid: GridKind = cfg.grid.into();
    let samples = PeriodicSamples::new(read_samples(cfg)?, grid)?;
    let transformed = match cfg.method {
        HilbertMethod::Spectral => hilbert_spectral(&samples)?,
        HilbertMethod::Staggered => {
            if grid != GridKind::Node {
                return Err(CliError::invalid("staggered method takes node-grid samples").with_key("grid"));
            }
            hilbert_pv(&samples, &UniformBoundaryMesh::new(samples.len())?)?
        }
    };

    let mut csv = String::new();
    csv_line(&mut csv, &["index", "theta", "value", "hilbert_theta", "hilbert"].map(String::from));
    let (ta, tb) = (samples.angles(), transformed.angles());
    for j in 0..samples.len() {
        csv_line(
            &mut csv,
            &[
                j.to_string(),
                num(ta[j]),
                num(samples.values()[j]),
                num(tb[j]),
                num(transformed.values()[j]),
            ],
        );
    }
    let summary = json!({
        "command": "hilbert",
        "samples": samples.len(),
        "method": format!("{:?}", cfg.method).to_lowercase(),
        "input_mean": samples.mean(),
        "output_mean": transformed.mean(),
    });
    Ok(Outcome {
        primary: Some(csv),
        summary,
        exit: Exit::Success,
    })
}
