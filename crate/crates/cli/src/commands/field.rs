//! `field`: samples exact and approximate velocity fields at a set of points.

use serde_json::json;
use vortex_panel::boundary_method::{solve_boundary, BoundaryProblem};
use vortex_panel::fields::{velocity_plane, velocity_remainder_exact, velocity_total_exact};
use vortex_panel::{Error, Point2, Vec2};

use crate::config::{FieldConfig, FieldName};
use crate::report::{csv_line, num, CliError, Exit, Outcome};

fn evaluate(name: FieldName, cfg: &FieldConfig, problem: Option<&BoundaryProblem>, x: Point2) -> vortex_panel::Result<Vec2> {
    let approx = || problem.expect("boundary solve exists for u_app fields").velocity_approx(x);
    match name {
        FieldName::UP => velocity_plane(&cfg.vorticity, x),
        FieldName::UR => velocity_remainder_exact(&cfg.vorticity, x),
        FieldName::UTotal => velocity_total_exact(&cfg.vorticity, x),
        FieldName::UApp => approx(),
        FieldName::UAppMinusUR => Ok(approx()? - velocity_remainder_exact(&cfg.vorticity, x)?),
    }
}

pub fn run(cfg: &FieldConfig) -> Result<Outcome, CliError> {
    if cfg.fields.is_empty() {
        return Err(CliError::invalid("no fields requested").with_key("fields"));
    }
    cfg.vorticity.validate()?;
    let problem = if cfg.fields.iter().any(|f| f.needs_boundary()) {
        let n = cfg
            .n_boundary
            .ok_or_else(|| CliError::invalid("u_app fields need n_boundary").with_key("n_boundary"))?;
        Some(solve_boundary(&cfg.vorticity, n)?)
    } else {
        None
    };
    let points = cfg.sample.points()?;

    let mut csv = String::new();
    let mut header = vec!["x1".to_string(), "x2".to_string(), "masked".to_string()];
    for f in &cfg.fields {
        for suffix in ["_1", "_2", "_norm"] {
            header.push(format!("{}{suffix}", f.column()));
        }
    }
    csv_line(&mut csv, &header);

    let mut masked_rows = 0usize;
    let mut column_max = vec![0.0f64; cfg.fields.len()];
    for &x in &points {
        let values: Option<Vec<Vec2>> = if x.norm() <= 1.0 {
            None
        } else {
            let mut vals = Vec::with_capacity(cfg.fields.len());
            let mut singular = false;
            for &f in &cfg.fields {
                match evaluate(f, cfg, problem.as_ref(), x) {
                    Ok(v) => vals.push(v),
                    Err(Error::SingularEvaluation { .. }) => {
                        singular = true;
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            (!singular).then_some(vals)
        };
        let mut row = vec![num(x.x1), num(x.x2)];
        match values {
            None => {
                masked_rows += 1;
                row.push("1".into());
                row.extend(std::iter::repeat(String::new()).take(3 * cfg.fields.len()));
            }
            Some(vals) => {
                row.push("0".into());
                for (k, v) in vals.iter().enumerate() {
                    column_max[k] = column_max[k].max(v.norm());
                    row.extend([num(v.u1), num(v.u2), num(v.norm())]);
                }
            }
        }
        csv_line(&mut csv, &row);
    }

    let mut warnings = Vec::new();
    if masked_rows == points.len() {
        warnings.push("every sample point is masked".to_string());
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let summary = json!({
        "command": "field",
        "points": points.len(),
        "masked": masked_rows,
        "column_max_norm": cfg.fields.iter().zip(&column_max)
            .map(|(f, m)| (f.column().to_string(), json!(m)))
            .collect::<serde_json::Map<_, _>>(),
        "warnings": warnings,
    });
    Ok(Outcome {
        primary: Some(csv),
        summary,
        exit: Exit::Success,
    })
}
