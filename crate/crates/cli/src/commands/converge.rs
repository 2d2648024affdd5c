//! `converge`: error sweep over mesh sizes with a log-log slope check.

use serde_json::json;
use vortex_panel::boundary_method::convergence_sweep_with_workers;

use crate::config::ConvergeConfig;
use crate::report::{csv_line, num, opt_num, CliError, Exit, Outcome};

pub fn run(cfg: &ConvergeConfig, workers: usize) -> Result<Outcome, CliError> {
    let [lo, hi] = cfg.slope_band;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::invalid("slope_band must be a finite [low, high] pair").with_key("slope_band"));
    }
    let sweep = convergence_sweep_with_workers(&cfg.vorticity, &cfg.n_list, &cfg.eval_set, workers)?;
    let ratios = sweep.error_ratios();

    let mut csv = String::new();
    csv_line(&mut csv, &["n", "sup_error", "error_ratio_vs_prev", "runtime_seconds"].map(String::from));
    for (r, ratio) in sweep.records.iter().zip(&ratios) {
        csv_line(
            &mut csv,
            &[r.n.to_string(), num(r.sup_error), opt_num(*ratio), num(r.runtime_seconds)],
        );
    }

    let mut warnings = Vec::new();
    let (status, exit) = match sweep.slope {
        None => {
            warnings.push("fewer than two nonzero errors; slope not fitted".to_string());
            ("degenerate", Exit::Success)
        }
        Some(s) if (lo..=hi).contains(&s) => ("pass", Exit::Success),
        Some(_) => ("fail", Exit::CheckFailure),
    };
    csv_line(&mut csv, &["slope".into(), opt_num(sweep.slope), status.into(), String::new()]);
    for w in &warnings {
        log::warn!("{w}");
    }

    let summary = json!({
        "command": "converge",
        "eval_set": cfg.eval_set.descriptor(),
        "records": sweep.records.iter().zip(&ratios).map(|(r, ratio)| json!({
            "n": r.n,
            "sup_error": r.sup_error,
            "error_ratio_vs_prev": ratio,
        })).collect::<Vec<_>>(),
        "slope": sweep.slope,
        "slope_band": cfg.slope_band,
        "status": status,
        "warnings": warnings,
    });
    Ok(Outcome {
        primary: Some(csv),
        summary,
        exit,
    })
}
