use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use cmpg::models::{
    gen_block_withholding, gen_double_spend, gen_proof_of_stake, BlockWithholdingParams, DoubleSpendParams,
    ProofOfStakeParams,
};
use cmpg::{solve, Game, Options};

use crate::Model;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    #[serde(rename = "#T")]
    pub transitions: Option<usize>,
    #[serde(rename = "States")]
    pub states: Option<usize>,
    #[serde(rename = "#SI")]
    pub strategy_iterations: Option<usize>,
    #[serde(rename = "Time(s)")]
    pub seconds: Option<f64>,
    #[serde(rename = "Lower")]
    pub lower: Option<f64>,
    #[serde(rename = "Upper")]
    pub upper: Option<f64>,
    #[serde(rename = "Status")]
    pub status: String,
    #[serde(skip)]
    pub size: usize,
}

/// Parses `10,14`, `100..900:100` or a mix of both.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((range, step)) = tok.split_once("..") {
            let (end, step) = match step.split_once(':') {
                Some((e, s)) => (e, s),
                None => (step, "1"),
            };
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad size `{x}`: {e}"));
            let (a, b, k) = (parse(range)?, parse(end)?, parse(step)?);
            if k == 0 || a > b {
                return Err(format!("bad range `{tok}`"));
            }
            out.extend((a..=b).step_by(k));
        } else {
            out.push(tok.parse().map_err(|e| format!("bad size `{tok}`: {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(out)
}

pub fn build(model: Model, size: usize, step: f64) -> cmpg::Result<Game> {
    match model {
        Model::Bw => gen_block_withholding(&BlockWithholdingParams::new(size)?),
        Model::Ds => gen_double_spend(&DoubleSpendParams::with_states(size)?),
        Model::Pos => gen_proof_of_stake(&ProofOfStakeParams::with_step(size, step)?),
        Model::Rps => Err(cmpg::Error::InvalidInput("rps has no size parameter".into())),
    }
}

fn run_row(model: Model, size: usize, step: f64, options: &Options) -> ExperimentRow {
    let mut row = ExperimentRow {
        transitions: None,
        states: None,
        strategy_iterations: None,
        seconds: None,
        lower: None,
        upper: None,
        status: String::new(),
        size,
    };
    let game = match build(model, size, step) {
        Ok(g) => g,
        Err(e) => {
            row.status = format!("error: {e}");
            return row;
        }
    };
    row.transitions = Some(game.transition_count());
    row.states = Some(game.n_states());
    let start = Instant::now();
    match solve(&game, options) {
        Ok(report) => {
            row.strategy_iterations = Some(report.strategy_iterations());
            row.lower = Some(report.lower);
            row.upper = Some(report.upper);
            row.status = report.termination.as_str().to_string();
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row.seconds = Some(start.elapsed().as_secs_f64());
    row
}

pub fn run(model: Model, sizes: &[usize], step: f64, options: &Options, parallel: bool) -> Vec<ExperimentRow> {
    let mut rows: Vec<ExperimentRow> = if parallel {
        sizes.par_iter().map(|&n| run_row(model, n, step, options)).collect()
    } else {
        sizes.iter().map(|&n| run_row(model, n, step, options)).collect()
    };
    rows.sort_by_key(|r| (r.states.unwrap_or(usize::MAX), r.size));
    rows
}

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into())
}

pub fn render_table(rows: &[ExperimentRow]) -> String {
    let header = ["#T", "States", "#SI", "Time(s)", "Lower", "Upper", "Status"];
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                cell(&r.transitions),
                cell(&r.states),
                cell(&r.strategy_iterations),
                r.seconds.map(|t| format!("{t:.3}")).unwrap_or_else(|| "-".into()),
                r.lower.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into()),
                r.upper.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into()),
                r.status.clone(),
            ]
        })
        .collect();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for line in &body {
        for (w, c) in width.iter_mut().zip(line) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    fmt_line(header.to_vec(), &mut out);
    for line in &body {
        fmt_line(line.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
