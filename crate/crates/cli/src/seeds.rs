//! Parsing for the little initial-window language used on the command line.
//!
//! A seed describes one history window, one entry per channel, separated by
//! commas. Each entry is an optional scale followed by a form:
//!
//! ```text
//! [SCALE*]FORM
//! FORM := zero | cos | sin | exp | const:V | table:v;v;...
//! ```
//!
//! `cos`, `sin` and `exp` are evaluated at the integer offsets of the window,
//! so `exp` on a window `[-3, 0]` yields `e^-3, e^-2, e^-1, 1`. A `table`
//! must list exactly one value per offset, oldest first. Examples:
//!
//! ```text
//! cos,sin                 two channels
//! -1.5*exp,const:0.25     scaled exponential and a constant
//! table:0;1;0;1,zero      explicit samples next to a flat channel
//! ```
//!
//! A seed *pair* is two seeds joined by `@`, e.g. `cos,sin@exp,zero`.

use ddes_core::HistoryState;

pub fn parse_seed(spec: &str, channels: usize, window_start: i64) -> Result<HistoryState, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != channels {
        return Err(format!(
            "seed `{spec}` describes {} channel(s), the model has {channels}",
            parts.len()
        ));
    }
    let mut rows = Vec::with_capacity(channels);
    for (i, part) in parts.iter().enumerate() {
        let samples = channel_samples(part.trim(), window_start)
            .map_err(|e| format!("seed channel {}: {e}", i + 1))?;
        rows.push(samples);
    }
    HistoryState::new(window_start, rows).map_err(|e| e.to_string())
}

pub fn parse_seed_pair(
    spec: &str,
    channels: usize,
    window_start: i64,
) -> Result<(HistoryState, HistoryState), String> {
    let (a, b) = spec
        .split_once('@')
        .ok_or_else(|| format!("seed pair `{spec}` must be two seeds joined by `@`"))?;
    Ok((
        parse_seed(a.trim(), channels, window_start)?,
        parse_seed(b.trim(), channels, window_start)?,
    ))
}

fn channel_samples(entry: &str, window_start: i64) -> Result<Vec<f64>, String> {
    if entry.is_empty() {
        return Err("empty entry".into());
    }
    let (scale, form) = match entry.split_once('*') {
        Some((s, f)) => {
            let scale: f64 = s
                .trim()
                .parse()
                .map_err(|_| format!("bad scale `{}`", s.trim()))?;
            (scale, f.trim())
        }
        None => (1.0, entry),
    };
    let len = (1 - window_start) as usize;
    let offsets = window_start..=0;
    let raw: Vec<f64> = match form {
        "zero" => vec![0.0; len],
        "cos" => offsets.map(|j| (j as f64).cos()).collect(),
        "sin" => offsets.map(|j| (j as f64).sin()).collect(),
        "exp" => offsets.map(|j| (j as f64).exp()).collect(),
        _ => {
            if let Some(v) = form.strip_prefix("const:") {
                let x: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad constant `{}`", v.trim()))?;
                vec![x; len]
            } else if let Some(list) = form.strip_prefix("table:") {
                let vals: Vec<f64> = list
                    .split(';')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| format!("bad table value `{}`", v.trim()))
                    })
                    .collect::<Result<_, _>>()?;
                if vals.len() != len {
                    return Err(format!(
                        "table needs {len} values for the window [{window_start}, 0], got {}",
                        vals.len()
                    ));
                }
                vals
            } else {
                return Err(format!(
                    "unknown form `{form}` (expected zero|cos|sin|exp|const:V|table:v;v;...)"
                ));
            }
        }
    };
    Ok(raw.into_iter().map(|v| scale * v).collect())
}
