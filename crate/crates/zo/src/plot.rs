//! Standalone SVG plots for trace and sweep CSVs. No rendering dependency;
//! the files are plain polylines and markers with labeled axes.

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

#[derive(Debug, PartialEq)]
enum CsvKind {
    Trace,
    Sweep,
}

struct Parsed {
    kind: CsvKind,
    /// (x, y) pairs: (iter, gap) for traces, (delta, final_gap) for sweeps.
    points: Vec<(f64, f64)>,
}

fn parse_csv(text: &str) -> Result<Parsed> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    let (kind, xi, yi) = if cols == ["iter", "gap", "calls"] {
        (CsvKind::Trace, 0usize, 1usize)
    } else if cols
        == [
            "run_id",
            "scheme",
            "d",
            "epsilon",
            "gamma",
            "delta",
            "final_gap",
            "oracle_calls",
        ]
    {
        (CsvKind::Sweep, 5usize, 6usize)
    } else {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unrecognized header: {header}"),
        });
    };
    let mut points = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected {} fields, got {}", cols.len(), fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("not a number: {s}"),
            })
        };
        points.push((parse(fields[xi])?, parse(fields[yi])?));
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    Ok(Parsed { kind, points })
}

/// Render a trace CSV as a gap-vs-iteration polyline, or a sweep CSV as a
/// final-gap-vs-delta scatter on log-log axes.
pub fn render_svg(csv_text: &str) -> Result<String> {
    let parsed = parse_csv(csv_text)?;
    let log_axes = parsed.kind == CsvKind::Sweep;

    // sweep deltas may include 0; place it one decade left of the smallest
    // positive value
    let transform = |v: f64, floor: f64| -> f64 {
        if log_axes {
            v.max(floor).log10()
        } else {
            v
        }
    };
    let min_pos_x = parsed
        .points
        .iter()
        .map(|p| p.0)
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let min_pos_y = parsed
        .points
        .iter()
        .map(|p| p.1)
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor_x = if min_pos_x.is_finite() {
        min_pos_x / 10.0
    } else {
        1e-12
    };
    let floor_y = if min_pos_y.is_finite() {
        min_pos_y / 10.0
    } else {
        1e-12
    };

    let pts: Vec<(f64, f64)> = parsed
        .points
        .iter()
        .map(|&(x, y)| (transform(x, floor_x), transform(y, floor_y)))
        .collect();
    let (mut x_min, mut x_max) = bounds(pts.iter().map(|p| p.0));
    let (mut y_min, mut y_max) = bounds(pts.iter().map(|p| p.1));
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    ));
    let (x_label, y_label) = match parsed.kind {
        CsvKind::Trace => ("iteration", "gap"),
        CsvKind::Sweep => ("log10 delta", "log10 final gap"),
    };
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>\n",
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{y_label}</text>\n",
        MARGIN / 3.0,
        HEIGHT / 2.0,
        MARGIN / 3.0,
        HEIGHT / 2.0
    ));

    match parsed.kind {
        CsvKind::Trace => {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
                coords.join(" ")
            ));
        }
        CsvKind::Sweep => {
            for &(x, y) in &pts {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n",
                    sx(x),
                    sy(y)
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}
